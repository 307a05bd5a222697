#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "bounded/gateway/gateway.hpp"
#include "bounded/runtime/scenario.hpp"

namespace bounded::gateway {

// WebSocket transport: one JSON message per text frame. Runs its own I/O
// thread; each connection becomes a gateway Session.
class WsServer {
 public:
  // Port 0 picks a free port; see port().
  WsServer(Gateway& gateway, const std::string& host, unsigned short port);
  ~WsServer();
  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;

  unsigned short port() const;
  void start();
  void stop();
  // Blocks until stop() or SIGINT/SIGTERM.
  void wait_for_shutdown();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// `serve`: one room loop per scenario, ticking every gateway.tick_ms.
// Returns the process exit code.
int serve(const runtime::AppConfig& config, const std::vector<std::filesystem::path>& scenarios,
          const std::filesystem::path& trace_dir);

}  // namespace bounded::gateway
