#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "bounded/core/catalog.hpp"
#include "bounded/core/http.hpp"
#include "bounded/ground/embedder.hpp"
#include "bounded/policy/policy.hpp"
#include "bounded/runtime/room_state.hpp"

namespace bounded::runtime {

// Scenario JSONL. Line types:
//   {"type":"room","room_id":..,"master_seed":..,"config":{..}?}
//   {"type":"agent","agent_id":..,"display_name":..,"emotion":..,
//    "heartbeat_offset":..,"heartbeat_period"?:..,"owner"?:..,"persona"?:..,
//    "harness_driven"?:bool}
//   {"type":"relationship","from":..,"to":..,"score":..}
// Agents keep file order, which is also the processing order.
RoomState parse_scenario(std::istream& in, const RoomConfig& base = {});
RoomState load_scenario(const std::filesystem::path& path, const RoomConfig& base = {});

struct EmbedderSettings {
  std::string backend = "fixture";  // fixture | remote
  std::filesystem::path path;
  HttpEndpoint endpoint;
  std::string model_id;
  std::size_t dimension = 0;
};

struct PolicySettings {
  std::string backend = "mock";  // mock | remote
  std::filesystem::path rules;
  HttpEndpoint endpoint;
};

struct GatewaySettings {
  std::string host = "127.0.0.1";
  unsigned short port = 8765;
  // Wall-clock length of one logical tick in `serve`.
  int tick_ms = 1000;
};

struct AppConfig {
  RoomConfig room;
  std::filesystem::path catalog;
  EmbedderSettings embedder;
  PolicySettings policy;
  GatewaySettings gateway;
};

// Relative paths are resolved against the config file's directory.
AppConfig load_app_config(const std::filesystem::path& path);
// The shipped defaults under `data_dir`.
AppConfig default_app_config(const std::filesystem::path& data_dir);

// BOUNDED_POLICY_URL, BOUNDED_POLICY_AUTH, BOUNDED_EMBEDDER_URL,
// BOUNDED_EMBEDDER_AUTH, BOUNDED_EMBEDDER_MODEL, BOUNDED_EMBEDDER_DIM.
// A URL switches that backend to remote.
void apply_env_overrides(AppConfig& config);

struct Services {
  std::shared_ptr<const BundleCatalog> catalog;
  std::shared_ptr<const ground::Embedder> embedder;
  std::shared_ptr<policy::PolicyBackend> policy;
};

Services make_services(const AppConfig& config);
std::shared_ptr<const ground::Embedder> make_embedder(const EmbedderSettings& s);
std::shared_ptr<policy::PolicyBackend> make_policy(const PolicySettings& s);

}  // namespace bounded::runtime
