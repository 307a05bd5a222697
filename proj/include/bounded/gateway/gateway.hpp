#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>

#include "bounded/gateway/protocol.hpp"
#include "bounded/runtime/room.hpp"
#include "bounded/runtime/scenario.hpp"
#include "bounded/runtime/trace.hpp"

namespace bounded::gateway {

using SessionId = std::uint64_t;
using SendFn = std::function<void(const ServerMessage&)>;

// Single writer for one room. Everything that touches the Room, including the
// subscriber list, runs on the loop thread; other threads talk to it through
// post() / call(). With a zero tick the clock only moves via step().
class RoomLoop {
 public:
  RoomLoop(runtime::RoomState initial, runtime::Services services, std::chrono::milliseconds tick,
           std::unique_ptr<runtime::TraceSink> sink = nullptr);
  ~RoomLoop();
  RoomLoop(const RoomLoop&) = delete;
  RoomLoop& operator=(const RoomLoop&) = delete;

  const std::string& room_id() const { return room_id_; }

  using Task = std::function<void(runtime::Room&)>;
  void post(Task task);

  // Runs f(room) on the loop thread; the future carries the result or the
  // exception.
  template <typename F>
  auto call(F f) -> std::future<std::invoke_result_t<F, runtime::Room&>> {
    using R = std::invoke_result_t<F, runtime::Room&>;
    auto task = std::make_shared<std::packaged_task<R(runtime::Room&)>>(std::move(f));
    auto fut = task->get_future();
    post([task](runtime::Room& room) { (*task)(room); });
    return fut;
  }

  // Advances `rounds` rounds on the loop thread and waits for them.
  void step(int rounds = 1);

  // Loop-thread only (call from inside a task).
  void add_subscriber(SessionId id, SendFn send);
  void remove_subscriber(SessionId id);
  Snapshot snapshot(const runtime::Room& room) const;

  void stop();

 private:
  void run();
  void advance(runtime::Room& room);

  std::string room_id_;
  runtime::Services services_;
  std::unique_ptr<runtime::TraceSink> sink_;
  std::unique_ptr<runtime::Room> room_;
  std::chrono::milliseconds tick_;
  std::map<SessionId, SendFn> subscribers_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Task> tasks_;
  bool stopping_ = false;
  std::thread thread_;
};

// One connected client. `send` may be called from any room loop thread and
// must be safe to call concurrently with the transport's own writes.
struct Session {
  SessionId id = 0;
  SendFn send;
  std::optional<std::string> room_id;
  std::optional<PlayerId> player_id;
};

// Routes client messages to room loops. Holds no room state beyond
// subscriptions. Replies and broadcasts both go out through Session::send;
// replies for a joined room are sent from that room's loop so a snapshot
// always precedes the events that follow it. The reply is also returned for
// callers that want it synchronously; transports must not send it again.
class Gateway {
 public:
  // Rooms are registered before any session connects.
  void add_room(std::shared_ptr<RoomLoop> loop);
  RoomLoop* room(const std::string& room_id) const;

  Session open_session(SendFn send);
  ServerMessage handle_client_message(Session& session, const ClientMessage& msg);
  // Parses one frame; malformed input yields an error reply.
  ServerMessage handle_text(Session& session, std::string_view text);
  void close_session(Session& session);

 private:
  ServerMessage reply_now(Session& session, ServerMessage msg);

  std::map<std::string, std::shared_ptr<RoomLoop>> rooms_;
  std::atomic<SessionId> next_session_{1};
};

}  // namespace bounded::gateway
