#include "bounded/gateway/gateway.hpp"

#include <algorithm>
#include <iostream>

#include "bounded/core/errors.hpp"

namespace bounded::gateway {

RoomLoop::RoomLoop(runtime::RoomState initial, runtime::Services services, std::chrono::milliseconds tick,
                   std::unique_ptr<runtime::TraceSink> sink)
    : room_id_(initial.room_id), services_(std::move(services)), sink_(std::move(sink)), tick_(tick) {
  room_ = std::make_unique<runtime::Room>(std::move(initial), *services_.catalog, *services_.embedder,
                                          *services_.policy, sink_.get());
  room_->subscribe([this](const Event& e) {
    const auto msg = ServerMessage::event(room_id_, e);
    for (const auto& [id, send] : subscribers_) send(msg);
  });
  thread_ = std::thread([this] { run(); });
}

RoomLoop::~RoomLoop() { stop(); }

void RoomLoop::post(Task task) {
  {
    std::lock_guard lock(mu_);
    if (stopping_) throw Error(Errc::unknown_room, "room '" + room_id_ + "' is shutting down");
    tasks_.push_back(std::move(task));
  }
  cv_.notify_one();
}

void RoomLoop::step(int rounds) {
  call([this, rounds](runtime::Room& room) {
    for (int i = 0; i < rounds; ++i) advance(room);
  }).get();
}

void RoomLoop::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_one();
  if (thread_.joinable()) thread_.join();
}

void RoomLoop::add_subscriber(SessionId id, SendFn send) { subscribers_[id] = std::move(send); }

void RoomLoop::remove_subscriber(SessionId id) { subscribers_.erase(id); }

Snapshot RoomLoop::snapshot(const runtime::Room& room) const {
  const auto& st = room.state();
  Snapshot s;
  s.room_id = st.room_id;
  s.logical_clock = st.logical_clock;
  s.agents = st.agents;
  const std::size_t n = std::min(st.history.size(), st.config.history_window);
  s.recent_events.assign(st.history.end() - static_cast<std::ptrdiff_t>(n), st.history.end());
  return s;
}

void RoomLoop::advance(runtime::Room& room) {
  try {
    room.advance_round();
  } catch (const std::exception& e) {
    std::cerr << "room " << room_id_ << ": round failed: " << e.what() << "\n";
  }
}

void RoomLoop::run() {
  using clock = std::chrono::steady_clock;
  auto deadline = clock::now() + tick_;
  std::unique_lock lock(mu_);
  for (;;) {
    if (tick_.count() > 0) {
      cv_.wait_until(lock, deadline, [this] { return stopping_ || !tasks_.empty(); });
    } else {
      cv_.wait(lock, [this] { return stopping_ || !tasks_.empty(); });
    }
    // Drain queued tasks even when stopping so pending futures resolve.
    std::deque<Task> batch;
    batch.swap(tasks_);
    const bool stopping = stopping_;
    lock.unlock();
    for (auto& t : batch) t(*room_);
    if (!stopping && tick_.count() > 0 && clock::now() >= deadline) {
      advance(*room_);
      deadline += tick_;
    }
    lock.lock();
    if (stopping && tasks_.empty()) break;
  }
  if (sink_) sink_->flush();
}

void Gateway::add_room(std::shared_ptr<RoomLoop> loop) {
  const auto id = loop->room_id();
  if (!rooms_.emplace(id, std::move(loop)).second) throw Error(Errc::validation, "duplicate room '" + id + "'");
}

RoomLoop* Gateway::room(const std::string& room_id) const {
  auto it = rooms_.find(room_id);
  return it == rooms_.end() ? nullptr : it->second.get();
}

Session Gateway::open_session(SendFn send) {
  Session s;
  s.id = next_session_++;
  s.send = std::move(send);
  return s;
}

ServerMessage Gateway::reply_now(Session& session, ServerMessage msg) {
  if (session.send) session.send(msg);
  return msg;
}

ServerMessage Gateway::handle_client_message(Session& session, const ClientMessage& msg) {
  auto* loop = room(msg.room_id);
  if (loop == nullptr) {
    return reply_now(session, ServerMessage::error(msg.room_id, "unknown_room", "unknown room '" + msg.room_id + "'"));
  }

  if (msg.type == ClientType::join) {
    if (session.room_id && *session.room_id != msg.room_id) close_session(session);
    const auto id = session.id;
    auto send = session.send;
    auto reply = loop->call([loop, id, send](runtime::Room& room) {
                       loop->add_subscriber(id, send);
                       auto m = ServerMessage::snapshot(loop->snapshot(room));
                       if (send) send(m);
                       return m;
                     }).get();
    session.room_id = msg.room_id;
    session.player_id = msg.player_id;
    return reply;
  }

  if (!session.room_id || *session.room_id != msg.room_id) {
    return reply_now(session, ServerMessage::error(msg.room_id, "not_joined", "join room '" + msg.room_id + "' first"));
  }
  if (msg.type != ClientType::snapshot_request && msg.player_id != *session.player_id) {
    return reply_now(session, ServerMessage::error(msg.room_id, "ownership_violation",
                                                   "session joined as '" + *session.player_id + "', not '" +
                                                       msg.player_id + "'"));
  }

  auto send = session.send;
  return loop->call([loop, msg, send](runtime::Room& room) {
                ServerMessage m;
                try {
                  switch (msg.type) {
                    case ClientType::snapshot_request:
                      m = ServerMessage::snapshot(loop->snapshot(room));
                      break;
                    case ClientType::whisper: {
                      if (!msg.whisper) throw Error(Errc::validation, "whisper message without payload");
                      whisper::Whisper w{msg.player_id, msg.whisper->agent_id, msg.whisper->target_id,
                                         msg.whisper->text, room.now()};
                      m = ServerMessage::ack(msg.room_id, msg.type, room.submit_whisper(std::move(w)));
                      break;
                    }
                    case ClientType::trigger: {
                      if (!msg.trigger) throw Error(Errc::validation, "trigger message without payload");
                      runtime::Trigger t{msg.player_id, msg.trigger->agent_id, msg.trigger->bundle_id,
                                         msg.trigger->target_id};
                      m = ServerMessage::ack(msg.room_id, msg.type, room.submit_trigger(std::move(t)));
                      break;
                    }
                    case ClientType::join:
                      break;
                  }
                } catch (const Error& e) {
                  m = ServerMessage::error(msg.room_id, std::string(to_string(e.code())), e.what());
                }
                if (send) send(m);
                return m;
              })
      .get();
}

ServerMessage Gateway::handle_text(Session& session, std::string_view text) {
  ClientMessage msg;
  try {
    msg = decode_client_message(text);
  } catch (const Error& e) {
    return reply_now(session, ServerMessage::error(session.room_id.value_or(""), "bad_message", e.what()));
  }
  return handle_client_message(session, msg);
}

void Gateway::close_session(Session& session) {
  if (session.room_id) {
    if (auto* loop = room(*session.room_id)) {
      const auto id = session.id;
      try {
        loop->call([loop, id](runtime::Room&) { loop->remove_subscriber(id); }).get();
      } catch (const Error&) {
        // room already stopped
      }
    }
  }
  session.room_id.reset();
  session.player_id.reset();
}

}  // namespace bounded::gateway
