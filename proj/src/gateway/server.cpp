#include "bounded/gateway/server.hpp"

#include <deque>
#include <iostream>
#include <thread>

#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "bounded/core/errors.hpp"

namespace bounded::gateway {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket&& socket, Gateway& gateway) : ws_(std::move(socket)), gateway_(gateway) {}

  void start() {
    std::weak_ptr<Connection> weak = shared_from_this();
    auto ex = ws_.get_executor();
    // Room loops call this from their own threads; hop onto the I/O thread
    // before touching the outbox.
    session_ = gateway_.open_session([weak, ex](const ServerMessage& m) {
      net::post(ex, [weak, text = to_json(m).dump()]() mutable {
        if (auto self = weak.lock()) self->enqueue(std::move(text));
      });
    });
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->close();
      self->read();
    });
  }

  void close() { gateway_.close_session(session_); }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      const auto text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      try {
        self->gateway_.handle_text(self->session_, text);
      } catch (const std::exception& e) {
        self->enqueue(to_json(ServerMessage::error(self->session_.room_id.value_or(""), "internal", e.what())).dump());
      }
      self->read();
    });
  }

  void enqueue(std::string text) {
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->outbox_.clear();
        return;
      }
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  Gateway& gateway_;
  Session session_;
};

}  // namespace

struct WsServer::Impl {
  Gateway& gateway;
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  net::executor_work_guard<net::io_context::executor_type> work{ioc.get_executor()};
  std::vector<std::weak_ptr<Connection>> connections;
  std::thread thread;
  bool stopped = false;

  explicit Impl(Gateway& g) : gateway(g) {}

  void accept() {
    acceptor.async_accept(ioc, [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec != net::error::operation_aborted) std::cerr << "gateway: accept failed: " << ec.message() << "\n";
        if (!acceptor.is_open()) return;
      } else {
        auto c = std::make_shared<Connection>(std::move(socket), gateway);
        connections.push_back(c);
        c->start();
      }
      accept();
    });
  }
};

WsServer::WsServer(Gateway& gateway, const std::string& host, unsigned short port)
    : impl_(std::make_unique<Impl>(gateway)) {
  const tcp::endpoint ep{net::ip::make_address(host), port};
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen(net::socket_base::max_listen_connections);
}

WsServer::~WsServer() { stop(); }

unsigned short WsServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WsServer::start() {
  impl_->accept();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void WsServer::stop() {
  if (impl_->stopped) return;
  impl_->stopped = true;
  impl_->ioc.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  // Unsubscribe every session so no room loop posts into a dead io_context.
  for (auto& weak : impl_->connections) {
    if (auto c = weak.lock()) c->close();
  }
}

void WsServer::wait_for_shutdown() {
  net::signal_set signals(impl_->ioc, SIGINT, SIGTERM);
  signals.async_wait([this](beast::error_code, int) { impl_->ioc.stop(); });
  if (impl_->thread.joinable()) impl_->thread.join();
  signals.cancel();
}

int serve(const runtime::AppConfig& config, const std::vector<std::filesystem::path>& scenarios,
          const std::filesystem::path& trace_dir) {
  Gateway gateway;
  std::vector<std::shared_ptr<RoomLoop>> loops;
  for (const auto& path : scenarios) {
    auto state = runtime::load_scenario(path, config.room);
    std::unique_ptr<runtime::TraceSink> sink;
    if (!trace_dir.empty()) {
      std::filesystem::create_directories(trace_dir);
      sink = std::make_unique<runtime::JsonlTraceSink>(trace_dir / (state.room_id + ".jsonl"));
    }
    auto loop = std::make_shared<RoomLoop>(std::move(state), runtime::make_services(config),
                                           std::chrono::milliseconds(config.gateway.tick_ms), std::move(sink));
    gateway.add_room(loop);
    loops.push_back(std::move(loop));
  }

  WsServer server(gateway, config.gateway.host, config.gateway.port);
  server.start();
  std::cout << "listening on ws://" << config.gateway.host << ":" << server.port() << " rooms:";
  for (const auto& l : loops) std::cout << " " << l->room_id();
  std::cout << std::endl;
  server.wait_for_shutdown();
  server.stop();
  for (auto& l : loops) l->stop();
  return 0;
}

}  // namespace bounded::gateway
