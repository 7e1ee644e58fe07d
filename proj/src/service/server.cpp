#include "imhotep/service/server.hpp"

#include "imhotep/core/error.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <condition_variable>
#include <deque>
#include <list>
#include <mutex>
#include <thread>

namespace imhotep {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

struct Outgoing {
  bool binary = false;
  std::string text;
  std::vector<std::uint8_t> bytes;
};

/// One client: a thread running its own io_context, which is also the
/// session's coordination context.
class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(std::shared_ptr<TaskExecutor> executor, SessionConfig config,
             std::shared_ptr<const PatientBundle> patient)
      : executor_(std::move(executor)),
        config_(std::move(config)),
        patient_(std::move(patient)),
        work_(net::make_work_guard(ioc_)) {}

  net::io_context& context() { return ioc_; }

  void start(tcp::socket socket) {
    thread_ = std::thread([self = shared_from_this(), s = std::move(socket)]() mutable {
      self->run(std::move(s));
    });
  }

  void stop() {
    net::post(ioc_, [self = shared_from_this()] { self->shutdown(); });
  }

  void join() {
    if (thread_.joinable()) thread_.join();
  }

  bool finished() const { return finished_.load(); }

 private:
  void run(tcp::socket socket) {
    ws_.emplace(std::move(socket));
    std::weak_ptr<Connection> weak = weak_from_this();
    session_ = std::make_unique<Session>(executor_, config_, [weak, &ioc = ioc_] {
      if (auto self = weak.lock()) net::post(ioc, [self] { self->flush_session(); });
    });
    ws_->set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_->async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->shutdown();
      if (self->patient_) {
        try {
          self->session_->install_patient(*self->patient_);
        } catch (const Error&) {
        }
        self->flush_session();
      }
      self->read();
    });
    ioc_.run();
    session_.reset();
    ws_.reset();
    finished_.store(true);
  }

  void read() {
    ws_->async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->shutdown();
      std::vector<Reply> replies;
      if (self->ws_->got_text()) {
        const std::string text = beast::buffers_to_string(self->buffer_.data());
        replies = self->session_->handle_text(text);
      } else {
        replies.emplace_back(make_reply(std::nullopt, "error",
                                        {{"code", "BadPayload"},
                                         {"message", "commands must be sent as text frames"}}));
      }
      self->buffer_.consume(self->buffer_.size());
      self->enqueue(std::move(replies));
      self->enqueue(self->session_->poll());
      self->read();
    });
  }

  void flush_session() {
    if (session_ && !closing_) enqueue(session_->poll());
  }

  void enqueue(std::vector<Reply> replies) {
    for (auto& r : replies) {
      Outgoing out;
      if (auto* text = std::get_if<std::string>(&r)) {
        out.text = std::move(*text);
      } else {
        out.binary = true;
        out.bytes = std::get<FramePacket>(r).serialize();
      }
      queue_.push_back(std::move(out));
    }
    if (!writing_) write_next();
  }

  void write_next() {
    if (queue_.empty() || closing_) {
      writing_ = false;
      return;
    }
    writing_ = true;
    const Outgoing& front = queue_.front();
    ws_->binary(front.binary);
    auto handler = [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->shutdown();
      self->queue_.pop_front();
      self->write_next();
    };
    if (front.binary) {
      ws_->async_write(net::buffer(front.bytes), std::move(handler));
    } else {
      ws_->async_write(net::buffer(front.text), std::move(handler));
    }
  }

  void shutdown() {
    if (closing_) return;
    closing_ = true;
    // Tearing the session down cancels its queued loads and renders; any
    // completion still in flight finds the bus gone and is dropped.
    if (session_) session_->close();
    if (ws_) {
      beast::error_code ignored;
      beast::get_lowest_layer(*ws_).socket().close(ignored);
    }
    work_.reset();
    ioc_.stop();
  }

  std::shared_ptr<TaskExecutor> executor_;
  SessionConfig config_;
  std::shared_ptr<const PatientBundle> patient_;
  net::io_context ioc_;
  net::executor_work_guard<net::io_context::executor_type> work_;
  std::optional<websocket::stream<beast::tcp_stream>> ws_;
  std::unique_ptr<Session> session_;
  beast::flat_buffer buffer_;
  std::deque<Outgoing> queue_;
  bool writing_ = false;
  bool closing_ = false;
  std::atomic<bool> finished_{false};
  std::thread thread_;
};

}  // namespace

struct Server::Impl {
  ServerConfig config;
  std::shared_ptr<TaskExecutor> executor;
  std::shared_ptr<const PatientBundle> patient;
  net::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::thread accept_thread;
  std::uint16_t bound_port = 0;

  mutable std::mutex mutex;
  std::condition_variable stopped_cv;
  std::list<std::shared_ptr<Connection>> connections;
  bool started = false;
  bool stopped = false;

  void accept() {
    auto conn = std::make_shared<Connection>(executor, config.session, patient);
    acceptor->async_accept(conn->context(), [this, conn](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      {
        std::lock_guard lock(mutex);
        reap();
        connections.push_back(conn);
      }
      conn->start(std::move(socket));
      accept();
    });
  }

  void reap() {
    for (auto it = connections.begin(); it != connections.end();) {
      if ((*it)->finished()) {
        (*it)->join();
        it = connections.erase(it);
      } else {
        ++it;
      }
    }
  }
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
}

Server::~Server() { stop(); }

void Server::start() {
  Impl& s = *impl_;
  if (s.started) return;
  if (s.config.patient) {
    std::vector<std::string> slots;
    for (const auto& slot : default_room_layout().screen.slots) slots.push_back(slot.id);
    s.patient = std::make_shared<const PatientBundle>(load_patient_directory(*s.config.patient, slots));
  }
  s.executor = std::make_shared<TaskExecutor>(s.config.workers);

  try {
    const tcp::endpoint endpoint(net::ip::make_address(s.config.address), s.config.port);
    s.acceptor.emplace(s.ioc);
    s.acceptor->open(endpoint.protocol());
    s.acceptor->set_option(net::socket_base::reuse_address(true));
    s.acceptor->bind(endpoint);
    s.acceptor->listen();
    s.bound_port = s.acceptor->local_endpoint().port();
  } catch (const boost::system::system_error& e) {
    s.acceptor.reset();
    fail(ErrorCode::BindFailure, "cannot listen on " + s.config.address + ":" +
                                     std::to_string(s.config.port) + ": " + e.what());
  }
  s.started = true;
  s.accept();
  s.accept_thread = std::thread([&s] { s.ioc.run(); });
}

std::uint16_t Server::port() const { return impl_->bound_port; }

void Server::wait() {
  std::unique_lock lock(impl_->mutex);
  impl_->stopped_cv.wait(lock, [this] { return impl_->stopped; });
}

void Server::stop() {
  Impl& s = *impl_;
  std::list<std::shared_ptr<Connection>> conns;
  {
    std::lock_guard lock(s.mutex);
    if (!s.started || s.stopped) return;
    s.stopped = true;
  }
  net::post(s.ioc, [&s] {
    beast::error_code ignored;
    s.acceptor->close(ignored);
  });
  if (s.accept_thread.joinable()) s.accept_thread.join();
  {
    std::lock_guard lock(s.mutex);
    conns.swap(s.connections);
  }
  for (auto& c : conns) c->stop();
  for (auto& c : conns) c->join();
  s.executor->shutdown();
  s.stopped_cv.notify_all();
}

std::size_t Server::connection_count() const {
  std::lock_guard lock(impl_->mutex);
  impl_->reap();
  return impl_->connections.size();
}

}  // namespace imhotep
