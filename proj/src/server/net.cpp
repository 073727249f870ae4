#include "colier/server/net.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <iostream>
#include <map>

#include "colier/protocol/codec.hpp"
#include "colier/raster/png_io.hpp"
#include "colier/raster/render.hpp"

namespace colier::server {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace asio = boost::asio;
namespace fs = std::filesystem;
using tcp = asio::ip::tcp;
using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

namespace {

constexpr std::size_t kMaxUpload = 32u << 20;
constexpr std::size_t kMaxWsMessage = 4u << 20;  // oversize frames reach the codec and get rejected there

std::string_view mime_type(const fs::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  return "application/octet-stream";
}

bool safe_name(std::string_view name) {
  if (name.empty() || name.size() > 128 || name.front() == '.') return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') return false;
  }
  return name.find("..") == std::string_view::npos;
}

std::string_view sv(beast::string_view s) { return {s.data(), s.size()}; }

std::vector<std::string_view> split_path(std::string_view target) {
  if (auto q = target.find('?'); q != std::string_view::npos) target = target.substr(0, q);
  std::vector<std::string_view> parts;
  while (!target.empty()) {
    if (target.front() == '/') {
      target.remove_prefix(1);
      continue;
    }
    const auto slash = target.find('/');
    parts.push_back(target.substr(0, slash));
    target = slash == std::string_view::npos ? std::string_view{} : target.substr(slash);
  }
  return parts;
}

}  // namespace

class WsSession;

struct NetServer::Impl {
  Impl(Server& c, NetOptions o) : core(c), options(std::move(o)) {}

  Server& core;
  NetOptions options;
  std::map<ConnId, std::weak_ptr<WsSession>> sockets;
  ConnId nextConn = 1;
  asio::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  std::optional<asio::signal_set> signals;

  void accept();
  ConnId attach(const std::shared_ptr<WsSession>& s);
  void receive(ConnId conn, const std::string& text);
  void detach(ConnId conn);
  void dispatch(Outbox& out);
  Response handle_http(const Request& req);
  void shutdown_io();
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, NetServer::Impl* impl) : ws_(std::move(socket)), impl_(impl) {}

  void accept(const Request& req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(kMaxWsMessage);
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void send(std::string text) {
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write_next();
  }

  void close() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    id_ = impl_->attach(shared_from_this());
    read();
  }

  void read() { ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      impl_->detach(id_);
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    impl_->receive(id_, text);
    read();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      queue_.clear();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) write_next();
  }

  websocket::stream<beast::tcp_stream> ws_;
  NetServer::Impl* impl_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  ConnId id_ = 0;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, NetServer::Impl* impl) : stream_(std::move(socket)), impl_(impl) {}

  void read() {
    parser_.emplace();
    parser_->body_limit(kMaxUpload);
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

 private:
  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    Request req = parser_->release();
    if (websocket::is_upgrade(req) && split_path(sv(req.target())) == std::vector<std::string_view>{"ws"}) {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), impl_)->accept(req);
      return;
    }
    auto res = std::make_shared<Response>(impl_->handle_http(req));
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (res->need_eof()) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->read();
    });
  }

  beast::tcp_stream stream_;
  NetServer::Impl* impl_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
};

void NetServer::Impl::accept() {
  acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      if (ec == asio::error::operation_aborted) return;
    } else {
      std::make_shared<HttpSession>(std::move(socket), this)->read();
    }
    accept();
  });
}

ConnId NetServer::Impl::attach(const std::shared_ptr<WsSession>& s) {
  const ConnId id = nextConn++;
  sockets[id] = s;
  Outbox out;
  core.connect(id, out);
  dispatch(out);
  return id;
}

void NetServer::Impl::receive(ConnId conn, const std::string& text) {
  Outbox out;
  try {
    core.receive(conn, text, out);
  } catch (const std::exception& e) {
    std::cerr << "colier: error handling frame from connection " << conn << ": " << e.what() << "\n";
  }
  dispatch(out);
}

void NetServer::Impl::detach(ConnId conn) {
  if (!sockets.erase(conn)) return;
  Outbox out;
  core.disconnect(conn, out);
  dispatch(out);
}

void NetServer::Impl::dispatch(Outbox& out) {
  for (auto& d : out) {
    auto it = sockets.find(d.conn);
    if (it == sockets.end()) continue;
    if (auto s = it->second.lock()) s->send(proto::encode_message(d.message));
  }
}

Response NetServer::Impl::handle_http(const Request& req) {
  auto reply = [&](http::status status, std::string body, std::string_view type = "text/plain; charset=utf-8") {
    Response res{status, req.version()};
    res.set(http::field::server, "colier");
    res.set(http::field::content_type, beast::string_view(type.data(), type.size()));
    res.keep_alive(req.keep_alive());
    if (req.method() != http::verb::head) res.body() = std::move(body);
    res.prepare_payload();
    return res;
  };
  const auto parts = split_path(sv(req.target()));
  const bool get = req.method() == http::verb::get || req.method() == http::verb::head;

  try {
    if (!parts.empty() && parts[0] == "assets") {
      if (parts.size() != 3 || !safe_name(parts[2])) return reply(http::status::not_found, "not found\n");
      Session* s = core.find_session(parts[1]);
      if (!s || !s->storage()) return reply(http::status::not_found, "unknown session\n");
      std::string file(parts[2]);
      if (req.method() == http::verb::put) {
        if (fs::path(file).extension() != ".png") return reply(http::status::bad_request, "expected a .png name\n");
        (void)raster::decode_png(req.body());
        write_file_atomic(s->storage()->assets_dir() / file, req.body());
        return reply(http::status::created, file + "\n");
      }
      if (!get) return reply(http::status::method_not_allowed, "method not allowed\n");
      const std::string stem = fs::path(file).stem().string();
      if (const doc::Layer* layer = s->document().find_layer(stem); layer && layer->asset) file = *layer->asset;
      const fs::path path = s->storage()->assets_dir() / file;
      if (!fs::is_regular_file(path)) return reply(http::status::not_found, "no such asset\n");
      return reply(http::status::ok, read_file(path), mime_type(path));
    }
    if (!parts.empty() && parts[0] == "render" && parts.size() == 2 && get) {
      const std::string sid = fs::path(std::string(parts[1])).stem().string();
      Session* s = core.find_session(sid);
      if (!s) return reply(http::status::not_found, "unknown session\n");
      raster::DirectoryAssetStore assets(s->storage() ? s->storage()->assets_dir() : fs::path());
      return reply(http::status::ok, raster::encode_png(raster::render_document(s->document(), assets)), "image/png");
    }
    if (!get) return reply(http::status::method_not_allowed, "method not allowed\n");
    if (options.webRoot.empty()) {
      if (parts.empty()) return reply(http::status::ok, "colier server; websocket endpoint at /ws\n");
      return reply(http::status::not_found, "not found\n");
    }
    fs::path path = options.webRoot;
    for (auto p : parts) {
      if (p == ".." || p == ".") return reply(http::status::not_found, "not found\n");
      path /= std::string(p);
    }
    if (fs::is_directory(path)) path /= "index.html";
    if (!fs::is_regular_file(path)) return reply(http::status::not_found, "not found\n");
    return reply(http::status::ok, read_file(path), mime_type(path));
  } catch (const raster::MissingAsset& e) {
    return reply(http::status::conflict, std::string(e.what()) + "\n");
  } catch (const raster::IoError& e) {
    return reply(http::status::bad_request, std::string(e.what()) + "\n");
  } catch (const std::exception& e) {
    return reply(http::status::internal_server_error, std::string(e.what()) + "\n");
  }
}

void NetServer::Impl::shutdown_io() {
  beast::error_code ec;
  acceptor.close(ec);
  if (signals) signals->cancel(ec);
  for (auto& [id, weak] : sockets) {
    if (auto s = weak.lock()) s->close();
  }
  ioc.stop();
}

NetServer::NetServer(Server& core, NetOptions options) : impl_(std::make_unique<Impl>(core, std::move(options))) {
  auto& im = *impl_;
  beast::error_code ec;
  const auto address = asio::ip::make_address(im.options.address, ec);
  if (ec) throw std::runtime_error("bad listen address " + im.options.address);
  const tcp::endpoint ep{address, im.options.port};
  im.acceptor.open(ep.protocol(), ec);
  if (!ec) im.acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) im.acceptor.bind(ep, ec);
  if (!ec) im.acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw std::runtime_error("cannot listen on " + im.options.address + ":" + std::to_string(im.options.port) +
                                   ": " + ec.message());
  if (im.options.handleSignals) {
    im.signals.emplace(im.ioc, SIGINT, SIGTERM);
    im.signals->async_wait([this](beast::error_code e, int) {
      if (!e) impl_->shutdown_io();
    });
  }
  im.accept();
}

NetServer::~NetServer() = default;

unsigned short NetServer::port() const {
  beast::error_code ec;
  return impl_->acceptor.local_endpoint(ec).port();
}

void NetServer::run() {
  impl_->ioc.run();
  impl_->core.shutdown();
}

void NetServer::stop() {
  asio::post(impl_->ioc, [im = impl_.get()] { im->shutdown_io(); });
}

}  // namespace colier::server
