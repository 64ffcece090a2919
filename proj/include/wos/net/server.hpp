// Copyright 2026 The Wildlife Observation Rover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file server.hpp
 * @brief TCP, WebSocket and HTTP endpoints built on Boost.Beast.
 *
 * Raw TCP carries wire frames back to back. The WebSocket port carries one
 * wire frame per binary message and also answers plain HTTP:
 *
 *   GET /                  operator console assets (console_dir)
 *   GET /sessions          newline-separated session log names
 *   GET /sessions/<name>   raw session log bytes
 *
 * All sockets live on one io_context thread; the simulation thread only
 * touches them through Hub, which posts onto that thread.
 */
#pragma once

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "wos/net/hub.hpp"
#include "wos/protocol.hpp"
#include "wos/session_log.hpp"

namespace wos::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

/// Parses "host:port". An empty host binds all interfaces.
inline tcp::endpoint parse_endpoint(std::string_view hostport) {
  const auto colon = hostport.rfind(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("expected host:port, got '" + std::string(hostport) + "'");
  }
  std::string host(hostport.substr(0, colon));
  const std::string port_str(hostport.substr(colon + 1));
  unsigned long port = 0;
  try {
    std::size_t used = 0;
    port = std::stoul(port_str, &used);
    if (used != port_str.size() || port > 65535) throw std::out_of_range("port");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad port in '" + std::string(hostport) + "'");
  }
  if (host.empty() || host == "*") host = "0.0.0.0";
  if (host == "localhost") host = "127.0.0.1";
  return {asio::ip::make_address(host), static_cast<unsigned short>(port)};
}

struct HttpRoot {
  std::optional<std::string> record_dir;
  std::string console_dir;
};

namespace detail {

inline bool safe_name(std::string_view name) {
  return !name.empty() && name.find('/') == std::string_view::npos &&
         name.find('\\') == std::string_view::npos && name != "." && name != "..";
}

inline std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  return "application/octet-stream";
}

inline std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline constexpr std::string_view kPlaceholderConsole =
    "<!doctype html><html><head><title>Rover console</title></head><body>"
    "<h1>Rover console</h1><p>Console assets are not installed. Set "
    "<code>console_dir</code> in the service configuration.</p>"
    "<p>Recorded sessions: <a href=\"/sessions\">/sessions</a></p></body></html>";

}  // namespace detail

/// Answers one non-upgrade HTTP request.
inline http::response<http::string_body> handle_http(const http::request<http::string_body>& req,
                                                     const HttpRoot& root) {
  auto reply = [&](http::status st, std::string body, std::string_view type) {
    http::response<http::string_body> res{st, req.version()};
    res.set(http::field::server, "wos-rover");
    res.set(http::field::content_type, std::string(type));
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  };
  if (req.method() != http::verb::get) {
    return reply(http::status::method_not_allowed, "GET only\n", "text/plain");
  }
  std::string target(req.target());
  if (auto q = target.find('?'); q != std::string::npos) target.resize(q);

  if (target == "/sessions" || target == "/sessions/") {
    std::vector<std::string> names;
    std::error_code ec;
    if (root.record_dir) {
      for (const auto& e : std::filesystem::directory_iterator(*root.record_dir, ec)) {
        if (e.is_regular_file() && e.path().extension() == kSessionExtension) {
          names.push_back(e.path().filename().string());
        }
      }
    }
    std::sort(names.begin(), names.end());
    std::string body;
    for (const auto& n : names) body += n + "\n";
    return reply(http::status::ok, std::move(body), "text/plain");
  }

  constexpr std::string_view kSessionsPrefix = "/sessions/";
  if (target.starts_with(kSessionsPrefix)) {
    const std::string name = target.substr(kSessionsPrefix.size());
    if (root.record_dir && detail::safe_name(name)) {
      if (auto body = detail::read_file(std::filesystem::path(*root.record_dir) / name)) {
        return reply(http::status::ok, std::move(*body), "application/octet-stream");
      }
    }
    return reply(http::status::not_found, "no such session\n", "text/plain");
  }

  std::string asset = target == "/" ? "index.html" : target.substr(1);
  if (!root.console_dir.empty() && detail::safe_name(asset)) {
    const auto path = std::filesystem::path(root.console_dir) / asset;
    if (auto body = detail::read_file(path)) {
      return reply(http::status::ok, std::move(*body), detail::mime_type(path));
    }
  }
  if (asset == "index.html") {
    return reply(http::status::ok, std::string(detail::kPlaceholderConsole),
                 "text/html; charset=utf-8");
  }
  return reply(http::status::not_found, "not found\n", "text/plain");
}

/// Raw TCP console: wire frames back to back in both directions.
class TcpSession : public Connection, public std::enable_shared_from_this<TcpSession> {
 public:
  TcpSession(tcp::socket socket, Hub& hub, std::size_t queue_limit)
      : socket_(std::move(socket)), hub_(hub), queue_(queue_limit) {}

  void start() {
    id_ = hub_.attach(weak_from_this());
    read();
  }

  void deliver(const Outgoing& item) override {
    asio::post(socket_.get_executor(), [self = shared_from_this(), item] {
      if (self->closed_) return;
      self->queue_.push(item);
      self->write_next();
    });
  }

 private:
  void read() {
    socket_.async_read_some(
        asio::buffer(buf_), [self = shared_from_this()](beast::error_code ec, std::size_t n) {
          if (ec) return self->close();
          self->decoder_.feed(std::span<const std::uint8_t>(self->buf_.data(), n));
          for (;;) {
            auto res = self->decoder_.next();
            if (auto* d = std::get_if<proto::Decoded>(&res)) {
              self->hub_.submit(self->id_, d->message);
            } else if (std::holds_alternative<proto::DecodeError>(res)) {
              return self->close();
            } else {
              break;
            }
          }
          self->read();
        });
  }

  void write_next() {
    if (writing_ || queue_.empty() || closed_) return;
    writing_ = true;
    current_ = queue_.front().bytes;
    queue_.pop();
    asio::async_write(socket_, asio::buffer(*current_),
                      [self = shared_from_this()](beast::error_code ec, std::size_t) {
                        self->writing_ = false;
                        if (ec) return self->close();
                        self->write_next();
                      });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    beast::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
    hub_.detach(id_);
  }

  tcp::socket socket_;
  Hub& hub_;
  Hub::ConnectionId id_ = 0;
  OutboundQueue queue_;
  proto::StreamDecoder decoder_;
  std::array<std::uint8_t, 4096> buf_{};
  std::shared_ptr<const std::vector<std::uint8_t>> current_;
  bool writing_ = false;
  bool closed_ = false;
};

/// WebSocket console: exactly one wire frame per binary message.
class WsSession : public Connection, public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Hub& hub, std::size_t queue_limit)
      : ws_(std::move(socket)), hub_(hub), queue_(queue_limit) {}

  void start(http::request<http::string_body> req) {
    ws_.binary(true);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->id_ = self->hub_.attach(self->weak_from_this());
      self->attached_ = true;
      self->read();
    });
  }

  void deliver(const Outgoing& item) override {
    asio::post(ws_.get_executor(), [self = shared_from_this(), item] {
      if (self->closed_) return;
      self->queue_.push(item);
      self->write_next();
    });
  }

 private:
  void read() {
    ws_.async_read(buf_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      const auto data = self->buf_.cdata();
      std::span<const std::uint8_t> bytes(static_cast<const std::uint8_t*>(data.data()),
                                          data.size());
      auto res = proto::decode(bytes);
      auto* d = std::get_if<proto::Decoded>(&res);
      if (!d || d->consumed != bytes.size()) return self->close();
      self->hub_.submit(self->id_, d->message);
      self->buf_.consume(self->buf_.size());
      self->read();
    });
  }

  void write_next() {
    if (writing_ || queue_.empty() || closed_) return;
    writing_ = true;
    current_ = queue_.front().bytes;
    queue_.pop();
    ws_.async_write(asio::buffer(*current_),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->writing_ = false;
                      if (ec) return self->close();
                      self->write_next();
                    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().close(ignored);
    if (attached_) hub_.detach(id_);
  }

  websocket::stream<beast::tcp_stream> ws_;
  Hub& hub_;
  Hub::ConnectionId id_ = 0;
  bool attached_ = false;
  OutboundQueue queue_;
  beast::flat_buffer buf_;
  std::shared_ptr<const std::vector<std::uint8_t>> current_;
  bool writing_ = false;
  bool closed_ = false;
};

/// Plain HTTP on the WebSocket port, handing upgrades to WsSession.
class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Hub& hub, std::size_t queue_limit, const HttpRoot& root)
      : stream_(std::move(socket)), hub_(hub), queue_limit_(queue_limit), root_(root) {}

  void start() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buf_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return self->close();
                       self->handle();
                     });
  }

  void handle() {
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      auto ws = std::make_shared<WsSession>(stream_.release_socket(), hub_, queue_limit_);
      ws->start(std::move(req_));
      return;
    }
    res_ = std::make_shared<http::response<http::string_body>>(handle_http(req_, root_));
    http::async_write(stream_, *res_,
                      [self = shared_from_this()](beast::error_code ec, std::size_t) {
                        if (ec || !self->res_->keep_alive()) return self->close();
                        self->read();
                      });
  }

  void close() {
    beast::error_code ignored;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
  }

  beast::tcp_stream stream_;
  Hub& hub_;
  std::size_t queue_limit_;
  const HttpRoot& root_;
  beast::flat_buffer buf_;
  http::request<http::string_body> req_;
  std::shared_ptr<http::response<http::string_body>> res_;
};

class Listener : public std::enable_shared_from_this<Listener> {
 public:
  using Handler = std::function<void(tcp::socket)>;

  Listener(asio::io_context& ioc, const tcp::endpoint& ep, Handler on_accept)
      : ioc_(ioc), acceptor_(ioc), on_accept_(std::move(on_accept)) {
    acceptor_.open(ep.protocol());
    acceptor_.set_option(asio::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen(asio::socket_base::max_listen_connections);
  }

  void start() { accept(); }
  void stop() {
    beast::error_code ignored;
    acceptor_.close(ignored);
  }
  tcp::endpoint local_endpoint() const { return acceptor_.local_endpoint(); }

 private:
  void accept() {
    acceptor_.async_accept(asio::make_strand(ioc_),
                           [self = shared_from_this()](beast::error_code ec, tcp::socket s) {
                             if (ec == asio::error::operation_aborted) return;
                             if (!ec) self->on_accept_(std::move(s));
                             self->accept();
                           });
  }

  asio::io_context& ioc_;
  tcp::acceptor acceptor_;
  Handler on_accept_;
};

/**
 * Owns the io_context thread and the listeners. Either endpoint may be
 * omitted. Binding failures throw from the constructor so startup fails
 * fast.
 */
class NetworkServer {
 public:
  NetworkServer(Hub& hub, std::optional<tcp::endpoint> tcp_ep, std::optional<tcp::endpoint> ws_ep,
                HttpRoot root, std::size_t queue_limit = 64)
      : hub_(hub), root_(std::move(root)), queue_limit_(queue_limit) {
    if (tcp_ep) {
      tcp_ = std::make_shared<Listener>(ioc_, *tcp_ep, [this](tcp::socket s) {
        std::make_shared<TcpSession>(std::move(s), hub_, queue_limit_)->start();
      });
    }
    if (ws_ep) {
      ws_ = std::make_shared<Listener>(ioc_, *ws_ep, [this](tcp::socket s) {
        std::make_shared<HttpSession>(std::move(s), hub_, queue_limit_, root_)->start();
      });
    }
  }

  ~NetworkServer() { stop(); }

  NetworkServer(const NetworkServer&) = delete;
  NetworkServer& operator=(const NetworkServer&) = delete;

  void start() {
    if (tcp_) tcp_->start();
    if (ws_) ws_->start();
    thread_ = std::thread([this] { ioc_.run(); });
  }

  void stop() {
    if (!thread_.joinable()) return;
    asio::post(ioc_, [this] {
      if (tcp_) tcp_->stop();
      if (ws_) ws_->stop();
    });
    ioc_.stop();
    thread_.join();
  }

  std::optional<unsigned short> tcp_port() const {
    return tcp_ ? std::optional(tcp_->local_endpoint().port()) : std::nullopt;
  }
  std::optional<unsigned short> ws_port() const {
    return ws_ ? std::optional(ws_->local_endpoint().port()) : std::nullopt;
  }

 private:
  Hub& hub_;
  HttpRoot root_;
  std::size_t queue_limit_;
  asio::io_context ioc_{1};
  std::shared_ptr<Listener> tcp_;
  std::shared_ptr<Listener> ws_;
  std::thread thread_;
};

}  // namespace wos::net
