#include "topicpages/bridge.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <map>
#include <regex>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace topicpages {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

namespace wire {

std::string hello() { return "{\"hello\":1}\n"; }

std::string encode_request(const ScoreRequest& request) {
  nlohmann::ordered_json j;
  j["id"] = request.request_id;
  j["concept"] = request.concept_text;
  j["sentence"] = request.sentence;
  return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

namespace {

json parse_line(std::string_view line, std::string_view what) {
  try {
    return json::parse(line);
  } catch (const json::parse_error&) {
    throw ProtocolError("malformed " + std::string(what) + " line: " + std::string(line.substr(0, 200)));
  }
}

}  // namespace

std::string decode_ready(std::string_view line) {
  const auto j = parse_line(line, "handshake");
  if (!j.is_object() || j.size() != 2 || !j.contains("ready") || !j.contains("model") || !j["ready"].is_boolean() ||
      !j["model"].is_string()) {
    throw ProtocolError("handshake reply must be {\"ready\": true, \"model\": str}, got " + std::string(line));
  }
  if (!j["ready"].get<bool>()) throw ProtocolError("scorer reported not ready");
  return j["model"].get<std::string>();
}

ScoreResponse decode_response(std::string_view line) {
  const auto j = parse_line(line, "response");
  if (!j.is_object()) throw ProtocolError("response is not an object: " + std::string(line));
  for (const auto& [key, value] : j.items()) {
    if (key != "id" && key != "score") throw ProtocolError("unknown field '" + key + "' in response");
  }
  if (!j.contains("id") || !j["id"].is_number_integer()) throw ProtocolError("response lacks an integer id");
  if (!j.contains("score") || !j["score"].is_number()) throw ProtocolError("response lacks a numeric score");
  ScoreResponse r{j["id"].get<std::int64_t>(), j["score"].get<double>()};
  if (!(r.score >= 0.0 && r.score <= 1.0)) {
    throw ProtocolError("score " + j["score"].dump() + " for id " + std::to_string(r.request_id) +
                        " is outside [0, 1]");
  }
  return r;
}

}  // namespace wire

Endpoint Endpoint::parse(std::string_view text) {
  static const std::regex tcp_re(R"(^(?:tcp://)?([A-Za-z0-9.\-]+|\[[0-9A-Fa-f:]+\]):([0-9]{1,5})$)");
  const std::string s(text);
  std::smatch m;
  Endpoint e;
  if (std::regex_match(s, m, tcp_re)) {
    const auto port = std::stoul(m[2].str());
    if (port == 0 || port > 65535) throw UsageError("invalid port in endpoint '" + s + "'");
    e.kind = Kind::tcp;
    e.host = m[1].str();
    if (e.host.size() > 2 && e.host.front() == '[') e.host = e.host.substr(1, e.host.size() - 2);
    e.port = static_cast<std::uint16_t>(port);
    return e;
  }
  if (s.find_first_not_of(" \t") == std::string::npos) throw UsageError("empty scorer endpoint");
  e.command = s;
  return e;
}

std::string Endpoint::to_string() const {
  return kind == Kind::tcp ? host + ":" + std::to_string(port) : command;
}

// ---------------------------------------------------------------------------

class BridgeClient::Transport {
 public:
  virtual ~Transport() { shutdown(); }

  int read_fd() const noexcept { return read_fd_; }
  bool open() const noexcept { return read_fd_ >= 0; }

  // Writes `out` while feeding complete lines to `on_line` until it returns
  // true. Throws ProtocolError on EOF or I/O failure; false on deadline.
  template <class OnLine>
  bool exchange(std::string out, Clock::time_point deadline, OnLine&& on_line) {
    std::size_t written = 0;
    while (true) {
      while (true) {
        const auto nl = inbox_.find('\n');
        if (nl == std::string::npos) break;
        std::string line = inbox_.substr(0, nl);
        inbox_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (on_line(line)) {
          if (written == out.size()) return true;
        }
      }
      const auto now = Clock::now();
      if (now >= deadline) return false;
      const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();

      pollfd fds[2];
      nfds_t n = 0;
      fds[n++] = {read_fd_, POLLIN, 0};
      const bool want_write = written < out.size();
      if (want_write) fds[n++] = {write_fd_, POLLOUT, 0};
      const int rc = ::poll(fds, n, static_cast<int>(std::min<long long>(wait + 1, 1000)));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
      }
      if (want_write && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP)) != 0) {
        const ssize_t w = write_some(out.data() + written, out.size() - written);
        if (w < 0) {
          if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
            throw ProtocolError(std::string("write to scorer failed: ") + std::strerror(errno));
          }
        } else {
          written += static_cast<std::size_t>(w);
        }
      }
      if ((fds[0].revents & (POLLIN | POLLERR | POLLHUP)) != 0) {
        char buf[65536];
        const ssize_t r = ::read(read_fd_, buf, sizeof buf);
        if (r == 0) throw ProtocolError("scorer closed the connection");
        if (r < 0) {
          if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
            throw ProtocolError(std::string("read from scorer failed: ") + std::strerror(errno));
          }
        } else {
          inbox_.append(buf, static_cast<std::size_t>(r));
        }
      }
    }
  }

  virtual void shutdown() {
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    read_fd_ = write_fd_ = -1;
    inbox_.clear();
  }

 protected:
  virtual ssize_t write_some(const char* data, std::size_t size) { return ::write(write_fd_, data, size); }

  int read_fd_ = -1;
  int write_fd_ = -1;
  std::string inbox_;
};

namespace {

void set_nonblocking(int fd) {
  const int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace

class SubprocessTransport final : public BridgeClient::Transport {
 public:
  explicit SubprocessTransport(const std::string& command) {
    ::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw ProtocolError(std::string("pipe: ") + std::strerror(errno));
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ProtocolError(std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw ProtocolError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::signal(SIGPIPE, SIG_DFL);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    set_nonblocking(write_fd_);
    set_nonblocking(read_fd_);
  }

  ~SubprocessTransport() override { shutdown(); }

  void shutdown() override {
    Transport::shutdown();
    if (pid_ <= 0) return;
    // Closing stdin asks the server to exit; escalate if it lingers.
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGTERM);
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }

 private:
  pid_t pid_ = -1;
};

class TcpTransport final : public BridgeClient::Transport {
 public:
  TcpTransport(const std::string& host, std::uint16_t port, Clock::time_point deadline) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const auto service = std::to_string(port);
    const int gai = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res);
    if (gai != 0) throw ProtocolError("cannot resolve " + host + ": " + ::gai_strerror(gai));
    std::string last_error = "no addresses";
    for (auto* ai = res; ai != nullptr && read_fd_ < 0; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC | SOCK_NONBLOCK, ai->ai_protocol);
      if (fd < 0) {
        last_error = std::strerror(errno);
        continue;
      }
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) != 0 && errno != EINPROGRESS) {
        last_error = std::strerror(errno);
        ::close(fd);
        continue;
      }
      pollfd p{fd, POLLOUT, 0};
      const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      const int rc = ::poll(&p, 1, static_cast<int>(std::max<long long>(wait, 0)));
      int err = 0;
      socklen_t len = sizeof err;
      if (rc <= 0) {
        last_error = "connect timed out";
      } else if (::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len) != 0 || err != 0) {
        last_error = std::strerror(err != 0 ? err : errno);
      } else {
        read_fd_ = write_fd_ = fd;
        continue;
      }
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (read_fd_ < 0) throw ProtocolError("cannot connect to " + host + ":" + service + ": " + last_error);
  }

 protected:
  ssize_t write_some(const char* data, std::size_t size) override {
    return ::send(write_fd_, data, size, MSG_NOSIGNAL);
  }
};

// ---------------------------------------------------------------------------

BridgeClient::BridgeClient(std::unique_ptr<Transport> transport, BridgeOptions options)
    : transport_(std::move(transport)), options_(options) {}

BridgeClient::~BridgeClient() { close(); }

bool BridgeClient::is_open() const noexcept { return transport_ != nullptr && transport_->open(); }

void BridgeClient::close() {
  if (transport_) transport_->shutdown();
  transport_.reset();
}

std::unique_ptr<BridgeClient> BridgeClient::connect(const Endpoint& endpoint, const BridgeOptions& options) {
  const auto deadline = Clock::now() + options.handshake_timeout;
  std::unique_ptr<Transport> transport;
  if (endpoint.kind == Endpoint::Kind::tcp) {
    transport = std::make_unique<TcpTransport>(endpoint.host, endpoint.port, deadline);
  } else {
    transport = std::make_unique<SubprocessTransport>(endpoint.command);
  }
  std::unique_ptr<BridgeClient> client(new BridgeClient(std::move(transport), options));
  std::optional<std::string> model;
  try {
    const bool done = client->transport_->exchange(wire::hello(), deadline, [&](const std::string& line) {
      model = wire::decode_ready(line);
      return true;
    });
    if (!done) {
      throw ProtocolError("handshake with '" + endpoint.to_string() + "' timed out after " +
                          std::to_string(options.handshake_timeout.count()) + " ms");
    }
  } catch (...) {
    client->close();
    throw;
  }
  client->model_ = *model;
  spdlog::debug("bridge connected to {} (model {})", endpoint.to_string(), client->model_);
  return client;
}

std::vector<ScoreResponse> BridgeClient::score_batch(std::span<const ScoreRequest> requests) {
  if (requests.empty()) return {};
  if (!is_open()) throw ProtocolError("bridge connection is closed");

  std::map<std::int64_t, std::size_t> pending;
  std::string out;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& r = requests[i];
    if (r.concept_text.empty() || r.sentence.empty()) throw UsageError("score request with empty field");
    if (issued_.count(r.request_id) != 0 || !pending.emplace(r.request_id, i).second) {
      throw UsageError("request id " + std::to_string(r.request_id) + " already used on this connection");
    }
    out += wire::encode_request(r);
  }
  for (const auto& [id, index] : pending) issued_.insert(id);

  std::vector<std::optional<double>> scores(requests.size());
  std::size_t received = 0;
  try {
    const bool done = transport_->exchange(std::move(out), Clock::now() + options_.batch_timeout,
                                           [&](const std::string& line) {
                                             const auto response = wire::decode_response(line);
                                             const auto it = pending.find(response.request_id);
                                             if (it == pending.end()) {
                                               throw ProtocolError("response for unknown request id " +
                                                                   std::to_string(response.request_id));
                                             }
                                             auto& slot = scores[it->second];
                                             if (slot) {
                                               throw ProtocolError("duplicate response for request id " +
                                                                   std::to_string(response.request_id));
                                             }
                                             slot = response.score;
                                             return ++received == requests.size();
                                           });
    if (!done) {
      std::vector<std::int64_t> missing;
      std::string listed;
      for (std::size_t i = 0; i < requests.size(); ++i) {
        if (scores[i]) continue;
        missing.push_back(requests[i].request_id);
        if (missing.size() <= 20) listed += (listed.empty() ? "" : ", ") + std::to_string(requests[i].request_id);
      }
      if (missing.size() > 20) listed += ", ...";
      throw BridgeTimeout("scorer timed out after " + std::to_string(options_.batch_timeout.count()) + " ms; " +
                              std::to_string(missing.size()) + " response(s) missing (ids " + listed + ")",
                          std::move(missing));
    }
  } catch (const Error&) {
    close();
    throw;
  }

  std::vector<ScoreResponse> result;
  result.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) result.push_back({requests[i].request_id, *scores[i]});
  return result;
}

BridgeScorer::BridgeScorer(std::unique_ptr<BridgeClient> client) : client_(std::move(client)) {}

std::string BridgeScorer::name() const { return "bridge:" + client_->model(); }

std::vector<double> BridgeScorer::score_batch(std::span<const ScoreQuery> queries) {
  std::vector<ScoreRequest> requests;
  requests.reserve(queries.size());
  for (const auto& q : queries) requests.push_back({next_id_++, q.term, q.sentence});
  const auto responses = client_->score_batch(requests);
  std::vector<double> out;
  out.reserve(responses.size());
  for (const auto& r : responses) out.push_back(r.score);
  return out;
}

}  // namespace topicpages
