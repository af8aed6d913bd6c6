#include "topicpages/mock_scorer.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "topicpages/error.hpp"

namespace topicpages {

using nlohmann::json;

namespace {

constexpr int kIdleFlushMs = 20;

MockScript::Fault parse_fault(const std::string& name) {
  using F = MockScript::Fault;
  static const std::map<std::string, F> names{
      {"none", F::none},         {"out_of_range", F::out_of_range}, {"malformed", F::malformed},
      {"extra_field", F::extra_field}, {"unknown_id", F::unknown_id},     {"duplicate", F::duplicate},
      {"stall", F::stall},       {"no_handshake", F::no_handshake}};
  const auto it = names.find(name);
  if (it == names.end()) throw DataError("mock script: unknown fault '" + name + "'");
  return it->second;
}

bool write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t w = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (w < 0 && errno == ENOTSOCK) {
      const ssize_t v = ::write(fd, data.data() + off, data.size() - off);
      if (v < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        return false;
      }
      off += static_cast<std::size_t>(v);
      continue;
    }
    if (w < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return false;
    }
    off += static_cast<std::size_t>(w);
  }
  return true;
}

std::string response_line(std::int64_t id, double score) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["score"] = score;
  return j.dump() + "\n";
}

class Session {
 public:
  Session(const MockScript& script, int in_fd, int out_fd)
      : script_(script), in_fd_(in_fd), out_fd_(out_fd), rng_(script.seed) {}

  int run() {
    std::string inbox;
    char buf[65536];
    while (true) {
      pollfd p{in_fd_, POLLIN, 0};
      const int rc = ::poll(&p, 1, pending_.empty() ? -1 : kIdleFlushMs);
      if (rc < 0) {
        if (errno == EINTR) continue;
        return 2;
      }
      if (rc == 0) {
        if (!flush()) return 0;
        continue;
      }
      const ssize_t r = ::read(in_fd_, buf, sizeof buf);
      if (r < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        return 0;
      }
      if (r == 0) {
        flush();
        return 0;
      }
      inbox.append(buf, static_cast<std::size_t>(r));
      std::size_t nl;
      while ((nl = inbox.find('\n')) != std::string::npos) {
        const std::string line = inbox.substr(0, nl);
        inbox.erase(0, nl + 1);
        if (line.empty()) continue;
        const int status = on_line(line);
        if (status >= 0) return status;
      }
    }
  }

 private:
  // -1 keeps the session going.
  int on_line(const std::string& line) {
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      return 3;
    }
    if (!greeted_) {
      if (!j.is_object() || j.size() != 1 || !j.contains("hello")) return 3;
      greeted_ = true;
      if (script_.fault == MockScript::Fault::no_handshake) return -1;
      if (script_.handshake_delay_ms > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(script_.handshake_delay_ms));
      }
      nlohmann::ordered_json ready;
      ready["ready"] = true;
      ready["model"] = script_.model;
      return write_all(out_fd_, ready.dump() + "\n") ? -1 : 0;
    }
    if (!j.is_object() || j.size() != 3 || !j.contains("id") || !j["id"].is_number_integer() ||
        !j.contains("concept") || !j["concept"].is_string() || !j.contains("sentence") ||
        !j["sentence"].is_string()) {
      return 3;
    }
    const auto id = j["id"].get<std::int64_t>();
    pending_.emplace_back(id, script_.lookup(j["concept"].get<std::string>(), j["sentence"].get<std::string>()));
    if (pending_.size() >= std::max<std::size_t>(script_.window, 1)) {
      if (!flush()) return 0;
    }
    return -1;
  }

  bool flush() {
    using F = MockScript::Fault;
    if (script_.shuffle) std::shuffle(pending_.begin(), pending_.end(), rng_);
    std::string out;
    for (const auto& [id, score] : pending_) {
      const auto index = sent_++;
      if (script_.fault == F::stall && index >= script_.fault_after) continue;
      if (index != script_.fault_after) {
        out += response_line(id, score);
        continue;
      }
      switch (script_.fault) {
        case F::out_of_range:
          out += response_line(id, 1.5);
          break;
        case F::malformed:
          out += "{\"id\": " + std::to_string(id) + ", \"score\": \n";
          break;
        case F::extra_field: {
          nlohmann::ordered_json e;
          e["id"] = id;
          e["score"] = score;
          e["note"] = "extra";
          out += e.dump() + "\n";
          break;
        }
        case F::unknown_id:
          out += response_line(id + 1000000, score);
          break;
        case F::duplicate:
          out += response_line(id, score);
          out += response_line(id, score);
          break;
        default:
          out += response_line(id, score);
      }
    }
    pending_.clear();
    return out.empty() || write_all(out_fd_, out);
  }

  const MockScript& script_;
  int in_fd_;
  int out_fd_;
  std::mt19937_64 rng_;
  bool greeted_ = false;
  std::size_t sent_ = 0;
  std::vector<std::pair<std::int64_t, double>> pending_;
};

}  // namespace

double MockScript::lookup(const std::string& concept_text, const std::string& sentence) const {
  if (const auto it = scores.find({concept_text, sentence}); it != scores.end()) return it->second;
  if (const auto it = concept_scores.find(concept_text); it != concept_scores.end()) return it->second;
  return default_score;
}

MockScript parse_mock_script(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("mock script: ") + e.what());
  }
  if (!j.is_object()) throw DataError("mock script must be a JSON object");
  MockScript s;
  try {
    s.model = j.value("model", s.model);
    s.default_score = j.value("default", s.default_score);
    s.shuffle = j.value("shuffle", s.shuffle);
    s.seed = j.value("seed", s.seed);
    s.window = j.value("window", s.window);
    s.fault = parse_fault(j.value("fault", std::string("none")));
    s.fault_after = j.value("fault_after", s.fault_after);
    s.handshake_delay_ms = j.value("handshake_delay_ms", s.handshake_delay_ms);
    for (const auto& entry : j.value("scores", json::array())) {
      const auto c = entry.at("concept").get<std::string>();
      const auto score = entry.at("score").get<double>();
      if (entry.contains("sentence")) {
        s.scores[{c, entry["sentence"].get<std::string>()}] = score;
      } else {
        s.concept_scores[c] = score;
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("mock script: ") + e.what());
  }
  return s;
}

MockScript load_mock_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_mock_script(ss.str());
}

int serve_mock(const MockScript& script, int in_fd, int out_fd) {
  ::signal(SIGPIPE, SIG_IGN);
  return Session(script, in_fd, out_fd).run();
}

int serve_mock_tcp(const MockScript& script, const std::string& host, std::uint16_t port,
                   const std::function<void(std::uint16_t)>& on_listening, const std::atomic<bool>* stop) {
  ::signal(SIGPIPE, SIG_IGN);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const auto service = std::to_string(port);
  if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || res == nullptr) {
    throw DataError("cannot resolve listen address " + host);
  }
  const int fd = ::socket(res->ai_family, res->ai_socktype | SOCK_CLOEXEC, res->ai_protocol);
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (fd < 0 || ::bind(fd, res->ai_addr, res->ai_addrlen) != 0 || ::listen(fd, 8) != 0) {
    const std::string err = std::strerror(errno);
    ::freeaddrinfo(res);
    if (fd >= 0) ::close(fd);
    throw DataError("cannot listen on " + host + ":" + service + ": " + err);
  }
  ::freeaddrinfo(res);
  sockaddr_storage bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  const auto actual = ntohs(bound.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                                                        : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
  if (on_listening) on_listening(actual);

  while (stop == nullptr || !stop->load()) {
    pollfd p{fd, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    const int conn = ::accept4(fd, nullptr, nullptr, SOCK_CLOEXEC);
    if (conn < 0) continue;
    serve_mock(script, conn, conn);
    ::close(conn);
  }
  ::close(fd);
  return 0;
}

}  // namespace topicpages
