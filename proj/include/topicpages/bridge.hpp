#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicpages/defrank.hpp"
#include "topicpages/error.hpp"

namespace topicpages {

struct ScoreRequest {
  std::int64_t request_id = 0;
  std::string concept_text;
  std::string sentence;
};

struct ScoreResponse {
  std::int64_t request_id = 0;
  double score = 0.0;

  friend bool operator==(const ScoreResponse&, const ScoreResponse&) = default;
};

/// Raised when a batch deadline passes; lists the ids still outstanding.
class BridgeTimeout : public ProtocolError {
 public:
  BridgeTimeout(const std::string& what, std::vector<std::int64_t> missing)
      : ProtocolError(what), missing_(std::move(missing)) {}
  const std::vector<std::int64_t>& missing_ids() const noexcept { return missing_; }

 private:
  std::vector<std::int64_t> missing_;
};

namespace wire {

std::string hello();
std::string encode_request(const ScoreRequest& request);
/// Strict: exactly {"ready": true, "model": str}.
std::string decode_ready(std::string_view line);
/// Strict: exactly {"id": int, "score": number in [0, 1]}.
ScoreResponse decode_response(std::string_view line);

}  // namespace wire

struct Endpoint {
  enum class Kind { subprocess, tcp };
  Kind kind = Kind::subprocess;
  std::string command;  // run through /bin/sh -c
  std::string host;
  std::uint16_t port = 0;

  /// "tcp://host:port" or "host:port" is TCP; anything else is a command.
  static Endpoint parse(std::string_view text);
  std::string to_string() const;
};

struct BridgeOptions {
  std::chrono::milliseconds handshake_timeout{30000};
  std::chrono::milliseconds batch_timeout{60000};
};

/// One connection to a scorer process or socket. Not thread-safe; use one
/// client per worker.
class BridgeClient {
 public:
  /// Spawns or connects, then performs the handshake. Throws ProtocolError.
  static std::unique_ptr<BridgeClient> connect(const Endpoint& endpoint, const BridgeOptions& options = {});
  ~BridgeClient();

  BridgeClient(const BridgeClient&) = delete;
  BridgeClient& operator=(const BridgeClient&) = delete;

  const std::string& model() const noexcept { return model_; }
  bool is_open() const noexcept;

  /// Responses come back in request order whatever order the server used.
  /// Any protocol violation closes the connection before throwing.
  std::vector<ScoreResponse> score_batch(std::span<const ScoreRequest> requests);

  void close();

  class Transport;

 private:
  BridgeClient(std::unique_ptr<Transport> transport, BridgeOptions options);

  std::unique_ptr<Transport> transport_;
  BridgeOptions options_;
  std::string model_;
  std::set<std::int64_t> issued_;
};

/// DefinitionScorer backed by a bridge connection; ids are issued sequentially.
class BridgeScorer final : public DefinitionScorer {
 public:
  explicit BridgeScorer(std::unique_ptr<BridgeClient> client);

  std::string name() const override;
  std::vector<double> score_batch(std::span<const ScoreQuery> queries) override;
  BridgeClient& client() noexcept { return *client_; }

 private:
  std::unique_ptr<BridgeClient> client_;
  std::int64_t next_id_ = 1;
};

}  // namespace topicpages
