#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>

namespace topicpages {

/// Scripted scorer server speaking the bridge protocol, for tests.
struct MockScript {
  enum class Fault { none, out_of_range, malformed, extra_field, unknown_id, duplicate, stall, no_handshake };

  std::string model = "mock";
  double default_score = 0.5;
  std::map<std::pair<std::string, std::string>, double> scores;  // (concept, sentence)
  std::map<std::string, double> concept_scores;                  // any sentence
  bool shuffle = false;
  std::uint64_t seed = 1;
  std::size_t window = 64;  // responses held back before a flush
  Fault fault = Fault::none;
  std::size_t fault_after = 0;  // responses sent cleanly before the fault
  int handshake_delay_ms = 0;

  double lookup(const std::string& concept_text, const std::string& sentence) const;
};

/// {"model", "default", "scores": [{"concept", "sentence"?, "score"}],
///  "shuffle", "seed", "window", "fault", "fault_after", "handshake_delay_ms"}
MockScript parse_mock_script(std::string_view json_text);
MockScript load_mock_script(const std::filesystem::path& path);

/// Serves one session on the given descriptors until EOF. Returns 0 on a
/// clean end and 3 after a malformed request.
int serve_mock(const MockScript& script, int in_fd, int out_fd);

/// Accepts connections one at a time on host:port (port 0 picks one) and
/// serves each. `on_listening` receives the bound port. Runs until `stop`
/// becomes true.
int serve_mock_tcp(const MockScript& script, const std::string& host, std::uint16_t port,
                   const std::function<void(std::uint16_t)>& on_listening, const std::atomic<bool>* stop = nullptr);

}  // namespace topicpages
