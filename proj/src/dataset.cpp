#include "topicpages/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "topicpages/error.hpp"

namespace topicpages {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower_ascii(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<LabeledExample> labeled_from_jsonl(std::string_view content, const std::string& name) {
  std::vector<LabeledExample> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    const auto line = trim(content.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(name + ": " + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("concept") || !j.contains("sentence") || !j.contains("label") ||
        !j["concept"].is_string() || !j["sentence"].is_string() || !j["label"].is_string()) {
      throw FormatError(name + ": expected {\"concept\", \"sentence\", \"label\"} strings", line_no);
    }
    const auto label = parse_label(j["label"].get<std::string>());
    if (!label) throw FormatError(name + ": label must be \"good\" or \"bad\"", line_no);
    LabeledExample ex{j["concept"].get<std::string>(), j["sentence"].get<std::string>(), *label};
    if (trim(ex.term).empty() || trim(ex.sentence).empty()) throw FormatError(name + ": empty field", line_no);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

std::string_view to_string(Label label) { return label == Label::good ? "good" : "bad"; }

std::optional<Label> parse_label(std::string_view name) {
  if (name == "good") return Label::good;
  if (name == "bad") return Label::bad;
  return std::nullopt;
}

std::vector<LabeledExample> load_labeled_jsonl(const fs::path& path) {
  auto out = labeled_from_jsonl(read_file(path), path.string());
  if (out.empty()) throw DataError("no labeled examples in '" + path.string() + "'");
  return out;
}

void write_labeled_jsonl(const std::vector<LabeledExample>& examples, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (const auto& ex : examples) {
    nlohmann::ordered_json j;
    j["concept"] = ex.term;
    j["sentence"] = ex.sentence;
    j["label"] = to_string(ex.label);
    out << j.dump() << '\n';
  }
}

std::vector<LabeledExample> parse_wcl_native(std::string_view content, Label label, std::size_t* skipped) {
  static const std::regex tag_re(R"(</?[A-Z][A-Z_]*>)");
  static const std::regex target_re(R"(\bTARGET\b)");

  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    auto line = content.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    pos = nl + 1;
  }

  std::vector<LabeledExample> out;
  std::size_t lost = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i][0] != '#') continue;
    auto sentence = trim(std::regex_replace(lines[i].substr(1), tag_re, ""));
    std::string term;
    if (i + 1 < lines.size() && !lines[i + 1].empty() && lines[i + 1][0] != '#') {
      const auto& term_line = lines[i + 1];
      const auto cut = term_line.find_first_of(":\t");
      term = trim(term_line.substr(0, cut));
      std::replace(term.begin(), term.end(), '_', ' ');
      ++i;
    }
    if (term.empty() || sentence.empty()) {
      ++lost;
      continue;
    }
    sentence = std::regex_replace(sentence, target_re, term);
    out.push_back({term, sentence, label});
  }
  if (skipped != nullptr) *skipped += lost;
  return out;
}

std::vector<LabeledExample> load_wcl(const fs::path& path, WclLoadReport* report) {
  WclLoadReport local;
  WclLoadReport& rep = report != nullptr ? *report : local;
  rep = {};
  std::vector<LabeledExample> out;

  auto add_native = [&](const fs::path& file) {
    const auto name = lower_ascii(file.filename().string());
    std::optional<Label> label;
    if (name.find("good") != std::string::npos) label = Label::good;
    if (name.find("bad") != std::string::npos) label = Label::bad;
    if (!label) return;
    auto examples = parse_wcl_native(read_file(file), *label, &rep.skipped);
    rep.files.push_back(file);
    out.insert(out.end(), std::make_move_iterator(examples.begin()), std::make_move_iterator(examples.end()));
  };

  if (!fs::exists(path)) throw DataError("WCL path '" + path.string() + "' does not exist");
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) add_native(f);
  } else if (path.extension() == ".jsonl") {
    out = labeled_from_jsonl(read_file(path), path.string());
    rep.files.push_back(path);
  } else {
    add_native(path);
  }

  for (const auto& ex : out) (ex.label == Label::good ? rep.good : rep.bad) += 1;
  if (out.empty()) throw DataError("no WCL examples found under '" + path.string() + "'");
  spdlog::info("WCL: {} examples ({} good, {} bad, {} skipped) from {} file(s)", rep.total(), rep.good, rep.bad,
               rep.skipped, rep.files.size());
  if (rep.total() != kWclExpectedSize) {
    spdlog::warn("WCL: expected {} examples, observed {} (distribution variants differ)", kWclExpectedSize,
                 rep.total());
  }
  return out;
}

}  // namespace topicpages
