// One line per criterion: PASS, FAIL or SKIP. Exit 0 when nothing failed.
// `--only <name>` runs a single criterion; a skipped single run exits 77.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fixture_pipeline.hpp"
#include "oracles.hpp"
#include "test_support.hpp"
#include "topicpages/bridge.hpp"
#include "topicpages/dataset.hpp"
#include "topicpages/error.hpp"
#include "topicpages/features.hpp"
#include "topicpages/metrics.hpp"
#include "topicpages/snippetrank.hpp"

using namespace topicpages;
using Clock = std::chrono::steady_clock;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::fail, std::move(d)}; }
Outcome check(bool ok, std::string d) { return {ok ? Status::pass : Status::fail, std::move(d)}; }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome eq1_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  std::map<std::size_t, Snippet> snippets;  // one snippet of each length
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t len = 1 + rng() % 500;
    const std::size_t tf = 1 + rng() % len;
    const std::size_t l1 = rng() % len;
    auto it = snippets.find(len);
    if (it == snippets.end()) {
      std::string text;
      for (std::size_t i = 0; i < len; ++i) text += (i ? " w" : "w") + std::to_string(i % 10);
      it = snippets.emplace(len, build_snippet("d", 0, std::nullopt, text)).first;
      if (it->second.token_count != len) return fail("fixture snippet has the wrong token count");
    }
    const auto& snippet = it->second;
    const auto& tokens = snippet.sentences.at(0).tokens;
    std::vector<Annotation> annotations;
    for (std::size_t k = 0; k < tf; ++k) {
      const auto pos = l1 + k % (len - l1);
      Annotation a;
      a.concept_id = "c";
      a.doc_id = "d";
      a.span = tokens[pos].span;
      annotations.push_back(a);
    }
    const auto got = score_snippet("c", snippet, annotations).score;
    const double direct = static_cast<double>(tf) / static_cast<double>(len) *
                          (1.0 - static_cast<double>(l1) / static_cast<double>(len));
    worst = std::max(worst, std::abs(got - direct) / direct);
  }
  const auto elapsed = seconds_since(start);
  return check(worst <= 1e-12 && elapsed < 1.0,
               "10000 triples, max relative error " + fmt(worst) + ", " + fmt(elapsed) + " s (limit 1 s)");
}

Outcome annotator_brute_force() {
  const auto start = Clock::now();
  std::mt19937_64 rng(77);
  std::size_t annotations = 0;
  std::size_t mismatches = 0;
  std::size_t max_tokens = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const testing::RandomWorld world(rng, 30);
    const auto doc = world.document(rng, "doc" + std::to_string(trial), 200);
    std::size_t tokens = 0;
    for (const auto& s : doc.snippets) tokens += s.token_count;
    max_tokens = std::max(max_tokens, tokens);
    const auto got = annotate_document(doc, world.taxonomy);
    if (got != testing::brute_force_annotate(doc, world.taxonomy)) ++mismatches;
    annotations += got.size();
  }
  const auto elapsed = seconds_since(start);
  return check(mismatches == 0 && max_tokens <= 200 && elapsed < 30.0,
               "500 documents (max " + std::to_string(max_tokens) + " tokens), " + std::to_string(annotations) +
                   " annotations, " + std::to_string(mismatches) + " mismatches, " + fmt(elapsed) +
                   " s (limit 30 s)");
}

Outcome abbreviation_gold() {
  std::istringstream in(testing::read_file(testing::fixture_path("abbreviations_gold.jsonl")));
  std::string line;
  std::size_t total = 0;
  std::size_t exact = 0;
  bool has_ml_case = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto text = j.at("text").get<std::string>();
    std::vector<std::pair<std::string, std::string>> expected, got;
    for (const auto& p : j.at("pairs")) expected.emplace_back(p.at(0), p.at(1));
    for (const auto& p : detect_abbreviations(text)) got.emplace_back(p.short_form, p.long_form);
    has_ml_case = has_ml_case || text.find("Machine Learning (ML)") != std::string::npos;
    exact += got == expected ? 1 : 0;
    ++total;
  }
  return check(total == 25 && exact == total && has_ml_case,
               std::to_string(exact) + "/" + std::to_string(total) + " exact (short, long) matches" +
                   (has_ml_case ? "" : ", Machine Learning (ML) case missing"));
}

Outcome metrics_harness() {
  struct Fixture {
    Confusion c;
    double p, r, f1;
  };
  // Hand-computed macro values.
  const std::vector<Fixture> fixtures{
      {{8, 2, 1, 9}, 0.85, 169.0 / 198.0, 113.0 / 133.0},
      {{3, 1, 2, 4}, 17.0 / 24.0, 0.7, 23.0 / 33.0},
      {{0, 0, 5, 5}, 0.25, 0.5, 1.0 / 3.0},
      {{4, 0, 0, 6}, 1.0, 1.0, 1.0},
  };
  double worst = 0.0;
  for (const auto& f : fixtures) {
    std::vector<Prediction> preds;
    preds.insert(preds.end(), f.c.tp, {Label::good, Label::good});
    preds.insert(preds.end(), f.c.fp, {Label::good, Label::bad});
    preds.insert(preds.end(), f.c.fn, {Label::bad, Label::good});
    preds.insert(preds.end(), f.c.tn, {Label::bad, Label::bad});
    const auto m = evaluate(preds);
    worst = std::max({worst, std::abs(m.macro_precision - f.p), std::abs(m.macro_recall - f.r),
                      std::abs(m.macro_f1 - f.f1)});
  }
  std::mt19937_64 rng(5);
  std::size_t asymmetric = 0;
  for (int i = 0; i < 1000; ++i) {
    const Confusion c{rng() % 50, rng() % 50, rng() % 50, 1 + rng() % 50};
    const auto m = metrics_from_confusion(c);
    const auto s = metrics_from_confusion({c.tn, c.fn, c.fp, c.tp});
    if (std::abs(m.macro_f1 - s.macro_f1) > 1e-12 || std::abs(m.good.f1 - s.bad.f1) > 1e-12 ||
        std::abs(m.macro_precision - s.macro_precision) > 1e-12) {
      ++asymmetric;
    }
  }
  return check(worst <= 1e-9 && asymmetric == 0, std::to_string(fixtures.size()) +
                                                     " hand fixtures, max abs error " + fmt(worst) +
                                                     "; class swap asymmetries " + std::to_string(asymmetric) +
                                                     "/1000");
}

Outcome wcl_baseline() {
  const char* dir = std::getenv("TOPICPAGES_WCL_DIR");
  if (dir == nullptr || *dir == '\0') {
    return {Status::skip, "BLOCKED: TOPICPAGES_WCL_DIR is not set and the WCL corpus is not bundled"};
  }
  const auto start = Clock::now();
  WclLoadReport report;
  std::vector<LabeledExample> data;
  try {
    data = load_wcl(dir, &report);
  } catch (const Error& e) {
    return fail(std::string("cannot load WCL: ") + e.what());
  }
  std::size_t dropped = 0;
  data = featurizable_examples(data, &dropped);
  const auto m = kfold_cv(data, 10, baseline_trainer());
  const auto elapsed = seconds_since(start);
  return check(m.macro_f1 >= 0.75 && elapsed < 600.0,
               std::to_string(report.total()) + " sentences loaded (expected " + std::to_string(kWclExpectedSize) +
                   "), " + std::to_string(dropped) + " dropped; 10-fold macro F1 " + fmt(m.macro_f1, 4) +
                   " (need >= 0.75), P " + fmt(m.macro_precision, 4) + ", R " + fmt(m.macro_recall, 4) + ", " +
                   fmt(elapsed) + " s (limit 600 s)");
}

std::string pages_jsonl(const std::vector<TopicPage>& pages) {
  std::ostringstream out;
  write_pages(pages, out);
  return out.str();
}

Outcome golden_run() {
  const auto golden = testing::read_file(testing::golden_path("pages.jsonl"));
  const auto golden_html = testing::read_file(testing::golden_path("c01__mathematics.html"));
  if (kDefaultSnippetsK != 10 || kDefaultRelatedK != 5) return fail("default caps are not 10 snippets / 5 related");

  // In process, twice.
  const testing::FixturePipeline first, second;
  const auto a = first.pages();
  const auto b = second.pages();
  if (pages_jsonl(a) != pages_jsonl(b)) return fail("two in-process runs differ");
  if (pages_jsonl(a) != golden) return fail("in-process pages.jsonl differs from the golden file");
  for (const auto& p : a) {
    if (p.snippets.size() > 10 || p.related.size() > 5) return fail("page " + p.concept_id + " exceeds the caps");
  }

  // Through the CLI, twice, including HTML.
  testing::TempDir dir;
  const auto cli = testing::quote(testing::cli_path());
  const auto q = [&](const std::string& name) { return testing::quote(dir / name); };
  auto step = [&](const std::string& args) { return testing::run(cli + " " + args).exit_code == 0; };
  if (!step("ingest " + testing::quote(testing::data_path("fixture_corpus")) + " --format xml --out " + q("corpus.jsonl")) ||
      !step("annotate --taxonomy " + testing::quote(testing::data_path("sample_taxonomy.tsv")) + " --corpus " +
            q("corpus.jsonl") + " --out " + q("ann.jsonl")) ||
      !step("train-baseline " + testing::quote(testing::data_path("synthetic_labeled.jsonl")) + " --out " +
            q("model.json"))) {
    return fail("CLI preparation failed");
  }
  std::vector<std::string> html_runs;
  for (const std::string run : {"1", "2"}) {
    if (!step("build-pages --scorer baseline --corpus " + q("corpus.jsonl") + " --taxonomy " +
              testing::quote(testing::data_path("sample_taxonomy.tsv")) + " --annotations " + q("ann.jsonl") +
              " --model " + q("model.json") + " --timestamp 1700000000 --out " + q("pages" + run + ".jsonl")) ||
        !step("render-html " + q("pages" + run + ".jsonl") + " --out " + q("site" + run))) {
      return fail("CLI build-pages or render-html failed");
    }
    if (testing::read_file(dir / ("pages" + run + ".jsonl")) != golden) return fail("CLI run " + run + " differs from golden");
    std::string site;
    for (const auto& p : a) site += testing::read_file(dir / ("site" + run) / page_file_name(p.concept_id, p.domain));
    site += testing::read_file(dir / ("site" + run) / "index.html");
    html_runs.push_back(site);
    if (testing::read_file(dir / ("site" + run) / "c01__mathematics.html") != golden_html) {
      return fail("rendered HTML differs from the golden file");
    }
  }
  if (html_runs[0] != html_runs[1]) return fail("HTML differs between runs");
  return pass(std::to_string(a.size()) + " pages byte-identical to golden over 2 in-process and 2 CLI runs; HTML " +
              "identical and matches golden; caps 10/5 hold");
}

Outcome protocol_conformance() {
  testing::TempDir dir;
  auto endpoint = [&](const std::string& name, const std::string& script) {
    testing::write_file(dir / name, script);
    return Endpoint::parse(testing::cli_path() + " mock-scorer --script " + testing::quote(dir / name));
  };
  BridgeOptions opts;
  opts.handshake_timeout = std::chrono::milliseconds(5000);
  opts.batch_timeout = std::chrono::milliseconds(5000);

  // Reassembly.
  {
    auto client = BridgeClient::connect(endpoint("shuffle.json", R"({"shuffle": true, "window": 1000, "seed": 9})"), opts);
    std::vector<ScoreRequest> req;
    for (std::int64_t i = 1; i <= 1000; ++i) req.push_back({i * 7, "c", "s" + std::to_string(i)});
    const auto got = client->score_batch(req);
    if (got.size() != req.size()) return fail("reassembly returned the wrong count");
    for (std::size_t i = 0; i < req.size(); ++i) {
      if (got[i].request_id != req[i].request_id) return fail("responses not in request order");
    }
  }
  // Out-of-range rejection.
  {
    auto client = BridgeClient::connect(endpoint("range.json", R"({"fault": "out_of_range", "fault_after": 2})"), opts);
    bool rejected = false;
    try {
      client->score_batch(std::vector<ScoreRequest>{{1, "a", "b"}, {2, "a", "c"}, {3, "a", "d"}});
    } catch (const ProtocolError&) {
      rejected = true;
    }
    if (!rejected || client->is_open()) return fail("out-of-range score was accepted");
  }
  // Timeout falls back to the baseline and still yields the golden pages.
  const testing::FixturePipeline f;
  BridgeOptions tight = opts;
  tight.batch_timeout = std::chrono::milliseconds(300);
  BridgeScorer bridge(BridgeClient::connect(endpoint("stall.json", R"({"fault": "stall"})"), tight));
  BaselineScorer baseline(f.model);
  PageBuilder builder(f.corpus, f.taxonomy, f.annotations, PageConfig{}, bridge, &baseline, testing::kFixtureTimestamp);
  const auto pages = builder.build_all();
  if (builder.fallback_count() == 0) return fail("stalled bridge did not trigger the fallback");
  if (pages_jsonl(pages) != testing::read_file(testing::golden_path("pages.jsonl"))) {
    return fail("fallback pages differ from the baseline golden");
  }
  return pass("1000 shuffled responses reassembled; out-of-range score rejected and connection closed; stalled "
              "bridge timed out and " + std::to_string(builder.fallback_count()) +
              " page(s) fell back to the baseline, output equal to golden");
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--only eq1|annotator|abbreviations|metrics|wcl|golden|protocol]\n";
      return 1;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"eq1", eq1_oracle},
      {"annotator", annotator_brute_force},
      {"abbreviations", abbreviation_gold},
      {"metrics", metrics_harness},
      {"wcl", wcl_baseline},
      {"golden", golden_run},
      {"protocol", protocol_conformance},
  };

  bool any_fail = false;
  bool any_run = false;
  bool all_skipped = true;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && name != only) continue;
    any_run = true;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    std::cout << tag << "  " << name << ": " << o.detail << std::endl;
    any_fail = any_fail || o.status == Status::fail;
    all_skipped = all_skipped && o.status == Status::skip;
  }
  if (!any_run) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 1;
  }
  if (any_fail) return 1;
  if (!only.empty() && all_skipped) return 77;
  return 0;
}
