#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "topicpages/annotator.hpp"
#include "topicpages/baseline.hpp"
#include "topicpages/bridge.hpp"
#include "topicpages/corpus.hpp"
#include "topicpages/dataset.hpp"
#include "topicpages/error.hpp"
#include "topicpages/metrics.hpp"
#include "topicpages/mock_scorer.hpp"
#include "topicpages/pagegen.hpp"
#include "topicpages/serialize.hpp"
#include "topicpages/taxonomy.hpp"

namespace fs = std::filesystem;
using namespace topicpages;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string resolve_timestamp(const std::string& flag) {
  std::string value = flag;
  if (value.empty()) {
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env != nullptr) value = env;
  }
  if (value.empty()) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    return format_timestamp(std::chrono::duration_cast<std::chrono::seconds>(now).count());
  }
  if (std::all_of(value.begin(), value.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
    return format_timestamp(std::stoll(value));
  }
  return value;
}

nlohmann::ordered_json metrics_json(const EvalMetrics& m) {
  auto cls = [](const ClassMetrics& c) {
    nlohmann::ordered_json j;
    j["precision"] = c.precision;
    j["recall"] = c.recall;
    j["f1"] = c.f1;
    return j;
  };
  nlohmann::ordered_json j;
  j["macro_precision"] = m.macro_precision;
  j["macro_recall"] = m.macro_recall;
  j["macro_f1"] = m.macro_f1;
  j["good"] = cls(m.good);
  j["bad"] = cls(m.bad);
  j["confusion"] = {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"fn", m.confusion.fn}, {"tn", m.confusion.tn}};
  return j;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string dir;
  std::string format = "xml";
  std::string out = "corpus.jsonl";
  std::string domain = "General";
  std::string source_kind;
};

int run_ingest(const IngestArgs& a) {
  const auto format = a.format == "xml" ? InputFormat::xml : InputFormat::plain;
  if (!fs::is_directory(a.dir)) throw UsageError("'" + a.dir + "' is not a directory");
  std::optional<SourceKind> kind;
  if (!a.source_kind.empty()) {
    kind = parse_source_kind(a.source_kind);
    if (!kind) throw UsageError("unknown source kind '" + a.source_kind + "'");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(a.dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (format == InputFormat::xml ? ext == ".xml" : (ext == ".txt" || ext == "")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  Corpus corpus;
  for (const auto& f : files) {
    ParseOptions opts;
    opts.doc_id = f.stem().string();
    opts.domain = a.domain;
    opts.source_kind = kind;
    try {
      corpus.add(parse_document(read_file(f), format, opts));
    } catch (const DataError& e) {
      throw DataError(f.string() + ": " + e.what());
    }
  }
  if (corpus.size() == 0) throw DataError("no input documents under '" + a.dir + "'");
  write_corpus_jsonl(corpus, fs::path(a.out));
  std::size_t snippets = 0;
  for (const auto& d : corpus.documents()) snippets += d.snippets.size();
  spdlog::info("ingested {} documents, {} snippets -> {}", corpus.size(), snippets, a.out);
  return 0;
}

struct AnnotateArgs {
  std::string taxonomy;
  std::string corpus = "corpus.jsonl";
  std::string out = "annotations.jsonl";
};

int run_annotate(const AnnotateArgs& a) {
  const auto taxonomy = load_taxonomy(a.taxonomy);
  const auto corpus = read_corpus_jsonl(fs::path(a.corpus));
  const Annotator annotator(taxonomy);
  std::vector<Annotation> all;
  for (const auto& doc : corpus.documents()) {
    auto part = annotator.annotate(doc);
    all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  write_annotations_jsonl(all, fs::path(a.out));
  spdlog::info("{} annotations over {} documents -> {}", all.size(), corpus.size(), a.out);
  return 0;
}

struct TrainArgs {
  std::string labeled;
  std::string out = "model.json";
  int epochs = TrainOptions{}.epochs;
  double lr = TrainOptions{}.learning_rate;
};

int run_train(const TrainArgs& a) {
  const auto examples = load_labeled_jsonl(a.labeled);
  const auto model = train_baseline(examples, TrainOptions{a.epochs, a.lr, true});
  save_model(model, a.out);
  spdlog::info("trained baseline on {} examples -> {}", examples.size(), a.out);
  return 0;
}

struct EvaluateArgs {
  std::string dataset = "jsonl";
  std::string path;
  std::size_t folds = 10;
  std::uint64_t seed = kDefaultFoldSeed;
  int epochs = TrainOptions{}.epochs;
  double lr = TrainOptions{}.learning_rate;
  double threshold = 0.5;
};

int run_evaluate(const EvaluateArgs& a) {
  std::string path = a.path;
  if (path.empty() && a.dataset == "wcl") {
    if (const char* env = std::getenv("TOPICPAGES_WCL_DIR"); env != nullptr) path = env;
  }
  if (path.empty()) throw UsageError("--path is required (or set TOPICPAGES_WCL_DIR for wcl)");
  auto examples = a.dataset == "wcl" ? load_wcl(path) : load_labeled_jsonl(path);
  std::size_t dropped = 0;
  examples = featurizable_examples(examples, &dropped);
  if (dropped > 0) spdlog::warn("{} examples dropped: term not found in sentence", dropped);
  const auto start = std::chrono::steady_clock::now();
  const auto metrics =
      kfold_cv(examples, a.folds, baseline_trainer(TrainOptions{a.epochs, a.lr, true}, a.threshold), a.seed);
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto j = metrics_json(metrics);
  j["examples"] = examples.size();
  j["folds"] = a.folds;
  j["seed"] = a.seed;
  j["seconds"] = secs;
  std::cout << j.dump(2) << '\n';
  return 0;
}

struct BuildArgs {
  std::string corpus = "corpus.jsonl";
  std::string taxonomy;
  std::string annotations;
  std::string model;
  std::string train;
  std::string config;
  std::string out = "pages.jsonl";
  std::string timestamp;
  std::optional<std::string> scorer;
  std::optional<std::string> endpoint;
  std::optional<std::string> domains;
  std::optional<std::size_t> snippets_k;
  std::optional<std::size_t> related_k;
  std::optional<double> threshold;
  int handshake_timeout_ms = 30000;
  int batch_timeout_ms = 60000;
};

int run_build(const BuildArgs& a) {
  PageConfig config;
  if (!a.config.empty()) config = load_config(a.config);
  if (a.scorer) config.set("scorer", *a.scorer);
  if (a.endpoint) config.set("scorer_endpoint", *a.endpoint);
  if (a.domains) config.set("domains", *a.domains);
  if (a.snippets_k) config.snippets_k = *a.snippets_k;
  if (a.related_k) config.related_k = *a.related_k;
  if (a.threshold) config.definition_threshold = *a.threshold;

  BaselineModel model;
  if (!a.model.empty()) {
    model = load_model(a.model);
  } else if (!a.train.empty()) {
    model = train_baseline(load_labeled_jsonl(a.train));
  } else {
    throw UsageError("the baseline scorer needs --model or --train");
  }
  BaselineScorer baseline(model);

  const auto taxonomy = load_taxonomy(a.taxonomy);
  const auto corpus = read_corpus_jsonl(fs::path(a.corpus));
  std::vector<Annotation> annotations;
  if (!a.annotations.empty()) {
    annotations = read_annotations_jsonl(fs::path(a.annotations));
  } else {
    const Annotator annotator(taxonomy);
    for (const auto& doc : corpus.documents()) {
      auto part = annotator.annotate(doc);
      annotations.insert(annotations.end(), part.begin(), part.end());
    }
  }

  std::unique_ptr<BridgeScorer> bridge;
  DefinitionScorer* scorer = &baseline;
  if (config.scorer == "bridge") {
    if (config.scorer_endpoint.empty()) throw UsageError("the bridge scorer needs --endpoint or scorer_endpoint");
    BridgeOptions opts;
    opts.handshake_timeout = std::chrono::milliseconds(a.handshake_timeout_ms);
    opts.batch_timeout = std::chrono::milliseconds(a.batch_timeout_ms);
    bridge = std::make_unique<BridgeScorer>(BridgeClient::connect(Endpoint::parse(config.scorer_endpoint), opts));
    scorer = bridge.get();
    spdlog::info("scoring through bridge model '{}'", bridge->client().model());
  }

  PageBuilder builder(corpus, taxonomy, std::move(annotations), config, *scorer,
                      scorer == &baseline ? nullptr : &baseline, resolve_timestamp(a.timestamp));
  const auto pages = builder.build_all();
  write_pages(pages, fs::path(a.out));
  spdlog::info("{} pages -> {}", pages.size(), a.out);
  if (builder.fallback_count() > 0) spdlog::warn("{} page(s) fell back to the baseline scorer", builder.fallback_count());
  return 0;
}

struct RenderArgs {
  std::string pages;
  std::string out = "site";
};

int run_render(const RenderArgs& a) {
  const auto pages = read_pages(fs::path(a.pages));
  const auto files = render_site(pages, a.out);
  spdlog::info("{} files -> {}", files.size(), a.out);
  return 0;
}

struct MockArgs {
  std::string script;
  std::string listen;
};

int run_mock(const MockArgs& a) {
  const auto script = load_mock_script(a.script);
  if (a.listen.empty()) return serve_mock(script, STDIN_FILENO, STDOUT_FILENO);
  const auto colon = a.listen.rfind(':');
  if (colon == std::string::npos) throw UsageError("--listen expects host:port");
  const auto host = a.listen.substr(0, colon);
  const auto port = static_cast<std::uint16_t>(std::stoul(a.listen.substr(colon + 1)));
  return serve_mock_tcp(script, host, port, [&](std::uint16_t bound) {
    std::cout << "listening " << host << ":" << bound << std::endl;
  });
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("topicpages"));

  CLI::App app{"Topic page pipeline: ingest, annotate, rank and render."};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse a directory of documents into corpus JSONL");
  c_ingest->add_option("dir", ingest.dir, "Input directory")->required();
  c_ingest->add_option("--format", ingest.format, "xml or plain")->check(CLI::IsMember({"xml", "plain"}));
  c_ingest->add_option("--out", ingest.out, "Corpus JSONL output");
  c_ingest->add_option("--domain", ingest.domain, "Domain when the markup gives none");
  c_ingest->add_option("--source-kind", ingest.source_kind, "journal-article, book-chapter or plain-text");

  AnnotateArgs annotate;
  auto* c_annotate = app.add_subcommand("annotate", "Annotate a corpus against a taxonomy");
  c_annotate->add_option("--taxonomy", annotate.taxonomy, "Taxonomy TSV")->required();
  c_annotate->add_option("--corpus", annotate.corpus, "Corpus JSONL");
  c_annotate->add_option("--out", annotate.out, "Annotation JSONL output");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train-baseline", "Fit the logistic baseline scorer");
  c_train->add_option("labeled", train.labeled, "Labeled JSONL")->required();
  c_train->add_option("--out", train.out, "Model JSON output");
  c_train->add_option("--epochs", train.epochs)->check(CLI::NonNegativeNumber);
  c_train->add_option("--lr", train.lr)->check(CLI::PositiveNumber);

  EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Stratified k-fold evaluation of the baseline");
  c_eval->add_option("--dataset", evaluate.dataset, "wcl or jsonl")->check(CLI::IsMember({"wcl", "jsonl"}));
  c_eval->add_option("--path", evaluate.path, "Dataset path (wcl: defaults to $TOPICPAGES_WCL_DIR)");
  c_eval->add_option("--folds", evaluate.folds)->check(CLI::Range(2, 1000));
  c_eval->add_option("--seed", evaluate.seed);
  c_eval->add_option("--epochs", evaluate.epochs)->check(CLI::NonNegativeNumber);
  c_eval->add_option("--lr", evaluate.lr)->check(CLI::PositiveNumber);
  c_eval->add_option("--threshold", evaluate.threshold)->check(CLI::Range(0.0, 1.0));

  BuildArgs build;
  auto* c_build = app.add_subcommand("build-pages", "Assemble topic pages");
  c_build->add_option("--scorer", build.scorer, "baseline or bridge")->check(CLI::IsMember({"baseline", "bridge"}));
  c_build->add_option("--out", build.out, "Pages JSONL output");
  c_build->add_option("--corpus", build.corpus, "Corpus JSONL");
  c_build->add_option("--taxonomy", build.taxonomy, "Taxonomy TSV")->required();
  c_build->add_option("--annotations", build.annotations, "Annotation JSONL (annotated on the fly if absent)");
  c_build->add_option("--model", build.model, "Baseline model JSON");
  c_build->add_option("--train", build.train, "Labeled JSONL to fit the baseline from");
  c_build->add_option("--config", build.config, "key=value config file");
  c_build->add_option("--endpoint", build.endpoint, "Bridge endpoint: command or host:port");
  c_build->add_option("--domains", build.domains, "Comma-separated domain filter");
  c_build->add_option("--snippets-k", build.snippets_k)->check(CLI::PositiveNumber);
  c_build->add_option("--related-k", build.related_k)->check(CLI::PositiveNumber);
  c_build->add_option("--threshold", build.threshold)->check(CLI::Range(0.0, 1.0));
  c_build->add_option("--timestamp", build.timestamp, "Epoch seconds or literal; default $SOURCE_DATE_EPOCH");
  c_build->add_option("--handshake-timeout-ms", build.handshake_timeout_ms)->check(CLI::PositiveNumber);
  c_build->add_option("--batch-timeout-ms", build.batch_timeout_ms)->check(CLI::PositiveNumber);

  RenderArgs render;
  auto* c_render = app.add_subcommand("render-html", "Render pages JSONL to static HTML");
  c_render->add_option("pages", render.pages, "Pages JSONL")->required();
  c_render->add_option("--out", render.out, "Output directory");

  MockArgs mock;
  auto* c_mock = app.add_subcommand("mock-scorer", "Scripted bridge server (stdio, or TCP with --listen)");
  c_mock->add_option("--script", mock.script, "Mock script JSON")->required();
  c_mock->add_option("--listen", mock.listen, "host:port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  const auto level = spdlog::level::from_str(log_level);
  spdlog::set_level(level);

  try {
    if (*c_ingest) return run_ingest(ingest);
    if (*c_annotate) return run_annotate(annotate);
    if (*c_train) return run_train(train);
    if (*c_eval) return run_evaluate(evaluate);
    if (*c_build) return run_build(build);
    if (*c_render) return run_render(render);
    if (*c_mock) return run_mock(mock);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return static_cast<int>(e.kind());
  } catch (const nlohmann::json::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 1;
}
