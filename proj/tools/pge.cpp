#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pge/checkpoint.hpp"
#include "pge/config.hpp"
#include "pge/errors.hpp"
#include "pge/metrics.hpp"
#include "pge/sampling.hpp"
#include "pge/synth.hpp"
#include "pge/timing.hpp"
#include "pge/trainer.hpp"

namespace fs = std::filesystem;
using namespace pge;

namespace {

int env_thread_cap() {
  const char* env = std::getenv("PGE_THREADS");
  if (env == nullptr) return 0;
  const int n = std::atoi(env);
  return n > 0 ? n : 0;
}

int resolve_threads(int configured) {
  const int cap = env_thread_cap();
  if (cap == 0) return configured;
  if (configured == 0) return cap;
  return std::min(configured, cap);
}

std::unordered_set<std::string> stopwords_from(const std::string& path) {
  if (path.empty()) return {};
  return load_stopwords(path);
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream is(csv);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::string format_score(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool deterministic = false;
  int threads = 0;
};

RunConfig load_and_resolve(const CommonFlags& common) {
  RunConfig cfg = parse_run_config_file(common.config_path);
  if (common.seed_set) cfg.train.seed = common.seed;
  if (common.deterministic) cfg.train.deterministic = true;
  if (!common.out_dir.empty()) cfg.out_dir = common.out_dir;
  if (common.threads > 0) cfg.train.threads = common.threads;
  cfg.train.threads = resolve_threads(cfg.train.threads);
  const std::string problems = validate_run_config(cfg);
  if (!problems.empty()) throw ValidationError(problems);
  return cfg;
}

void require_file(const std::string& path) {
  if (!fs::exists(path)) throw DataError("file not found: " + path);
}

int cmd_train(const CommonFlags& common) {
  RunConfig cfg = load_and_resolve(common);
  require_file(cfg.train_path);
  const auto stopwords = stopwords_from(cfg.stopword_path);
  const ProductGraph graph = load_triples(cfg.train_path, stopwords);
  std::vector<RawTriple> valid;
  if (!cfg.valid_path.empty()) {
    require_file(cfg.valid_path);
    valid = read_raw_triples(cfg.valid_path);
  }
  Matrix pretrained;
  const Matrix* pretrained_ptr = nullptr;
  if (!cfg.word_vector_path.empty()) {
    require_file(cfg.word_vector_path);
    RngStream wv_rng(splitmix64(cfg.train.seed + 21));
    pretrained = load_word_vectors(cfg.word_vector_path, graph.vocab(),
                                   cfg.model.encoder.d_word, wv_rng);
    pretrained_ptr = &pretrained;
  }

  const std::string echo = echo_config(cfg);
  TrainResult result = train(graph, cfg.model, cfg.train, valid, echo, pretrained_ptr);

  fs::create_directories(cfg.out_dir);
  save_checkpoint(result.checkpoint, cfg.out_dir + "/checkpoint.bin");
  write_epoch_log(result.log, cfg.out_dir + "/epoch_log.csv");
  std::ofstream echo_out(cfg.out_dir + "/config_echo.txt");
  echo_out << echo;

  if (!result.numeric_fault.empty()) {
    std::cerr << "numeric fault: " << result.numeric_fault
              << " (last good checkpoint retained)\n";
    return 3;
  }
  std::cout << "trained " << result.log.size() << " epochs; checkpoint at " << cfg.out_dir
            << "/checkpoint.bin\n";
  return 0;
}

struct DetectFlags {
  std::string checkpoint, triples, valid_path, out_dir = ".";
  double theta = std::numeric_limits<double>::quiet_NaN();
  bool theta_set = false;
  int threads = 0;
};

// Empty input file -> empty output, exit success (detect contract).
std::vector<RawTriple> read_raw_triples_allow_empty(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw DataError("cannot open triple file: " + path);
  if (probe.peek() == EOF) return {};
  probe.close();
  return read_raw_triples(path);
}

int cmd_detect(const DetectFlags& flags) {
  const auto ckpt = load_checkpoint(flags.checkpoint);
  const auto triples = read_raw_triples_allow_empty(flags.triples);
  double theta;
  if (flags.theta_set) {
    theta = flags.theta;
  } else if (!flags.valid_path.empty()) {
    const auto valid = read_raw_triples(flags.valid_path);
    const auto vscores = score_raw_triples(ckpt, valid, resolve_threads(flags.threads));
    std::vector<ScoredTriple> scored(valid.size());
    for (std::size_t i = 0; i < valid.size(); ++i) scored[i] = {valid[i], vscores[i], valid[i].label};
    theta = select_threshold(scored);
  } else {
    throw ValidationError("detect needs --theta or --valid");
  }

  const auto scores = score_raw_triples(ckpt, triples, resolve_threads(flags.threads));
  std::vector<std::size_t> order(triples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return scores[i] < scores[j]; });

  fs::create_directories(flags.out_dir);
  const std::string out_path = flags.out_dir + "/detections.tsv";
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write detections: " + out_path);
  for (std::size_t i : order) {
    out << format_score(scores[i]) << '\t' << (scores[i] > theta ? "correct" : "incorrect")
        << '\t' << triples[i].title << '\t' << triples[i].attribute << '\t' << triples[i].value
        << '\n';
  }
  std::cout << "scored " << triples.size() << " triples with theta " << theta << " -> "
            << out_path << "\n";
  return 0;
}

struct EvalFlags {
  std::string checkpoint, test_path, scores_path, valid_path, out_dir = ".";
  std::string positive_class = "incorrect";
  std::string p_levels = "0.6,0.7,0.8,0.9";
  double theta = std::numeric_limits<double>::quiet_NaN();
  bool theta_set = false;
  int threads = 0;
};

std::vector<ScoredTriple> read_score_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scores file: " + path);
  std::vector<ScoredTriple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    double score;
    int label;
    if (!(is >> score >> label) || (label != 0 && label != 1)) {
      throw DataError("scores file line " + std::to_string(line_no) +
                      ": expected `score label(0|1)`");
    }
    ScoredTriple s;
    s.score = score;
    s.gold = label == 1 ? Label::correct : Label::incorrect;
    out.push_back(s);
  }
  return out;
}

int cmd_eval(const EvalFlags& flags) {
  std::vector<ScoredTriple> scored;
  ModelCheckpoint ckpt;
  bool have_ckpt = false;
  if (!flags.scores_path.empty()) {
    scored = read_score_label_file(flags.scores_path);
  } else {
    if (flags.checkpoint.empty() || flags.test_path.empty()) {
      throw ValidationError("eval needs --scores, or --checkpoint with --test");
    }
    ckpt = load_checkpoint(flags.checkpoint);
    have_ckpt = true;
    const auto test = read_raw_triples(flags.test_path);
    const auto scores = score_raw_triples(ckpt, test, resolve_threads(flags.threads));
    scored.resize(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) scored[i] = {test[i], scores[i], test[i].label};
  }

  PositiveClass positive;
  if (flags.positive_class == "incorrect") {
    positive = PositiveClass::incorrect;
  } else if (flags.positive_class == "correct") {
    positive = PositiveClass::correct;
  } else {
    throw ValidationError("positive-class must be incorrect or correct");
  }

  EvalReport report = pr_metrics(scored, positive, parse_double_list(flags.p_levels));
  if (flags.theta_set) {
    report.theta = flags.theta;
    report.accuracy = accuracy_at(scored, report.theta);
  } else if (!flags.valid_path.empty()) {
    if (!have_ckpt) throw ValidationError("--valid needs --checkpoint to score it");
    const auto valid = read_raw_triples(flags.valid_path);
    const auto vscores = score_raw_triples(ckpt, valid, resolve_threads(flags.threads));
    std::vector<ScoredTriple> vscored(valid.size());
    for (std::size_t i = 0; i < valid.size(); ++i) vscored[i] = {valid[i], vscores[i], valid[i].label};
    report.theta = select_threshold(vscored);
    report.accuracy = accuracy_at(scored, report.theta);
  }

  fs::create_directories(flags.out_dir);
  write_pr_curve_csv(report, flags.out_dir + "/pr_curve.csv");
  const std::string text = format_eval_report(report);
  std::ofstream rep(flags.out_dir + "/report.txt");
  rep << text;
  std::cout << text;
  return 0;
}

struct SynthFlags {
  std::string out_dir = ".";
  int n_products = 200;
  double noise = 0.1;
  int n_valid = 120;
  int n_test = 180;
  std::uint64_t seed = 7;
};

int cmd_synth(const SynthFlags& flags) {
  SynthSpec spec;
  spec.n_products = flags.n_products;
  spec.noise_ratio = flags.noise;
  spec.n_valid = flags.n_valid;
  spec.n_test = flags.n_test;
  spec.seed = flags.seed;
  SynthResult result = generate_synth(spec);

  fs::create_directories(flags.out_dir);
  save_triples(result.train, flags.out_dir + "/train.tsv");
  write_raw_triples(result.valid, flags.out_dir + "/valid.tsv");
  write_raw_triples(result.test, flags.out_dir + "/test.tsv");
  save_corruption_log(result.log, result.train.attributes(), flags.out_dir + "/corruption_log.tsv");
  std::cout << "synth: " << result.train.triples().size() << " train triples ("
            << result.log.size() << " corrupted), " << result.valid.size() << " valid, "
            << result.test.size() << " test -> " << flags.out_dir << "\n";
  return 0;
}

struct NoiseFlags {
  std::string in_path, stopword_path, out_dir = ".";
  double ratio = 0.1;
  std::string mode = "value";
  std::uint64_t seed = 42;
};

int cmd_inject_noise(const NoiseFlags& flags) {
  const auto graph = load_triples(flags.in_path, stopwords_from(flags.stopword_path));
  NoiseMode mode;
  if (flags.mode == "value") {
    mode = NoiseMode::value_only;
  } else if (flags.mode == "head-or-tail") {
    mode = NoiseMode::head_or_tail;
  } else {
    throw ValidationError("mode must be value or head-or-tail");
  }
  RngStream rng(splitmix64(flags.seed));
  NoiseResult result = inject_noise(graph, flags.ratio, rng, mode);
  fs::create_directories(flags.out_dir);
  save_triples(result.graph, flags.out_dir + "/noisy.tsv");
  save_corruption_log(result.log, result.graph.attributes(), flags.out_dir + "/corruption_log.tsv");
  std::cout << "injected " << result.log.size() << " corruptions -> " << flags.out_dir << "\n";
  return 0;
}

struct SplitFlags {
  std::string train_path, test_path, stopword_path, out_dir = ".";
};

int cmd_split_inductive(const SplitFlags& flags) {
  const auto graph = load_triples(flags.train_path, stopwords_from(flags.stopword_path));
  const auto test = read_raw_triples(flags.test_path);
  const ProductGraph filtered = build_inductive_split(graph, test);
  fs::create_directories(flags.out_dir);
  if (filtered.triples().empty()) {
    std::ofstream out(flags.out_dir + "/train_inductive.tsv");  // empty output
  } else {
    save_triples(filtered, flags.out_dir + "/train_inductive.tsv");
  }
  std::cout << "kept " << filtered.triples().size() << " of " << graph.triples().size()
            << " training triples\n";
  return 0;
}

struct FuseFlags {
  std::string ranks_a, ranks_b, out_dir = ".";
  bool ascending = false;
};

int cmd_fuse(const FuseFlags& flags) {
  const auto a = read_rank_file(flags.ranks_a);
  const auto b = read_rank_file(flags.ranks_b);
  const auto fused = fuse_ranks(a, b, !flags.ascending);
  fs::create_directories(flags.out_dir);
  write_fused(fused, flags.out_dir + "/fused.tsv");
  std::cout << "fused " << fused.size() << " triples -> " << flags.out_dir << "/fused.tsv\n";
  return 0;
}

struct ConfFlags {
  std::string checkpoint, train_path, stopword_path, log_path, out_dir = ".";
};

int cmd_confidence(const ConfFlags& flags) {
  const auto ckpt = load_checkpoint(flags.checkpoint);

  std::string train_path = flags.train_path;
  std::string stopword_path = flags.stopword_path;
  if (train_path.empty() && !ckpt.config_echo.empty()) {
    const RunConfig echoed = parse_run_config_text(ckpt.config_echo);
    train_path = echoed.train_path;
    if (stopword_path.empty()) stopword_path = echoed.stopword_path;
  }
  if (train_path.empty()) {
    throw ValidationError("confidence needs --train (checkpoint carries no config echo)");
  }
  const auto graph = load_triples(train_path, stopwords_from(stopword_path));
  if (graph.triples().size() != ckpt.confidence.size()) {
    throw DataError("training file does not match checkpoint confidence table size");
  }

  std::vector<bool> corrupt(graph.triples().size(), false);
  if (!flags.log_path.empty()) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < graph.triples().size(); ++i) {
      const auto& t = graph.triples()[i];
      index[t.title_text + '\t' + graph.attributes()[t.attribute_id] + '\t' + t.value_text] = i;
    }
    for (const auto& row : read_corruption_log(flags.log_path)) {
      const std::string title = row.corrupt_title.empty() ? row.orig_title : row.corrupt_title;
      const std::string value = row.corrupt_title.empty() ? row.corrupt_value : row.orig_value;
      auto it = index.find(title + '\t' + row.attribute + '\t' + value);
      if (it == index.end()) {
        throw DataError("corruption log entry not found in training graph: " + title);
      }
      corrupt[it->second] = true;
    }
  }

  const ConfidenceReport report = confidence_report(ckpt.confidence, corrupt);
  fs::create_directories(flags.out_dir);
  write_confidence_csv(report, flags.out_dir + "/confidence_hist.csv");
  const std::string text = format_confidence_report(report);
  std::ofstream stats(flags.out_dir + "/confidence_stats.txt");
  stats << text;
  std::cout << text;
  return 0;
}

struct TimeFlags {
  CommonFlags common;
  std::string ratios = "0.1,0.3,0.5,0.7,1.0";
};

int cmd_time(const TimeFlags& flags) {
  RunConfig cfg = load_and_resolve(flags.common);
  require_file(cfg.train_path);
  const auto graph = load_triples(cfg.train_path, stopwords_from(cfg.stopword_path));
  const auto rows = time_training(graph, cfg.model, cfg.train, parse_double_list(flags.ratios));
  fs::create_directories(cfg.out_dir);
  write_time_table(rows, cfg.out_dir + "/time_table.csv");
  for (const auto& [ratio, seconds] : rows) {
    std::cout << "ratio " << ratio << ": " << seconds << " s\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise-tolerant product-graph embeddings for attribute-triple error detection"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a config file");
  train_cmd->add_option("--config", train_flags.config_path, "key=value config file")->required();
  train_cmd->add_option("--seed", train_flags.seed, "override config seed")
      ->each([&](const std::string&) { train_flags.seed_set = true; });
  train_cmd->add_flag("--deterministic", train_flags.deterministic, "force deterministic mode");
  train_cmd->add_option("--out", train_flags.out_dir, "override output directory");
  train_cmd->add_option("--threads", train_flags.threads, "worker cap (also PGE_THREADS)");

  DetectFlags detect_flags;
  auto* detect_cmd = app.add_subcommand("detect", "Score triples and rank suspected errors");
  detect_cmd->add_option("--checkpoint", detect_flags.checkpoint)->required();
  detect_cmd->add_option("--triples", detect_flags.triples)->required();
  detect_cmd->add_option("--theta", detect_flags.theta, "explicit threshold")
      ->each([&](const std::string&) { detect_flags.theta_set = true; });
  detect_cmd->add_option("--valid", detect_flags.valid_path, "labeled file for threshold selection");
  detect_cmd->add_option("--out", detect_flags.out_dir);
  detect_cmd->add_option("--threads", detect_flags.threads);

  EvalFlags eval_flags;
  auto* eval_cmd = app.add_subcommand("eval", "PR AUC / R@P report for labeled triples");
  eval_cmd->add_option("--checkpoint", eval_flags.checkpoint);
  eval_cmd->add_option("--test", eval_flags.test_path, "labeled triple TSV");
  eval_cmd->add_option("--scores", eval_flags.scores_path, "precomputed `score label` file");
  eval_cmd->add_option("--valid", eval_flags.valid_path, "labeled file for threshold selection");
  eval_cmd->add_option("--theta", eval_flags.theta, "explicit threshold")
      ->each([&](const std::string&) { eval_flags.theta_set = true; });
  eval_cmd->add_option("--positive-class", eval_flags.positive_class, "incorrect|correct");
  eval_cmd->add_option("--p-levels", eval_flags.p_levels, "comma-separated precision targets");
  eval_cmd->add_option("--out", eval_flags.out_dir);
  eval_cmd->add_option("--threads", eval_flags.threads);

  SynthFlags synth_flags;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a rule-based synthetic product graph");
  synth_cmd->add_option("--out", synth_flags.out_dir);
  synth_cmd->add_option("--n-products", synth_flags.n_products);
  synth_cmd->add_option("--noise", synth_flags.noise);
  synth_cmd->add_option("--n-valid", synth_flags.n_valid);
  synth_cmd->add_option("--n-test", synth_flags.n_test);
  synth_cmd->add_option("--seed", synth_flags.seed);

  NoiseFlags noise_flags;
  auto* noise_cmd = app.add_subcommand("inject-noise", "Add corrupted triples to a TSV");
  noise_cmd->add_option("--in", noise_flags.in_path)->required();
  noise_cmd->add_option("--ratio", noise_flags.ratio);
  noise_cmd->add_option("--mode", noise_flags.mode, "value|head-or-tail");
  noise_cmd->add_option("--seed", noise_flags.seed);
  noise_cmd->add_option("--stopwords", noise_flags.stopword_path);
  noise_cmd->add_option("--out", noise_flags.out_dir);

  SplitFlags split_flags;
  auto* split_cmd = app.add_subcommand("split-inductive", "Drop training triples sharing entities with a test set");
  split_cmd->add_option("--train", split_flags.train_path)->required();
  split_cmd->add_option("--test", split_flags.test_path)->required();
  split_cmd->add_option("--stopwords", split_flags.stopword_path);
  split_cmd->add_option("--out", split_flags.out_dir);

  FuseFlags fuse_flags;
  auto* fuse_cmd = app.add_subcommand("fuse", "Reciprocal-rank fusion of two rankings");
  fuse_cmd->add_option("--ranks-a", fuse_flags.ranks_a)->required();
  fuse_cmd->add_option("--ranks-b", fuse_flags.ranks_b)->required();
  fuse_cmd->add_flag("--ascending", fuse_flags.ascending,
                     "sort ascending by R_avg (the paper's literal sentence)");
  fuse_cmd->add_option("--out", fuse_flags.out_dir);

  ConfFlags conf_flags;
  auto* conf_cmd = app.add_subcommand("confidence", "Confidence-score distribution report");
  conf_cmd->add_option("--checkpoint", conf_flags.checkpoint)->required();
  conf_cmd->add_option("--train", conf_flags.train_path, "training TSV (default: from config echo)");
  conf_cmd->add_option("--stopwords", conf_flags.stopword_path);
  conf_cmd->add_option("--log", conf_flags.log_path, "corruption log TSV");
  conf_cmd->add_option("--out", conf_flags.out_dir);

  TimeFlags time_flags;
  auto* time_cmd = app.add_subcommand("time", "Training-time table over triple subsamples");
  time_cmd->add_option("--config", time_flags.common.config_path)->required();
  time_cmd->add_option("--ratios", time_flags.ratios);
  time_cmd->add_option("--out", time_flags.common.out_dir);
  time_cmd->add_option("--seed", time_flags.common.seed)
      ->each([&](const std::string&) { time_flags.common.seed_set = true; });

  try {
    app.parse(argc, argv);
    if (train_cmd->parsed()) return cmd_train(train_flags);
    if (detect_cmd->parsed()) return cmd_detect(detect_flags);
    if (eval_cmd->parsed()) return cmd_eval(eval_flags);
    if (synth_cmd->parsed()) return cmd_synth(synth_flags);
    if (noise_cmd->parsed()) return cmd_inject_noise(noise_flags);
    if (split_cmd->parsed()) return cmd_split_inductive(split_flags);
    if (fuse_cmd->parsed()) return cmd_fuse(fuse_flags);
    if (conf_cmd->parsed()) return cmd_confidence(conf_flags);
    if (time_cmd->parsed()) return cmd_time(time_flags);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
