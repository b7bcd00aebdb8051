#include "pge/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pge/errors.hpp"

namespace pge {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

bool parse_bool(const std::string& v, std::string& err) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  err = "expected 0/1/true/false, got '" + v + "'";
  return false;
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
  RunConfig cfg;
  std::vector<std::string> problems;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  auto to_double = [&](const std::string& v, double& out) {
    try {
      std::size_t used = 0;
      out = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument("");
      return true;
    } catch (...) {
      problems.push_back("line " + std::to_string(line_no) + ": unreadable number '" + v + "'");
      return false;
    }
  };
  auto to_int = [&](const std::string& v, int& out) {
    try {
      std::size_t used = 0;
      out = std::stoi(v, &used);
      if (used != v.size()) throw std::invalid_argument("");
      return true;
    } catch (...) {
      problems.push_back("line " + std::to_string(line_no) + ": unreadable integer '" + v + "'");
      return false;
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(line_no) + ": expected key=value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::string bool_err;

    if (key == "train_path") {
      cfg.train_path = value;
    } else if (key == "valid_path") {
      cfg.valid_path = value;
    } else if (key == "test_path") {
      cfg.test_path = value;
    } else if (key == "stopword_path") {
      cfg.stopword_path = value;
    } else if (key == "word_vector_path") {
      cfg.word_vector_path = value;
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "embedding_mode") {
      if (value == "text") {
        cfg.model.mode = EmbeddingMode::text_cnn;
      } else if (value == "entity-id") {
        cfg.model.mode = EmbeddingMode::entity_id;
      } else {
        problems.push_back("embedding_mode must be text or entity-id, got '" + value + "'");
      }
    } else if (key == "score_kind") {
      if (value == "transe") {
        cfg.model.score.kind = ScoreKind::transe;
      } else if (value == "rotate") {
        cfg.model.score.kind = ScoreKind::rotate;
      } else {
        problems.push_back("score_kind must be transe or rotate, got '" + value + "'");
      }
    } else if (key == "norm_kind") {
      if (value == "l1") {
        cfg.model.score.norm = NormKind::l1;
      } else if (value == "l2") {
        cfg.model.score.norm = NormKind::l2;
      } else {
        problems.push_back("norm_kind must be l1 or l2, got '" + value + "'");
      }
    } else if (key == "squared") {
      cfg.model.score.squared = parse_bool(value, bool_err);
    } else if (key == "gamma") {
      to_double(value, cfg.model.score.gamma);
    } else if (key == "d_word") {
      to_int(value, cfg.model.encoder.d_word);
    } else if (key == "d_embed") {
      to_int(value, cfg.model.encoder.d_embed);
    } else if (key == "n_filters") {
      to_int(value, cfg.model.encoder.n_filters);
    } else if (key == "filter_widths") {
      std::vector<int> widths;
      std::istringstream ws(value);
      std::string item;
      bool ok = true;
      while (std::getline(ws, item, ',')) {
        try {
          widths.push_back(std::stoi(trim(item)));
        } catch (...) {
          problems.push_back("filter_widths: unreadable entry '" + item + "'");
          ok = false;
        }
      }
      if (ok) cfg.model.encoder.filter_widths = widths;
    } else if (key == "max_len") {
      to_int(value, cfg.model.encoder.max_len);
    } else if (key == "finetune_word_embeddings") {
      cfg.model.encoder.finetune_words = parse_bool(value, bool_err);
    } else if (key == "learning_rate") {
      to_double(value, cfg.train.learning_rate);
    } else if (key == "k_neg") {
      to_int(value, cfg.train.k_neg);
    } else if (key == "batch_size") {
      to_int(value, cfg.train.batch_size);
    } else if (key == "epochs") {
      to_int(value, cfg.train.epochs);
    } else if (key == "alpha") {
      to_double(value, cfg.train.alpha);
    } else if (key == "beta") {
      to_double(value, cfg.train.beta);
    } else if (key == "noise_aware") {
      cfg.train.noise_aware = parse_bool(value, bool_err);
    } else if (key == "freeze_confidence") {
      cfg.train.freeze_confidence = parse_bool(value, bool_err);
    } else if (key == "neg_filtered") {
      cfg.train.neg_filtered = parse_bool(value, bool_err);
    } else if (key == "seed") {
      try {
        cfg.train.seed = std::stoull(value);
      } catch (...) {
        problems.push_back("seed: unreadable integer '" + value + "'");
      }
    } else if (key == "deterministic") {
      cfg.train.deterministic = parse_bool(value, bool_err);
    } else if (key == "adam_beta1") {
      to_double(value, cfg.train.adam_beta1);
    } else if (key == "adam_beta2") {
      to_double(value, cfg.train.adam_beta2);
    } else if (key == "adam_eps") {
      to_double(value, cfg.train.adam_eps);
    } else if (key == "threads") {
      to_int(value, cfg.train.threads);
    } else if (key == "exec") {
      if (value == "serial") {
        cfg.train.exec = ExecMode::serial;
      } else if (value == "parallel") {
        cfg.train.exec = ExecMode::parallel;
      } else {
        problems.push_back("exec must be serial or parallel, got '" + value + "'");
      }
    } else {
      problems.push_back("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!bool_err.empty()) problems.push_back(key + ": " + bool_err);
  }

  if (!problems.empty()) {
    std::string msg = "config errors:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
  return cfg;
}

RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config_text(ss.str());
}

std::string validate_run_config(const RunConfig& cfg) {
  std::vector<std::string> problems;
  const auto& enc = cfg.model.encoder;
  if (cfg.train_path.empty()) problems.push_back("train_path is required");
  if (!(cfg.train.learning_rate > 0.0)) problems.push_back("learning_rate must be > 0");
  if (!(cfg.model.score.gamma > 0.0)) problems.push_back("gamma must be > 0");
  if (cfg.train.k_neg < 1) problems.push_back("k_neg must be >= 1");
  if (cfg.train.batch_size < 1) problems.push_back("batch_size must be >= 1");
  if (cfg.train.epochs < 0) problems.push_back("epochs must be >= 0");
  if (cfg.train.alpha < 0.0) problems.push_back("alpha must be >= 0");
  if (cfg.train.beta < 0.0) problems.push_back("beta must be >= 0");
  if (enc.d_word < 1) problems.push_back("d_word must be >= 1");
  if (enc.d_embed < 1) problems.push_back("d_embed must be >= 1");
  if (enc.max_len < 1) problems.push_back("max_len must be >= 1");
  if (enc.n_filters < 0) problems.push_back("n_filters must be >= 0 (0 = derive from d_embed)");
  if (enc.filter_widths.size() != 3) {
    problems.push_back("filter_widths must list exactly 3 widths");
  } else {
    std::set<int> distinct(enc.filter_widths.begin(), enc.filter_widths.end());
    if (distinct.size() != 3) problems.push_back("filter_widths must be pairwise distinct");
    for (int w : enc.filter_widths) {
      if (w < 1) problems.push_back("filter widths must be >= 1");
    }
    if (*std::max_element(enc.filter_widths.begin(), enc.filter_widths.end()) > enc.max_len) {
      problems.push_back("max filter width must not exceed max_len");
    }
  }
  if (cfg.model.score.kind == ScoreKind::rotate && enc.d_embed % 2 != 0) {
    problems.push_back("RotatE requires an even d_embed");
  }
  if (!(cfg.train.adam_beta1 > 0.0 && cfg.train.adam_beta1 < 1.0))
    problems.push_back("adam_beta1 must be in (0, 1)");
  if (!(cfg.train.adam_beta2 > 0.0 && cfg.train.adam_beta2 < 1.0))
    problems.push_back("adam_beta2 must be in (0, 1)");
  if (!(cfg.train.adam_eps > 0.0)) problems.push_back("adam_eps must be > 0");
  if (cfg.train.threads < 0) problems.push_back("threads must be >= 0");

  if (problems.empty()) return "";
  std::string msg = "config errors:";
  for (const auto& p : problems) msg += "\n  - " + p;
  return msg;
}

std::string echo_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "train_path=" << cfg.train_path << "\n";
  os << "valid_path=" << cfg.valid_path << "\n";
  os << "test_path=" << cfg.test_path << "\n";
  os << "stopword_path=" << cfg.stopword_path << "\n";
  os << "word_vector_path=" << cfg.word_vector_path << "\n";
  os << "out_dir=" << cfg.out_dir << "\n";
  os << "embedding_mode=" << (cfg.model.mode == EmbeddingMode::text_cnn ? "text" : "entity-id")
     << "\n";
  os << "score_kind=" << (cfg.model.score.kind == ScoreKind::transe ? "transe" : "rotate") << "\n";
  os << "norm_kind=" << (cfg.model.score.norm == NormKind::l1 ? "l1" : "l2") << "\n";
  os << "squared=" << (cfg.model.score.squared ? 1 : 0) << "\n";
  os << "gamma=" << fmt_double(cfg.model.score.gamma) << "\n";
  os << "d_word=" << cfg.model.encoder.d_word << "\n";
  os << "d_embed=" << cfg.model.encoder.d_embed << "\n";
  os << "n_filters=" << cfg.model.encoder.n_filters << "\n";
  os << "filter_widths=";
  for (std::size_t i = 0; i < cfg.model.encoder.filter_widths.size(); ++i) {
    if (i > 0) os << ',';
    os << cfg.model.encoder.filter_widths[i];
  }
  os << "\n";
  os << "max_len=" << cfg.model.encoder.max_len << "\n";
  os << "finetune_word_embeddings=" << (cfg.model.encoder.finetune_words ? 1 : 0) << "\n";
  os << "learning_rate=" << fmt_double(cfg.train.learning_rate) << "\n";
  os << "k_neg=" << cfg.train.k_neg << "\n";
  os << "batch_size=" << cfg.train.batch_size << "\n";
  os << "epochs=" << cfg.train.epochs << "\n";
  os << "alpha=" << fmt_double(cfg.train.alpha) << "\n";
  os << "beta=" << fmt_double(cfg.train.beta) << "\n";
  os << "noise_aware=" << (cfg.train.noise_aware ? 1 : 0) << "\n";
  os << "freeze_confidence=" << (cfg.train.freeze_confidence ? 1 : 0) << "\n";
  os << "neg_filtered=" << (cfg.train.neg_filtered ? 1 : 0) << "\n";
  os << "seed=" << cfg.train.seed << "\n";
  os << "deterministic=" << (cfg.train.deterministic ? 1 : 0) << "\n";
  os << "adam_beta1=" << fmt_double(cfg.train.adam_beta1) << "\n";
  os << "adam_beta2=" << fmt_double(cfg.train.adam_beta2) << "\n";
  os << "adam_eps=" << fmt_double(cfg.train.adam_eps) << "\n";
  os << "threads=" << cfg.train.threads << "\n";
  os << "exec=" << (cfg.train.exec == ExecMode::serial ? "serial" : "parallel") << "\n";
  return os.str();
}

}  // namespace pge
