#include "pge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "pge/errors.hpp"

namespace pge {

namespace {

void require_labeled(const ScoredTriple& s) {
  if (s.gold == Label::unlabeled) throw DataError("scored set contains unlabeled triples");
}

std::string triple_key(const RawTriple& t) {
  return t.title + '\t' + t.attribute + '\t' + t.value;
}

}  // namespace

double select_threshold(const std::vector<ScoredTriple>& valid) {
  std::vector<const ScoredTriple*> labeled;
  std::size_t n_correct = 0, n_incorrect = 0;
  for (const auto& s : valid) {
    if (s.gold == Label::unlabeled) continue;
    labeled.push_back(&s);
    (s.gold == Label::correct ? n_correct : n_incorrect) += 1;
  }
  if (n_correct == 0 || n_incorrect == 0) {
    throw DataError("degenerate validation set: need at least one triple of each class");
  }

  std::vector<double> scores;
  scores.reserve(labeled.size());
  for (const auto* s : labeled) scores.push_back(s->score);
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

  std::vector<double> candidates;
  candidates.push_back(scores.front() - 1.0);
  for (std::size_t i = 0; i + 1 < scores.size(); ++i) {
    candidates.push_back((scores[i] + scores[i + 1]) / 2.0);
  }
  candidates.push_back(scores.back() + 1.0);

  double best_theta = candidates.front();
  double best_acc = -1.0;
  for (double theta : candidates) {
    std::size_t hits = 0;
    for (const auto* s : labeled) {
      const bool predicted_correct = s->score > theta;
      const bool is_correct = s->gold == Label::correct;
      if (predicted_correct == is_correct) ++hits;
    }
    const double acc = static_cast<double>(hits) / static_cast<double>(labeled.size());
    if (acc >= best_acc) {  // candidates ascend, so >= keeps the larger theta
      best_acc = acc;
      best_theta = theta;
    }
  }
  return best_theta;
}

double accuracy_at(const std::vector<ScoredTriple>& labeled, double theta) {
  std::size_t hits = 0, total = 0;
  for (const auto& s : labeled) {
    if (s.gold == Label::unlabeled) continue;
    ++total;
    const bool predicted_correct = s.score > theta;
    if (predicted_correct == (s.gold == Label::correct)) ++hits;
  }
  if (total == 0) throw DataError("accuracy_at: no labeled triples");
  return static_cast<double>(hits) / static_cast<double>(total);
}

EvalReport pr_metrics(const std::vector<ScoredTriple>& test, PositiveClass positive,
                      const std::vector<double>& p_levels) {
  for (const auto& s : test) require_labeled(s);
  const Label positive_label = positive == PositiveClass::incorrect ? Label::incorrect : Label::correct;
  std::size_t n_pos = 0;
  for (const auto& s : test) n_pos += s.gold == positive_label ? 1 : 0;
  if (n_pos == 0) throw DataError("pr_metrics: no positive-class triples in the test set");

  std::vector<std::size_t> order(test.size());
  std::iota(order.begin(), order.end(), 0);
  if (positive == PositiveClass::incorrect) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return test[i].score < test[j].score; });
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return test[i].score > test[j].score; });
  }

  EvalReport report;
  report.curve.reserve(test.size());
  double ap_sum = 0.0;
  std::size_t pos_seen = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const bool is_pos = test[order[k]].gold == positive_label;
    if (is_pos) ++pos_seen;
    const double precision = static_cast<double>(pos_seen) / static_cast<double>(k + 1);
    const double recall = static_cast<double>(pos_seen) / static_cast<double>(n_pos);
    if (is_pos) ap_sum += precision;
    report.curve.push_back({k + 1, precision, recall});
  }
  report.pr_auc = ap_sum / static_cast<double>(n_pos);

  for (double target : p_levels) {
    double best_recall = 0.0;
    for (const auto& pt : report.curve) {
      if (pt.precision >= target) best_recall = std::max(best_recall, pt.recall);
    }
    report.r_at_p.emplace_back(target, best_recall);
  }
  return report;
}

std::string format_eval_report(const EvalReport& report) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  if (!std::isnan(report.theta)) os << "theta " << report.theta << "\n";
  if (!std::isnan(report.accuracy)) os << "accuracy " << report.accuracy << "\n";
  os << "pr_auc " << report.pr_auc << "\n";
  for (const auto& [target, recall] : report.r_at_p) {
    os << "r_at_p " << target << " " << recall << "\n";
  }
  return os.str();
}

void write_pr_curve_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write PR curve: " + path);
  out << "cutoff,precision,recall\n";
  out.precision(9);
  out << std::fixed;
  for (const auto& pt : report.curve) {
    out << pt.cutoff << ',' << pt.precision << ',' << pt.recall << '\n';
  }
}

std::vector<FusedTriple> fuse_ranks(const std::vector<RankedTriple>& a,
                                    const std::vector<RankedTriple>& b, bool descending) {
  if (a.size() != b.size()) {
    throw DataError("fuse_ranks: rankings cover different numbers of triples");
  }
  std::unordered_map<std::string, int> b_rank;
  std::unordered_map<std::string, bool> b_used;
  std::unordered_map<int, bool> b_seen_rank, a_seen_rank;
  for (const auto& rt : b) {
    if (rt.rank < 1) throw DataError("fuse_ranks: ranks must be 1-based positive");
    if (b_seen_rank[rt.rank]) throw DataError("fuse_ranks: duplicate rank in ranking B");
    b_seen_rank[rt.rank] = true;
    if (!b_rank.emplace(triple_key(rt.triple), rt.rank).second) {
      throw DataError("fuse_ranks: duplicate triple in ranking B");
    }
  }
  std::vector<FusedTriple> fused;
  fused.reserve(a.size());
  for (const auto& rt : a) {
    if (rt.rank < 1) throw DataError("fuse_ranks: ranks must be 1-based positive");
    if (a_seen_rank[rt.rank]) throw DataError("fuse_ranks: duplicate rank in ranking A");
    a_seen_rank[rt.rank] = true;
    auto it = b_rank.find(triple_key(rt.triple));
    if (it == b_rank.end()) {
      throw DataError("fuse_ranks: triple missing from ranking B: " + triple_key(rt.triple));
    }
    FusedTriple f;
    f.triple = rt.triple;
    f.rank_a = rt.rank;
    f.rank_b = it->second;
    f.r_avg = (1.0 / rt.rank + 1.0 / it->second) / 2.0;
    fused.push_back(std::move(f));
  }
  std::stable_sort(fused.begin(), fused.end(), [&](const FusedTriple& x, const FusedTriple& y) {
    if (x.r_avg != y.r_avg) return descending ? x.r_avg > y.r_avg : x.r_avg < y.r_avg;
    return x.rank_a < y.rank_a;
  });
  return fused;
}

std::vector<RankedTriple> read_rank_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rank file: " + path);
  std::vector<RankedTriple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t pos = line.find('\t', start);
      if (pos == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (fields.size() != 4) {
      throw DataError("rank file line " + std::to_string(line_no) +
                      ": expected `title\\tattribute\\tvalue\\trank`");
    }
    RankedTriple rt;
    rt.triple.title = fields[0];
    rt.triple.attribute = fields[1];
    rt.triple.value = fields[2];
    try {
      rt.rank = std::stoi(fields[3]);
    } catch (...) {
      throw DataError("rank file line " + std::to_string(line_no) + ": unreadable rank");
    }
    out.push_back(std::move(rt));
  }
  return out;
}

void write_fused(const std::vector<FusedTriple>& fused, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write fused ranking: " + path);
  out.precision(9);
  out << std::fixed;
  std::size_t rank = 0;
  for (const auto& f : fused) {
    ++rank;
    out << rank << '\t' << f.r_avg << '\t' << f.rank_a << '\t' << f.rank_b << '\t'
        << f.triple.title << '\t' << f.triple.attribute << '\t' << f.triple.value << '\n';
  }
}

ConfidenceReport confidence_report(const std::vector<double>& confidence,
                                   const std::vector<bool>& corrupt) {
  if (confidence.size() != corrupt.size()) {
    throw ValidationError("confidence_report: flag vector size mismatch");
  }
  ConfidenceReport report;
  report.count_clean.assign(ConfidenceReport::kBins, 0);
  report.count_corrupt.assign(ConfidenceReport::kBins, 0);

  double sum_clean = 0.0, sum_corrupt = 0.0;
  std::size_t n_clean = 0, n_corrupt = 0;
  for (std::size_t i = 0; i < confidence.size(); ++i) {
    const double c = confidence[i];
    auto bin = static_cast<int>(c * ConfidenceReport::kBins);
    bin = std::clamp(bin, 0, ConfidenceReport::kBins - 1);
    if (corrupt[i]) {
      report.count_corrupt[static_cast<std::size_t>(bin)] += 1;
      sum_corrupt += c;
      ++n_corrupt;
    } else {
      report.count_clean[static_cast<std::size_t>(bin)] += 1;
      sum_clean += c;
      ++n_clean;
    }
  }
  if (n_clean > 0) report.mean_clean = sum_clean / static_cast<double>(n_clean);
  if (n_corrupt > 0) report.mean_corrupt = sum_corrupt / static_cast<double>(n_corrupt);
  if (n_clean > 0 && n_corrupt > 0) {
    report.gap = report.mean_clean - report.mean_corrupt;

    // Mann-Whitney AUC of (1 - C) as the corrupt-detector score; equivalently
    // rank ascending by C with corrupt expected low... detector score s = 1-C,
    // positives = corrupt. Average ranks handle ties.
    std::vector<std::size_t> order(confidence.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return (1.0 - confidence[i]) < (1.0 - confidence[j]);
    });
    std::vector<double> rank(confidence.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() &&
             (1.0 - confidence[order[j + 1]]) == (1.0 - confidence[order[i]])) {
        ++j;
      }
      const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
      for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg_rank;
      i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (std::size_t k = 0; k < confidence.size(); ++k) {
      if (corrupt[k]) rank_sum_pos += rank[k];
    }
    const double n_pos = static_cast<double>(n_corrupt);
    const double n_neg = static_cast<double>(n_clean);
    const double u = rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0;
    report.detector_auc = u / (n_pos * n_neg);
  }
  return report;
}

void write_confidence_csv(const ConfidenceReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write confidence histogram: " + path);
  out << "bin_lo,bin_hi,count_clean,count_corrupt\n";
  for (int b = 0; b < ConfidenceReport::kBins; ++b) {
    const double lo = static_cast<double>(b) / ConfidenceReport::kBins;
    const double hi = static_cast<double>(b + 1) / ConfidenceReport::kBins;
    out << lo << ',' << hi << ',' << report.count_clean[static_cast<std::size_t>(b)] << ','
        << report.count_corrupt[static_cast<std::size_t>(b)] << '\n';
  }
}

std::string format_confidence_report(const ConfidenceReport& report) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  auto print = [&](const char* name, double x) {
    os << name << ' ';
    if (std::isnan(x)) {
      os << "n/a";
    } else {
      os << x;
    }
    os << '\n';
  };
  print("mean_clean", report.mean_clean);
  print("mean_corrupt", report.mean_corrupt);
  print("gap", report.gap);
  print("detector_auc", report.detector_auc);
  return os.str();
}

}  // namespace pge
