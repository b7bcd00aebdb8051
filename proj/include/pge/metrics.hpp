#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pge/graph.hpp"

namespace pge {

struct ScoredTriple {
  RawTriple triple;
  double score = 0.0;
  Label gold = Label::unlabeled;
};

// Threshold maximizing accuracy of the rule (score > theta -> correct),
// searched over midpoints between consecutive distinct scores plus sentinels
// below and above all scores; ties break toward the larger theta. Unlabeled
// entries are ignored; a single-class set is a degenerate-validation error.
double select_threshold(const std::vector<ScoredTriple>& valid);

double accuracy_at(const std::vector<ScoredTriple>& labeled, double theta);

enum class PositiveClass { incorrect, correct };

struct CurvePoint {
  std::size_t cutoff = 0;
  double precision = 0.0;
  double recall = 0.0;
};

struct EvalReport {
  double theta = std::numeric_limits<double>::quiet_NaN();
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double pr_auc = 0.0;
  std::vector<std::pair<double, double>> r_at_p;  // (precision target, recall)
  std::vector<CurvePoint> curve;
};

// Ranks by score (ascending when the positive class is `incorrect`: the
// lowest-scored triples are the most suspicious), sweeps every rank cutoff,
// and reports average precision as PR AUC plus R@P at the requested levels
// (0 when no cutoff reaches the precision target).
EvalReport pr_metrics(const std::vector<ScoredTriple>& test, PositiveClass positive,
                      const std::vector<double>& p_levels);

std::string format_eval_report(const EvalReport& report);
void write_pr_curve_csv(const EvalReport& report, const std::string& path);

// ---- rank fusion ----------------------------------------------------------

struct RankedTriple {
  RawTriple triple;
  int rank = 0;  // 1-based, distinct within one ranking
};

struct FusedTriple {
  RawTriple triple;
  int rank_a = 0;
  int rank_b = 0;
  double r_avg = 0.0;
};

// R_avg = (1/i + 1/j) / 2 per triple; sorted descending by R_avg by default
// (reciprocal-rank semantics), ascending when `descending` is false. Ties
// break by rank_a, then by input order of `a`. The two rankings must cover
// the same triple set.
std::vector<FusedTriple> fuse_ranks(const std::vector<RankedTriple>& a,
                                    const std::vector<RankedTriple>& b, bool descending = true);

std::vector<RankedTriple> read_rank_file(const std::string& path);
void write_fused(const std::vector<FusedTriple>& fused, const std::string& path);

// ---- confidence distribution ----------------------------------------------

struct ConfidenceReport {
  static constexpr int kBins = 20;
  std::vector<std::size_t> count_clean;    // kBins
  std::vector<std::size_t> count_corrupt;  // kBins
  double mean_clean = std::numeric_limits<double>::quiet_NaN();
  double mean_corrupt = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double detector_auc = std::numeric_limits<double>::quiet_NaN();
};

// 20-bin histograms of C for clean vs corrupted triples, the mean gap, and
// the ROC AUC of (1 - C) as a noise detector (rank-based, ties at 0.5).
ConfidenceReport confidence_report(const std::vector<double>& confidence,
                                   const std::vector<bool>& corrupt);

void write_confidence_csv(const ConfidenceReport& report, const std::string& path);
std::string format_confidence_report(const ConfidenceReport& report);

}  // namespace pge
