#pragma once

#include <span>
#include <vector>

#include "pge/matrix.hpp"

namespace pge {

enum class ScoreKind { transe, rotate };
enum class NormKind { l1, l2 };

struct ScoreConfig {
  ScoreKind kind = ScoreKind::transe;
  double gamma = 12.0;
  NormKind norm = NormKind::l1;  // TransE only; RotatE distance is always L2
  bool squared = false;          // optional squared-distance variant
};

// gamma - ||t + a - v|| under the configured norm. Higher is more plausible.
double score_transe(std::span<const double> t, std::span<const double> a,
                    std::span<const double> v, const ScoreConfig& cfg);

// gamma - ||t o r - v||_2 with r_j = exp(i * a_j); t, v hold d/2 complex
// numbers in interleaved (re, im) layout and `a` holds d/2 phases.
double score_rotate(std::span<const double> t, std::span<const double> a,
                    std::span<const double> v, const ScoreConfig& cfg);

double score(std::span<const double> t, std::span<const double> a,
             std::span<const double> v, const ScoreConfig& cfg);

struct ScoreGrads {
  std::vector<double> t, a, v;
};

// Exact gradients of upstream * score. Norms take subgradient 0 at their
// nondifferentiable point; RotatE phase gradients chain through exp(i * a_j).
void score_backward(std::span<const double> t, std::span<const double> a,
                    std::span<const double> v, const ScoreConfig& cfg, double upstream,
                    ScoreGrads& out);

// Maps a phase into [-pi, pi); used when reporting phases, never during training.
double wrap_phase(double phase);

}  // namespace pge
