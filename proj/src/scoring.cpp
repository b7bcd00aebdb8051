#include "pge/scoring.hpp"

#include <cmath>

#include "pge/errors.hpp"

namespace pge {

namespace {

void check_transe_dims(std::size_t t, std::size_t a, std::size_t v) {
  if (t != a || t != v) throw ValidationError("score_transe: dimension mismatch");
}

void check_rotate_dims(std::size_t t, std::size_t a, std::size_t v) {
  if (t % 2 != 0) throw ValidationError("score_rotate: embedding dimension must be even");
  if (t != v || a != t / 2) throw ValidationError("score_rotate: dimension mismatch");
}

}  // namespace

double score_transe(std::span<const double> t, std::span<const double> a,
                    std::span<const double> v, const ScoreConfig& cfg) {
  check_transe_dims(t.size(), a.size(), v.size());
  double norm = 0.0;
  if (cfg.norm == NormKind::l1) {
    for (std::size_t i = 0; i < t.size(); ++i) norm += std::fabs(t[i] + a[i] - v[i]);
  } else {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double d = t[i] + a[i] - v[i];
      norm += d * d;
    }
    norm = std::sqrt(norm);
  }
  return cfg.gamma - (cfg.squared ? norm * norm : norm);
}

double score_rotate(std::span<const double> t, std::span<const double> a,
                    std::span<const double> v, const ScoreConfig& cfg) {
  check_rotate_dims(t.size(), a.size(), v.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double c = std::cos(a[j]);
    const double s = std::sin(a[j]);
    const double ure = t[2 * j] * c - t[2 * j + 1] * s;
    const double uim = t[2 * j] * s + t[2 * j + 1] * c;
    const double dre = ure - v[2 * j];
    const double dim = uim - v[2 * j + 1];
    sum += dre * dre + dim * dim;
  }
  return cfg.gamma - (cfg.squared ? sum : std::sqrt(sum));
}

double score(std::span<const double> t, std::span<const double> a,
             std::span<const double> v, const ScoreConfig& cfg) {
  return cfg.kind == ScoreKind::transe ? score_transe(t, a, v, cfg)
                                       : score_rotate(t, a, v, cfg);
}

void score_backward(std::span<const double> t, std::span<const double> a,
                    std::span<const double> v, const ScoreConfig& cfg, double upstream,
                    ScoreGrads& out) {
  out.t.assign(t.size(), 0.0);
  out.a.assign(a.size(), 0.0);
  out.v.assign(v.size(), 0.0);
  if (upstream == 0.0) return;

  if (cfg.kind == ScoreKind::transe) {
    check_transe_dims(t.size(), a.size(), v.size());
    std::vector<double> delta(t.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      delta[i] = t[i] + a[i] - v[i];
      norm += cfg.norm == NormKind::l1 ? std::fabs(delta[i]) : delta[i] * delta[i];
    }
    if (cfg.norm == NormKind::l2) norm = std::sqrt(norm);
    const double outer = cfg.squared ? 2.0 * norm : 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      double dnorm;
      if (cfg.norm == NormKind::l1) {
        dnorm = delta[i] > 0.0 ? 1.0 : (delta[i] < 0.0 ? -1.0 : 0.0);
      } else {
        dnorm = norm > 0.0 ? delta[i] / norm : 0.0;
      }
      const double g = -upstream * outer * dnorm;
      out.t[i] = g;
      out.a[i] = g;
      out.v[i] = -g;
    }
    return;
  }

  check_rotate_dims(t.size(), a.size(), v.size());
  const std::size_t half = a.size();
  std::vector<double> dre(half), dim(half), ure(half), uim(half);
  double sum = 0.0;
  for (std::size_t j = 0; j < half; ++j) {
    const double c = std::cos(a[j]);
    const double s = std::sin(a[j]);
    ure[j] = t[2 * j] * c - t[2 * j + 1] * s;
    uim[j] = t[2 * j] * s + t[2 * j + 1] * c;
    dre[j] = ure[j] - v[2 * j];
    dim[j] = uim[j] - v[2 * j + 1];
    sum += dre[j] * dre[j] + dim[j] * dim[j];
  }
  const double dist = std::sqrt(sum);
  for (std::size_t j = 0; j < half; ++j) {
    double gre, gim;
    if (cfg.squared) {
      gre = -upstream * 2.0 * dre[j];
      gim = -upstream * 2.0 * dim[j];
    } else if (dist > 0.0) {
      gre = -upstream * dre[j] / dist;
      gim = -upstream * dim[j] / dist;
    } else {
      continue;  // subgradient 0 at the origin
    }
    const double c = std::cos(a[j]);
    const double s = std::sin(a[j]);
    out.t[2 * j] = gre * c + gim * s;
    out.t[2 * j + 1] = -gre * s + gim * c;
    out.v[2 * j] = -gre;
    out.v[2 * j + 1] = -gim;
    out.a[j] = gre * (-uim[j]) + gim * ure[j];
  }
}

double wrap_phase(double phase) {
  const double two_pi = 2.0 * M_PI;
  double p = std::fmod(phase + M_PI, two_pi);
  if (p < 0.0) p += two_pi;
  return p - M_PI;
}

}  // namespace pge
