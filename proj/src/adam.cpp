#include "pge/adam.hpp"

#include <cmath>

#include "pge/vocabulary.hpp"

namespace pge {

namespace {

ModelParams zeros_like(const ModelParams& p) {
  ModelParams z;
  z.word = Matrix(p.word.rows, p.word.cols);
  for (const auto& b : p.conv.branches) {
    ConvBranch g;
    g.width = b.width;
    g.filters = Matrix(b.filters.rows, b.filters.cols);
    g.bias.assign(b.bias.size(), 0.0);
    z.conv.branches.push_back(std::move(g));
  }
  z.proj.weight = Matrix(p.proj.weight.rows, p.proj.weight.cols);
  z.proj.bias.assign(p.proj.bias.size(), 0.0);
  z.entity = Matrix(p.entity.rows, p.entity.cols);
  z.attr = Matrix(p.attr.rows, p.attr.cols);
  return z;
}

struct StepScale {
  double lr, beta1, beta2, eps, bc1, bc2;
};

void update_span(double* p, const double* g, double* m, double* v, std::size_t n,
                 const StepScale& s) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
    const double mhat = m[i] / s.bc1;
    const double vhat = v[i] / s.bc2;
    p[i] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
  }
}

}  // namespace

AdamState AdamState::like(const ModelParams& params, std::size_t n_confidence) {
  AdamState s;
  s.m = zeros_like(params);
  s.v = zeros_like(params);
  s.conf_m.assign(n_confidence, 0.0);
  s.conf_v.assign(n_confidence, 0.0);
  return s;
}

void adam_step(ModelParams& params, std::vector<double>* confidence, const ModelGrads& grads,
               AdamState& state, const AdamConfig& cfg, const UpdateFlags& flags) {
  state.step += 1;
  StepScale s;
  s.lr = cfg.learning_rate;
  s.beta1 = cfg.beta1;
  s.beta2 = cfg.beta2;
  s.eps = cfg.eps;
  s.bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  s.bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

  for (std::size_t b = 0; b < grads.enc.conv.branches.size(); ++b) {
    auto& pb = params.conv.branches[b];
    auto& mb = state.m.conv.branches[b];
    auto& vb = state.v.conv.branches[b];
    const auto& gb = grads.enc.conv.branches[b];
    update_span(pb.filters.data.data(), gb.filters.data.data(), mb.filters.data.data(),
                vb.filters.data.data(), pb.filters.data.size(), s);
    update_span(pb.bias.data(), gb.bias.data(), mb.bias.data(), vb.bias.data(), pb.bias.size(),
                s);
  }
  if (params.proj.weight.data.size() > 0) {
    update_span(params.proj.weight.data.data(), grads.enc.proj.weight.data.data(),
                state.m.proj.weight.data.data(), state.v.proj.weight.data.data(),
                params.proj.weight.data.size(), s);
    update_span(params.proj.bias.data(), grads.enc.proj.bias.data(), state.m.proj.bias.data(),
                state.v.proj.bias.data(), params.proj.bias.size(), s);
  }

  if (flags.finetune_words) {
    for (const auto& [row, g] : grads.enc.word_rows) {
      if (row == Vocabulary::kPadIndex) continue;
      const auto r = static_cast<std::size_t>(row);
      update_span(params.word.row(r), g.data(), state.m.word.row(r), state.v.word.row(r),
                  params.word.cols, s);
    }
  }
  for (const auto& [row, g] : grads.entity_rows) {
    const auto r = static_cast<std::size_t>(row);
    update_span(params.entity.row(r), g.data(), state.m.entity.row(r), state.v.entity.row(r),
                params.entity.cols, s);
  }
  for (const auto& [row, g] : grads.attr_rows) {
    const auto r = static_cast<std::size_t>(row);
    update_span(params.attr.row(r), g.data(), state.m.attr.row(r), state.v.attr.row(r),
                params.attr.cols, s);
  }

  if (flags.update_confidence && confidence != nullptr) {
    for (const auto& [idx, g] : grads.confidence) {
      const auto i = static_cast<std::size_t>(idx);
      update_span(&(*confidence)[i], &g, &state.conf_m[i], &state.conf_v[i], 1, s);
      if ((*confidence)[i] < 0.0) (*confidence)[i] = 0.0;
      if ((*confidence)[i] > 1.0) (*confidence)[i] = 1.0;
    }
  }
}

}  // namespace pge
