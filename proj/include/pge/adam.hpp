#pragma once

#include <cstdint>
#include <vector>

#include "pge/loss.hpp"
#include "pge/model.hpp"

namespace pge {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers share the parameter shapes.
struct AdamState {
  std::int64_t step = 0;
  ModelParams m;
  ModelParams v;
  std::vector<double> conf_m;
  std::vector<double> conf_v;

  static AdamState like(const ModelParams& params, std::size_t n_confidence);
};

struct UpdateFlags {
  bool finetune_words = true;
  bool update_confidence = false;
};

// Bias-corrected Adam. Dense tensors (filters, projection) update every step;
// embedding rows, attribute rows and confidence entries update lazily, only
// where the batch produced a gradient. The pad word row is never updated and
// confidence entries are clamped to [0, 1] after the step.
void adam_step(ModelParams& params, std::vector<double>* confidence, const ModelGrads& grads,
               AdamState& state, const AdamConfig& cfg, const UpdateFlags& flags);

}  // namespace pge
