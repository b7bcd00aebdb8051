#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pge/model.hpp"

namespace pge {

// One positive with its sampled negatives, resolved to sequences (text mode)
// or entity rows (id mode) before the kernel runs, so the kernel itself is a
// pure function per example.
struct TrainingExample {
  std::int32_t triple_index = -1;  // confidence slot
  std::int32_t attr_id = -1;
  const TokenSequence* title_seq = nullptr;
  const TokenSequence* value_seq = nullptr;
  std::vector<const TokenSequence*> negative_seqs;
  std::int32_t title_entity = -1;
  std::int32_t value_entity = -1;
  std::vector<std::int32_t> negative_entities;
};

struct ModelGrads {
  EncoderGrads enc;
  std::unordered_map<std::int32_t, std::vector<double>> entity_rows;
  std::unordered_map<std::int32_t, std::vector<double>> attr_rows;
  std::unordered_map<std::int32_t, double> confidence;

  void init_shapes(const ModelParams& params);
  void add(const ModelGrads& other);
  void clear();
};

struct LossHyper {
  bool noise_aware = false;
  double alpha = 0.0;
  double beta = 0.0;
  const std::vector<double>* confidence = nullptr;  // required when noise_aware
};

// Numerically stable log(sigmoid(x)) = -softplus(-x) pieces.
double stable_softplus(double x);
double stable_sigmoid(double x);

// Negative-sampling term of one triple:
//   -log sigmoid(f(t,a,v)) - (1/|N|) sum_{v'} log sigmoid(-f(t,a,v')).
// Returns the bracket value; gradients scaled by `weight` are accumulated into
// `out`. Throws NumericFault naming the triple index on non-finite results.
double example_bracket_backward(const TrainingExample& ex, const ModelParams& params,
                                const ModelConfig& cfg, double weight, ModelGrads& out);

// Loss contribution of one example under the selected objective. Plain mode
// sums brackets; noise-aware mode adds C * bracket plus the sparsity and
// polarization regularizers and the exact dL/dC term.
double example_loss_backward(const TrainingExample& ex, const ModelParams& params,
                             const ModelConfig& cfg, const LossHyper& hyper, ModelGrads& out);

enum class ExecMode { serial, parallel };

struct BatchResult {
  double loss = 0.0;
  ModelGrads grads;
};

// Batch loss and gradients. The serial path is the reference: per-example
// gradients reduced in example order. The parallel path computes examples
// concurrently; with `deterministic` it reduces in example order and is
// bit-identical to the serial path for any thread count, otherwise it merges
// per-thread partials in thread order (faster, less memory).
BatchResult compute_batch(const std::vector<TrainingExample>& batch, const ModelParams& params,
                          const ModelConfig& cfg, const LossHyper& hyper, ExecMode exec,
                          bool deterministic, int threads);

}  // namespace pge
