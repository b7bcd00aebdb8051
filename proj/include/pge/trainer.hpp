#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pge/checkpoint.hpp"
#include "pge/graph.hpp"
#include "pge/loss.hpp"
#include "pge/model.hpp"

namespace pge {

struct TrainConfig {
  double learning_rate = 0.0002;
  int k_neg = 4;
  int batch_size = 128;
  int epochs = 10;
  double alpha = 0.1;
  double beta = 0.1;
  bool noise_aware = true;
  bool freeze_confidence = false;
  std::uint64_t seed = 42;
  bool deterministic = true;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool neg_filtered = false;
  int threads = 0;  // 0 = runtime default; the CLI caps this via PGE_THREADS
  ExecMode exec = ExecMode::parallel;
};

struct EpochRow {
  int epoch = 0;
  double loss = 0.0;
  double valid_pr_auc = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

struct TrainResult {
  ModelCheckpoint checkpoint;
  std::vector<EpochRow> log;
  std::string numeric_fault;  // empty on clean completion
};

// Shuffles triples per epoch, samples k_neg negatives per positive, runs the
// batch kernel and the Adam step, and logs epoch loss plus validation PR AUC
// (positive class: incorrect). Returns the checkpoint with the best
// validation PR AUC, or the last epoch when no usable validation set exists.
// A numeric fault stops training and retains the last end-of-epoch snapshot.
TrainResult train(const ProductGraph& graph, const ModelConfig& model_cfg,
                  const TrainConfig& cfg, const std::vector<RawTriple>& valid,
                  const std::string& config_echo = "", const Matrix* pretrained_words = nullptr);

// epoch,loss,valid_pr_auc,seconds
void write_epoch_log(const std::vector<EpochRow>& log, const std::string& path);

// Scores raw triples against in-training parameters (shared with the valid
// pass); entity ids resolve through `graph` in entity_id mode.
std::vector<double> score_with_params(const ModelParams& params, const ModelConfig& cfg,
                                      const ProductGraph& graph,
                                      const std::vector<RawTriple>& triples, int threads);

}  // namespace pge
