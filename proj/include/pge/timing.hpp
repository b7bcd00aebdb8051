#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pge/trainer.hpp"

namespace pge {

// Trains on seeded uniform subsamples of the graph, one run per ratio, and
// reports wall-clock seconds. Reads the same config as a full run; the
// subsample keeps the original triple order.
std::vector<std::pair<double, double>> time_training(const ProductGraph& graph,
                                                     const ModelConfig& model_cfg,
                                                     const TrainConfig& cfg,
                                                     const std::vector<double>& ratios);

// ratio,seconds
void write_time_table(const std::vector<std::pair<double, double>>& rows,
                      const std::string& path);

}  // namespace pge
