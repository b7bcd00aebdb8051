#include "pge/timing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "pge/errors.hpp"

namespace pge {

std::vector<std::pair<double, double>> time_training(const ProductGraph& graph,
                                                     const ModelConfig& model_cfg,
                                                     const TrainConfig& cfg,
                                                     const std::vector<double>& ratios) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(ratios.size());
  for (std::size_t r = 0; r < ratios.size(); ++r) {
    const double ratio = ratios[r];
    if (!(ratio > 0.0) || ratio > 1.0) throw ValidationError("sample ratio must be in (0, 1]");
    const std::size_t n = graph.triples().size();
    const auto take = std::min(n, static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n))));

    RngStream sub(splitmix64(cfg.seed ^ (0x5a5a5a5aULL + r)));
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    sub.shuffle(indices);
    indices.resize(take);
    std::sort(indices.begin(), indices.end());

    const ProductGraph sample = take == n ? graph : subgraph(graph, indices);
    const auto t0 = std::chrono::steady_clock::now();
    train(sample, model_cfg, cfg, {});
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.emplace_back(ratio, seconds);
  }
  return rows;
}

void write_time_table(const std::vector<std::pair<double, double>>& rows,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write time table: " + path);
  out << "ratio,seconds\n";
  out.precision(6);
  out << std::fixed;
  for (const auto& [ratio, seconds] : rows) out << ratio << ',' << seconds << '\n';
}

}  // namespace pge
