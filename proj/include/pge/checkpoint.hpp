#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pge/adam.hpp"
#include "pge/graph.hpp"
#include "pge/model.hpp"

namespace pge {

// Everything needed to resume or serve a model. Binary layout: magic,
// u32 version, then fixed-order sections each carrying a CRC32; all integers
// and doubles little-endian. Save/load round-trips bit-identically.
struct ModelCheckpoint {
  std::string config_echo;
  ModelConfig model_cfg;
  Vocabulary vocab;
  std::vector<std::string> attributes;
  std::vector<std::string> entity_names;  // entity_id mode: titles then values
  std::uint64_t n_titles = 0;
  ModelParams params;
  std::vector<double> confidence;
  AdamState opt;
  std::string rng_state;
};

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

// Scores raw triples with a checkpoint: text mode preprocesses against the
// stored vocabulary (unseen tokens become unk, which is the inductive path);
// entity_id mode requires every entity to be known. Unknown attribute names
// are a data error.
std::vector<double> score_raw_triples(const ModelCheckpoint& ckpt,
                                      const std::vector<RawTriple>& triples, int threads = 0);

}  // namespace pge
