#pragma once

#include <string>
#include <vector>

#include "pge/graph.hpp"
#include "pge/rng.hpp"

namespace pge {

// k independent uniform draws from V \ {triple.value_text}; with `filtered`
// set, values v' with (t, a, v') observed are excluded as well. Throws a
// DataError when the candidate pool is empty.
std::vector<std::string> sample_negatives(const AttributeTriple& triple,
                                          const ProductGraph& graph, std::size_t k,
                                          RngStream& rng, bool filtered = false);

// Index-level variant used by the training loop.
std::vector<std::int32_t> sample_negative_ids(std::int32_t title, std::int32_t attr,
                                              std::int32_t value, const ProductGraph& graph,
                                              std::size_t k, RngStream& rng, bool filtered);

// Uniform value id among those NOT observed with (title, attr); the corruption
// primitive shared by noise injection and synthetic eval-set generation.
std::int32_t sample_replacement_value(const ProductGraph& graph, std::int32_t title,
                                      std::int32_t attr, RngStream& rng);

enum class NoiseMode {
  value_only,    // replace the attribute value with a random different value
  head_or_tail,  // replace either the title or the value, coin flip per triple
};

struct CorruptionRecord {
  AttributeTriple original;
  AttributeTriple corrupted;
};

struct NoiseResult {
  ProductGraph graph;
  std::vector<CorruptionRecord> log;
};

// Adds ceil(ratio * |O|) corrupted copies of distinct sampled triples; the
// originals stay in the graph and the log records (original, corrupted) pairs.
// Replacements are uniform over entities not already forming an observed
// triple, so the new triples never collide with existing ones.
NoiseResult inject_noise(const ProductGraph& graph, double ratio, RngStream& rng,
                         NoiseMode mode = NoiseMode::value_only);

// Training graph restricted to triples sharing no title or value text with the
// test triples; entity sets of the result and the test set are disjoint.
ProductGraph build_inductive_split(const ProductGraph& graph,
                                   const std::vector<RawTriple>& test);

// Corruption log TSV: orig_title \t attribute \t orig_value \t corrupt_value
// [\t corrupt_title]; the 5th column appears only for head corruptions.
void save_corruption_log(const std::vector<CorruptionRecord>& log,
                         const std::vector<std::string>& attributes, const std::string& path);

struct CorruptionRow {
  std::string orig_title, attribute, orig_value, corrupt_value, corrupt_title;
};

std::vector<CorruptionRow> read_corruption_log(const std::string& path);

}  // namespace pge
