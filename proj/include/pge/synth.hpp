#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pge/graph.hpp"
#include "pge/sampling.hpp"

namespace pge {

// One rule row: products drawn from a theme pick their flavor, ingredient and
// category from linked vocabularies, so value families co-occur through
// shared products (pepper-style ingredients go with spicy-style flavors).
struct SynthTheme {
  std::string name;
  std::vector<std::string> flavors;
  std::vector<std::string> ingredients;
  std::vector<std::string> categories;
};

struct SynthSpec {
  int n_products = 200;
  double noise_ratio = 0.1;
  int n_valid = 120;  // balanced labeled classes
  int n_test = 180;
  std::uint64_t seed = 7;
  std::vector<SynthTheme> themes;  // empty selects the built-in rule table
};

struct SynthResult {
  ProductGraph train;  // noise already injected
  std::vector<CorruptionRecord> log;
  std::vector<RawTriple> valid;
  std::vector<RawTriple> test;
};

const std::vector<SynthTheme>& builtin_themes();

// Rule-consistent product triples (one per attribute per product) with
// compositional titles that embed the category and flavor words, value
// corruption injected at the requested ratio, and balanced labeled valid/test
// splits whose incorrect halves are fresh corruptions outside the graph.
SynthResult generate_synth(const SynthSpec& spec);

}  // namespace pge
