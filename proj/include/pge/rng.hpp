#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace pge {

std::uint64_t splitmix64(std::uint64_t x);

// mt19937_64 plus hand-rolled bounded draws. std::uniform_int_distribution and
// std::shuffle are implementation-defined, so they cannot back the byte-identical
// output guarantees; the draws below are fully specified.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Unbiased draw in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  // Draw in [lo, hi) with 53-bit resolution.
  double uniform_real(double lo, double hi);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  std::string serialize() const;
  void restore(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

// Named substreams derived from one master seed so sampling, initialization and
// shuffling can be varied independently without perturbing each other.
struct RngPack {
  RngStream init;
  RngStream sampling;
  RngStream shuffle;

  static RngPack from_seed(std::uint64_t seed);

  std::string serialize() const;
  static RngPack deserialize(const std::string& blob);
};

}  // namespace pge
