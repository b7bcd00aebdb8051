#include "pge/rng.hpp"

#include <sstream>

#include "pge/errors.hpp"

namespace pge {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw ValidationError("uniform_index: empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

double RngStream::uniform_real(double lo, double hi) {
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

std::string RngStream::serialize() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void RngStream::restore(const std::string& state) {
  std::istringstream is(state);
  is >> engine_;
  if (is.fail()) throw DataError("invalid RNG state string");
}

RngPack RngPack::from_seed(std::uint64_t seed) {
  RngPack p;
  p.init = RngStream(splitmix64(seed + 1));
  p.sampling = RngStream(splitmix64(seed + 2));
  p.shuffle = RngStream(splitmix64(seed + 3));
  return p;
}

std::string RngPack::serialize() const {
  return init.serialize() + "\n" + sampling.serialize() + "\n" + shuffle.serialize();
}

RngPack RngPack::deserialize(const std::string& blob) {
  std::istringstream is(blob);
  std::string a, b, c;
  if (!std::getline(is, a) || !std::getline(is, b) || !std::getline(is, c))
    throw DataError("invalid RNG pack state");
  RngPack p;
  p.init.restore(a);
  p.sampling.restore(b);
  p.shuffle.restore(c);
  return p;
}

}  // namespace pge
