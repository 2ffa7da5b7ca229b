#pragma once

#include <cstdint>
#include <initializer_list>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

namespace injnorm {

/// Master seed of a reproducible random stream.
struct Seed {
  std::uint64_t value = 0;
  friend bool operator==(Seed, Seed) = default;
};

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Hashes a seed together with integer coordinates (sample index, site,
/// restart, grid point...) into an independent stream key. Adding new
/// coordinates elsewhere never perturbs existing keys.
std::uint64_t derive_key(Seed seed, std::initializer_list<std::uint64_t> coords) noexcept;

/// Sequential standard normal draws from a stream key.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t key) : engine_(key) {}

  double next() { return normal_(engine_); }

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace injnorm
