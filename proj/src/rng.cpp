#include "injnorm/rng.hpp"

namespace injnorm {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_key(Seed seed, std::initializer_list<std::uint64_t> coords) noexcept {
  std::uint64_t h = mix64(seed.value);
  for (auto c : coords) h = mix64(h ^ mix64(c + kGolden * 3));
  return h;
}

}  // namespace injnorm
