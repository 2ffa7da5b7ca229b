#include "injnorm/reference_states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "injnorm/linalg.hpp"

namespace injnorm {

namespace {

double log2_factorial(std::size_t m) {
  double s = 0;
  for (std::size_t i = 2; i <= m; ++i) s += std::log2(static_cast<double>(i));
  return s;
}

std::size_t flat_index(const std::vector<std::size_t>& symbols, std::size_t d) {
  std::size_t f = 0;
  for (auto s : symbols) f = f * d + s;
  return f;
}

}  // namespace

void DickeSpec::validate() const {
  if (n == 0 || d == 0) throw SpecError("Dicke state needs n >= 1 and d >= 1");
  if (kvec.size() != d)
    throw SpecError("Dicke occupation vector must have d = " + std::to_string(d) + " entries");
  if (std::accumulate(kvec.begin(), kvec.end(), std::size_t{0}) != n)
    throw SpecError("Dicke occupations must sum to n = " + std::to_string(n));
}

void AntisymSpec::validate() const {
  if (n == 0) throw SpecError("antisymmetric state needs n >= 1");
  if (d < n) throw SpecError("antisymmetric state needs d >= n");
}

DenseTensor build_dicke(const DickeSpec& spec) {
  spec.validate();
  std::vector<std::size_t> symbols;
  for (std::size_t j = 0; j < spec.d; ++j) symbols.insert(symbols.end(), spec.kvec[j], j);

  std::vector<std::size_t> strings;
  do strings.push_back(flat_index(symbols, spec.d));
  while (std::next_permutation(symbols.begin(), symbols.end()));

  const double coeff = 1.0 / std::sqrt(static_cast<double>(strings.size()));
  Shape shape(spec.n, spec.d);
  std::vector<double> data(shape_size(shape), 0.0);
  for (auto f : strings) data[f] = coeff;
  return {std::move(shape), std::move(data)};
}

double gme_dicke(const DickeSpec& spec) {
  spec.validate();
  // log2(1/C) = sum_j log2(k_j!) - log2(n!)
  double bits = -log2_factorial(spec.n);
  const double n = static_cast<double>(spec.n);
  for (auto k : spec.kvec) {
    if (k == 0) continue;
    bits += log2_factorial(k) + static_cast<double>(k) * std::log2(n / static_cast<double>(k));
  }
  return bits;
}

DenseTensor build_antisym(const AntisymSpec& spec) {
  spec.validate();
  Shape shape(spec.n, spec.d);
  std::vector<double> data(shape_size(shape), 0.0);
  double factorial = 1;
  for (std::size_t i = 2; i <= spec.n; ++i) factorial *= static_cast<double>(i);
  const double coeff = 1.0 / std::sqrt(factorial);
  for (const auto& p : all_permutations(spec.n)) {
    // sign from the inversion count
    std::size_t inversions = 0;
    for (std::size_t a = 0; a < p.size(); ++a)
      for (std::size_t b = a + 1; b < p.size(); ++b) inversions += p[a] > p[b];
    data[flat_index(p, spec.d)] = inversions % 2 ? -coeff : coeff;
  }
  return {std::move(shape), std::move(data)};
}

double gme_antisym(const AntisymSpec& spec) {
  spec.validate();
  return log2_factorial(spec.n);
}

}  // namespace injnorm
