#pragma once

#include <cstddef>
#include <vector>

#include "injnorm/tensor.hpp"

namespace injnorm {

// States with closed-form geometric measure of entanglement, built on the
// computational basis. GME values are in bits (base-2 logarithm) throughout.

/// Generalized Dicke state: uniform superposition of all basis strings in
/// which symbol j appears kvec[j] times.
struct DickeSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::size_t> kvec;

  void validate() const;
};

/// Antisymmetric basis state on the first n basis vectors of C^d.
struct AntisymSpec {
  std::size_t n = 0;
  std::size_t d = 0;

  void validate() const;
};

DenseTensor build_dicke(const DickeSpec& spec);

/// log2[(1/C) prod_j (n/k_j)^k_j] with C = n! / prod_j k_j!; k_j = 0 terms contribute 1.
double gme_dicke(const DickeSpec& spec);

DenseTensor build_antisym(const AntisymSpec& spec);

/// log2(n!).
double gme_antisym(const AntisymSpec& spec);

}  // namespace injnorm
