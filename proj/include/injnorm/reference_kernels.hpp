#pragma once

// Serial reference implementations of the kernels in kernels.hpp. They decode
// every flat index into a multi-index and evaluate the defining sums directly.
// Slow; used by tests and benchmarks only.

#include <span>
#include <vector>

#include "injnorm/tensor.hpp"

namespace injnorm::reference {

void contract_except(std::span<const cplx> psi, const Shape& shape,
                     std::span<const std::span<const cplx>> weights,
                     std::size_t k, std::span<cplx> out);

cplx contract_all(std::span<const cplx> psi, const Shape& shape,
                  std::span<const std::span<const cplx>> weights);

void add_outer_product(std::span<const std::span<const cplx>> factors, cplx scale,
                       std::span<cplx> out);

void permutation_average(std::span<const cplx> x, const Shape& shape,
                         std::span<const std::vector<std::size_t>> perms,
                         std::span<cplx> out);

void mps_contract(std::span<const std::span<const cplx>> locals, const Shape& phys,
                  const Shape& bond, std::span<cplx> out);

}  // namespace injnorm::reference
