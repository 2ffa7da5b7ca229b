#pragma once

// Contraction and projection kernels over row-major dense data.
//
// Every kernel here is OpenMP-parallel. Work is split into blocks whose
// boundaries depend only on the tensor shape, and per-block partial sums are
// combined in block order, so results are bit-identical for any thread count.
// The serial versions in reference_kernels.hpp compute the same quantities by
// plain index decoding and are kept as test oracles.

#include <cstddef>
#include <span>
#include <vector>

#include "injnorm/tensor.hpp"

namespace injnorm::kernels {

/// out[i] = sum over all indices with i_k = i of psi[...] * prod_{j != k} w_j[i_j].
/// `weights` has one entry per axis; weights[k] is ignored.
void contract_except(std::span<const double> psi, const Shape& shape,
                     std::span<const std::span<const double>> weights,
                     std::size_t k, std::span<double> out);
void contract_except(std::span<const cplx> psi, const Shape& shape,
                     std::span<const std::span<const cplx>> weights,
                     std::size_t k, std::span<cplx> out);

/// out[p] = sum_i psi[p, i] * w[i]: contracts the last axis away.
void contract_last(std::span<const double> psi, const Shape& shape, std::span<const double> w,
                   std::span<double> out);
void contract_last(std::span<const cplx> psi, const Shape& shape, std::span<const cplx> w,
                   std::span<cplx> out);

/// All n single-axis-free contractions at once: outs[k] receives
/// contract_except(psi, shape, weights, k, .). Costs about 2 * size(psi)
/// multiply-adds instead of n * size(psi).
void contract_each(std::span<const double> psi, const Shape& shape,
                   std::span<const std::span<const double>> weights,
                   std::span<const std::span<double>> outs);
void contract_each(std::span<const cplx> psi, const Shape& shape,
                   std::span<const std::span<const cplx>> weights,
                   std::span<const std::span<cplx>> outs);

/// sum_i psi[i] * prod_j w_j[i_j].
double contract_all(std::span<const double> psi, const Shape& shape,
                    std::span<const std::span<const double>> weights);
cplx contract_all(std::span<const cplx> psi, const Shape& shape,
                  std::span<const std::span<const cplx>> weights);

/// out += scale * (f_0 (x) f_1 (x) ... (x) f_{n-1}).
void add_outer_product(std::span<const std::span<const double>> factors, double scale,
                       std::span<double> out);
void add_outer_product(std::span<const std::span<const cplx>> factors, cplx scale,
                       std::span<cplx> out);

/// Average of `x` over the given axis permutations. Each permutation p maps
/// output axis j to input axis p[j]: out[i_0..] = mean_p x[i_{p[0]}, i_{p[1]}, ...].
/// Requires a hypercubic shape.
void permutation_average(std::span<const double> x, const Shape& shape,
                         std::span<const std::vector<std::size_t>> perms,
                         std::span<double> out);
void permutation_average(std::span<const cplx> x, const Shape& shape,
                         std::span<const std::vector<std::size_t>> perms,
                         std::span<cplx> out);

/// Periodic matrix-product contraction. locals[k] has shape
/// (bond[k], phys[k], bond[(k+1) % n]); out has shape phys.
void mps_contract(std::span<const std::span<const double>> locals, const Shape& phys,
                  const Shape& bond, std::span<double> out);
void mps_contract(std::span<const std::span<const cplx>> locals, const Shape& phys,
                  const Shape& bond, std::span<cplx> out);

}  // namespace injnorm::kernels
