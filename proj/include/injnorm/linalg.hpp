#pragma once

#include <cstddef>
#include <vector>

#include "injnorm/tensor.hpp"

namespace injnorm {

/// Largest order accepted by symmetrize_full (cost grows as n! * d^n).
inline constexpr std::size_t kMaxSymmetrizeOrder = 8;

/// sum_i conj(a_i) * b_i. Conjugate-linear in the first argument.
Scalar inner_product(const DenseTensor& a, const DenseTensor& b);

double euclidean_norm(const DenseTensor& a);

/// a / ||a||; throws ZeroTensorError for the zero tensor.
DenseTensor normalized(const DenseTensor& a);

/// sum_r core[r][0] (x) ... (x) core[r][n-1] as a dense tensor of the candidate's field.
DenseTensor assemble_product(const ProductCandidate& c);

/// Projection onto the permutation-symmetric subspace: average over all n! axis orders.
DenseTensor symmetrize_full(const DenseTensor& a, std::size_t max_order = kMaxSymmetrizeOrder);

/// Average over the n cyclic shifts of the axes.
DenseTensor symmetrize_cyclic(const DenseTensor& a);

/// All permutations of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> all_permutations(std::size_t n);

/// The n cyclic shifts of {0..n-1}; shift s maps axis j to (j + s) mod n.
std::vector<std::vector<std::size_t>> cyclic_shifts(std::size_t n);

/// Largest singular value of an order-2 tensor viewed as a d1 x d2 matrix.
/// This is the exact injective norm in the order-2 case.
double operator_norm_order2(const DenseTensor& a);

/// Relative comparison with an absolute floor, the library-wide default.
bool approx_equal(double a, double b, double rel = 1e-9, double abs_floor = 1e-12);

}  // namespace injnorm
