#include "injnorm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "injnorm/kernels.hpp"

namespace injnorm {

Scalar inner_product(const DenseTensor& a, const DenseTensor& b) {
  if (a.shape() != b.shape())
    throw ShapeError("inner_product: shapes " + shape_string(a.shape()) + " and " +
                     shape_string(b.shape()) + " differ");
  if (a.field() != b.field()) throw FieldError("inner_product: field mismatch");
  if (a.is_real()) {
    const auto x = a.real_data(), y = b.real_data();
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
  }
  const auto x = a.complex_data(), y = b.complex_data();
  cplx acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

double euclidean_norm(const DenseTensor& a) {
  return a.visit([](auto data) {
    double s = 0;
    for (const auto& x : data) s += std::norm(x);
    return std::sqrt(s);
  });
}

DenseTensor normalized(const DenseTensor& a) {
  const double nrm = euclidean_norm(a);
  if (nrm == 0) throw ZeroTensorError("cannot normalize the zero tensor");
  return a.scaled(1.0 / nrm);
}

DenseTensor assemble_product(const ProductCandidate& c) {
  const auto& dims = c.dims();
  const std::size_t n = dims.size();
  for (std::size_t r = 0; r < c.rank(); ++r)
    for (std::size_t k = 0; k < n; ++k)
      if (c.core(r, k).size() != dims[k]) throw ShapeError("core length inconsistent with dims");

  if (c.field() == Field::Real) {
    std::vector<double> out(shape_size(dims), 0.0);
    std::vector<std::vector<double>> re(n);
    std::vector<std::span<const double>> views(n);
    for (std::size_t r = 0; r < c.rank(); ++r) {
      for (std::size_t k = 0; k < n; ++k) {
        const auto core = c.core(r, k);
        re[k].resize(core.size());
        std::transform(core.begin(), core.end(), re[k].begin(), [](cplx z) { return z.real(); });
        views[k] = re[k];
      }
      kernels::add_outer_product(views, 1.0, out);
    }
    return {dims, std::move(out)};
  }
  std::vector<cplx> out(shape_size(dims), cplx{});
  std::vector<std::span<const cplx>> views(n);
  for (std::size_t r = 0; r < c.rank(); ++r) {
    for (std::size_t k = 0; k < n; ++k) views[k] = c.core(r, k);
    kernels::add_outer_product(views, cplx(1), out);
  }
  return {dims, std::move(out)};
}

std::vector<std::vector<std::size_t>> all_permutations(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<std::vector<std::size_t>> cyclic_shifts(std::size_t n) {
  std::vector<std::vector<std::size_t>> out(n, std::vector<std::size_t>(n));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t j = 0; j < n; ++j) out[s][j] = (j + s) % n;
  return out;
}

namespace {

DenseTensor average_over(const DenseTensor& a,
                         const std::vector<std::vector<std::size_t>>& perms) {
  return a.visit([&](auto data) {
    using T = typename decltype(data)::value_type;
    std::vector<T> out(data.size());
    kernels::permutation_average(data, a.shape(), perms, std::span<T>(out));
    return DenseTensor(a.shape(), std::move(out));
  });
}

}  // namespace

DenseTensor symmetrize_full(const DenseTensor& a, std::size_t max_order) {
  if (!a.is_hypercubic())
    throw ShapeError("symmetrize_full needs equal axis lengths, got " + shape_string(a.shape()));
  if (a.order() > max_order)
    throw CapacityError("symmetrize_full: order " + std::to_string(a.order()) +
                        " exceeds limit " + std::to_string(max_order));
  return average_over(a, all_permutations(a.order()));
}

DenseTensor symmetrize_cyclic(const DenseTensor& a) {
  if (!a.is_hypercubic())
    throw ShapeError("symmetrize_cyclic needs equal axis lengths, got " + shape_string(a.shape()));
  return average_over(a, cyclic_shifts(a.order()));
}

double operator_norm_order2(const DenseTensor& a) {
  if (a.order() != 2) throw ShapeError("operator_norm_order2 needs an order-2 tensor");
  const auto rows = static_cast<Eigen::Index>(a.shape()[0]);
  const auto cols = static_cast<Eigen::Index>(a.shape()[1]);
  if (a.is_real()) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        a.real_data().data(), rows, cols);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
  }
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      a.complex_data().data(), rows, cols);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

bool approx_equal(double a, double b, double rel, double abs_floor) {
  return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

}  // namespace injnorm
