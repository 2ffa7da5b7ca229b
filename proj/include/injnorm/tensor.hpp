#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "injnorm/errors.hpp"

namespace injnorm {

using cplx = std::complex<double>;
using Shape = std::vector<std::size_t>;

/// Scalar results of inner products. Real-field values carry an exactly
/// zero imaginary part.
using Scalar = cplx;

enum class Field : std::uint8_t { Real = 0, Complex = 1 };

std::string_view to_string(Field f);
Field parse_field(std::string_view s);

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Row-major strides for `shape` (last axis contiguous).
std::vector<std::size_t> row_major_strides(const Shape& shape);

/// Dense order-n tensor over the reals or complexes, stored row-major.
/// Immutable once built; all operations return new tensors.
class DenseTensor {
 public:
  using RealData = std::vector<double>;
  using ComplexData = std::vector<cplx>;

  DenseTensor() = default;
  DenseTensor(Shape shape, RealData data);
  DenseTensor(Shape shape, ComplexData data);

  static DenseTensor zeros(Shape shape, Field field);

  Field field() const noexcept {
    return std::holds_alternative<RealData>(data_) ? Field::Real : Field::Complex;
  }
  bool is_real() const noexcept { return field() == Field::Real; }
  const Shape& shape() const noexcept { return shape_; }
  std::size_t order() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept;
  bool is_hypercubic() const noexcept;

  std::span<const double> real_data() const;
  std::span<const cplx> complex_data() const;

  /// Entry at a multi-index, promoted to complex.
  cplx at(std::span<const std::size_t> index) const;
  cplx flat(std::size_t i) const;

  DenseTensor to_complex() const;
  DenseTensor scaled(double factor) const;

  /// Calls `f(std::span<const T>)` with T = double or cplx.
  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit([&](const auto& v) -> decltype(auto) {
      using V = std::decay_t<decltype(v)>;
      return f(std::span<const typename V::value_type>(v));
    }, data_);
  }

 private:
  Shape shape_;
  std::variant<RealData, ComplexData> data_{RealData{}};
};

/// Rank-R sum of product tensors, stored as R x n per-factor cores.
/// Cores are kept in complex form; real-field candidates have zero
/// imaginary parts throughout.
class ProductCandidate {
 public:
  ProductCandidate() = default;
  ProductCandidate(Field field, Shape dims, std::size_t rank);

  Field field() const noexcept { return field_; }
  const Shape& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return rank_; }
  std::size_t order() const noexcept { return dims_.size(); }

  std::span<cplx> core(std::size_t r, std::size_t k);
  std::span<const cplx> core(std::size_t r, std::size_t k) const;

  /// True when every core has unit Euclidean norm within `tol`.
  bool is_normalized(double tol = 1e-12) const;
  void normalize();

 private:
  void check(std::size_t r, std::size_t k) const;

  Field field_ = Field::Real;
  Shape dims_;
  std::size_t rank_ = 0;
  std::vector<std::vector<cplx>> cores_;  // index r * n + k
};

}  // namespace injnorm
