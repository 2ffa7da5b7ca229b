#include "injnorm/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace injnorm {

std::string_view to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

Field parse_field(std::string_view s) {
  if (s == "real" || s == "Real") return Field::Real;
  if (s == "complex" || s == "Complex") return Field::Complex;
  throw SpecError("unknown field '" + std::string(s) + "'");
}

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ')';
  return os.str();
}

std::vector<std::size_t> row_major_strides(const Shape& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t k = shape.size(); k-- > 1;) strides[k - 1] = strides[k] * shape[k];
  return strides;
}

namespace {

void check_shape(const Shape& shape, std::size_t data_size) {
  if (shape.empty()) throw ShapeError("tensor order must be at least 1");
  for (auto d : shape)
    if (d == 0) throw ShapeError("zero-length axis in shape " + shape_string(shape));
  if (shape_size(shape) != data_size)
    throw ShapeError("data length " + std::to_string(data_size) +
                     " does not match shape " + shape_string(shape));
}

}  // namespace

DenseTensor::DenseTensor(Shape shape, RealData data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_, std::get<RealData>(data_).size());
}

DenseTensor::DenseTensor(Shape shape, ComplexData data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_, std::get<ComplexData>(data_).size());
}

DenseTensor DenseTensor::zeros(Shape shape, Field field) {
  const auto n = shape_size(shape);
  if (field == Field::Real) return {std::move(shape), RealData(n, 0.0)};
  return {std::move(shape), ComplexData(n, cplx{})};
}

std::size_t DenseTensor::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, data_);
}

bool DenseTensor::is_hypercubic() const noexcept {
  for (auto d : shape_)
    if (d != shape_.front()) return false;
  return !shape_.empty();
}

std::span<const double> DenseTensor::real_data() const {
  if (!is_real()) throw FieldError("real_data() on a complex tensor");
  return std::get<RealData>(data_);
}

std::span<const cplx> DenseTensor::complex_data() const {
  if (is_real()) throw FieldError("complex_data() on a real tensor");
  return std::get<ComplexData>(data_);
}

cplx DenseTensor::at(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) throw IndexError("index order mismatch");
  std::size_t flat_index = 0;
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= shape_[k]) throw IndexError("index out of range");
    flat_index = flat_index * shape_[k] + index[k];
  }
  return flat(flat_index);
}

cplx DenseTensor::flat(std::size_t i) const {
  return std::visit([i](const auto& v) { return cplx(v.at(i)); }, data_);
}

DenseTensor DenseTensor::to_complex() const {
  if (!is_real()) return *this;
  const auto& re = std::get<RealData>(data_);
  return {shape_, ComplexData(re.begin(), re.end())};
}

DenseTensor DenseTensor::scaled(double factor) const {
  return std::visit([&](const auto& v) {
    auto copy = v;
    for (auto& x : copy) x *= factor;
    return DenseTensor(shape_, std::move(copy));
  }, data_);
}

ProductCandidate::ProductCandidate(Field field, Shape dims, std::size_t rank)
    : field_(field), dims_(std::move(dims)), rank_(rank) {
  if (rank_ == 0) throw SpecError("candidate rank must be >= 1");
  if (dims_.empty()) throw ShapeError("candidate needs at least one factor");
  cores_.reserve(rank_ * dims_.size());
  for (std::size_t r = 0; r < rank_; ++r)
    for (auto d : dims_) cores_.emplace_back(d, cplx{});
}

void ProductCandidate::check(std::size_t r, std::size_t k) const {
  if (r >= rank_ || k >= dims_.size())
    throw IndexError("core (" + std::to_string(r) + "," + std::to_string(k) +
                     ") out of range");
}

std::span<cplx> ProductCandidate::core(std::size_t r, std::size_t k) {
  check(r, k);
  return cores_[r * dims_.size() + k];
}

std::span<const cplx> ProductCandidate::core(std::size_t r, std::size_t k) const {
  check(r, k);
  return cores_[r * dims_.size() + k];
}

bool ProductCandidate::is_normalized(double tol) const {
  for (const auto& c : cores_) {
    double s = 0;
    for (auto x : c) s += std::norm(x);
    if (std::abs(std::sqrt(s) - 1.0) > tol) return false;
  }
  return true;
}

void ProductCandidate::normalize() {
  for (auto& c : cores_) {
    double s = 0;
    for (auto x : c) s += std::norm(x);
    const double nrm = std::sqrt(s);
    if (nrm == 0) throw ZeroTensorError("cannot normalize a zero core");
    for (auto& x : c) x /= nrm;
  }
}

}  // namespace injnorm
