#include "injnorm/reference_kernels.hpp"

namespace injnorm::reference {
namespace {

std::vector<std::size_t> decode(std::size_t flat, const Shape& shape) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t k = shape.size(); k-- > 0;) {
    idx[k] = flat % shape[k];
    flat /= shape[k];
  }
  return idx;
}

}  // namespace

void contract_except(std::span<const cplx> psi, const Shape& shape,
                     std::span<const std::span<const cplx>> weights, std::size_t k,
                     std::span<cplx> out) {
  if (psi.size() != shape_size(shape) || out.size() != shape.at(k))
    throw ShapeError("reference contract_except: size mismatch");
  for (auto& o : out) o = 0;
  for (std::size_t f = 0; f < psi.size(); ++f) {
    const auto idx = decode(f, shape);
    cplx w = psi[f];
    for (std::size_t j = 0; j < shape.size(); ++j)
      if (j != k) w *= weights[j][idx[j]];
    out[idx[k]] += w;
  }
}

cplx contract_all(std::span<const cplx> psi, const Shape& shape,
                  std::span<const std::span<const cplx>> weights) {
  cplx acc = 0;
  for (std::size_t f = 0; f < psi.size(); ++f) {
    const auto idx = decode(f, shape);
    cplx w = psi[f];
    for (std::size_t j = 0; j < shape.size(); ++j) w *= weights[j][idx[j]];
    acc += w;
  }
  return acc;
}

void add_outer_product(std::span<const std::span<const cplx>> factors, cplx scale,
                       std::span<cplx> out) {
  Shape shape;
  for (auto f : factors) shape.push_back(f.size());
  if (shape_size(shape) != out.size()) throw ShapeError("reference outer product: size mismatch");
  for (std::size_t f = 0; f < out.size(); ++f) {
    const auto idx = decode(f, shape);
    cplx w = scale;
    for (std::size_t j = 0; j < shape.size(); ++j) w *= factors[j][idx[j]];
    out[f] += w;
  }
}

void permutation_average(std::span<const cplx> x, const Shape& shape,
                         std::span<const std::vector<std::size_t>> perms,
                         std::span<cplx> out) {
  const auto strides = row_major_strides(shape);
  for (std::size_t f = 0; f < x.size(); ++f) {
    const auto idx = decode(f, shape);
    cplx acc = 0;
    for (const auto& p : perms) {
      std::size_t src = 0;
      for (std::size_t j = 0; j < shape.size(); ++j) src += idx[p[j]] * strides[j];
      acc += x[src];
    }
    out[f] = acc / static_cast<double>(perms.size());
  }
}

void mps_contract(std::span<const std::span<const cplx>> locals, const Shape& phys,
                  const Shape& bond, std::span<cplx> out) {
  const std::size_t n = phys.size();
  for (std::size_t f = 0; f < out.size(); ++f) {
    const auto s = decode(f, phys);
    cplx acc = 0;
    const std::size_t bond_states = shape_size(bond);
    for (std::size_t b = 0; b < bond_states; ++b) {
      const auto i = decode(b, bond);
      cplx term = 1;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t next = (k + 1) % n;
        term *= locals[k][(i[k] * phys[k] + s[k]) * bond[next] + i[next]];
      }
      acc += term;
    }
    out[f] = acc;
  }
}

}  // namespace injnorm::reference
