#include "injnorm/kernels.hpp"

#include <algorithm>
#include <string>

namespace injnorm::kernels {
namespace {

// Upper bound on the number of partial-sum blocks a reduction is split into.
constexpr std::size_t kMaxBlocks = 64;
// Below this many multiply-adds a kernel runs single-threaded.
constexpr std::size_t kParallelWork = std::size_t{1} << 16;

template <class T>
std::vector<T> kron(std::span<const std::span<const T>> w, std::size_t begin,
                    std::size_t end, T scale = T(1)) {
  std::vector<T> acc{scale};
  for (std::size_t j = begin; j < end; ++j) {
    const auto f = w[j];
    std::vector<T> next(acc.size() * f.size());
    for (std::size_t a = 0; a < acc.size(); ++a)
      for (std::size_t b = 0; b < f.size(); ++b) next[a * f.size() + b] = acc[a] * f[b];
    acc = std::move(next);
  }
  return acc;
}

template <class T>
inline T dot(const T* x, const T* y, std::size_t len) {
  T s{};
  for (std::size_t q = 0; q < len; ++q) s += x[q] * y[q];
  return s;
}

template <class T>
void check_weights(const Shape& shape, std::span<const std::span<const T>> weights,
                   std::size_t skip) {
  if (weights.size() != shape.size())
    throw ShapeError("expected one weight vector per axis");
  for (std::size_t j = 0; j < shape.size(); ++j)
    if (j != skip && weights[j].size() != shape[j])
      throw ShapeError("weight " + std::to_string(j) + " has length " +
                       std::to_string(weights[j].size()) + ", axis has " +
                       std::to_string(shape[j]));
}

template <class T>
void contract_except_impl(std::span<const T> psi, const Shape& shape,
                          std::span<const std::span<const T>> weights, std::size_t k,
                          std::span<T> out) {
  const std::size_t n = shape.size();
  if (k >= n) throw IndexError("contraction axis out of range");
  if (psi.size() != shape_size(shape)) throw ShapeError("data/shape mismatch");
  if (out.size() != shape[k]) throw ShapeError("output length mismatch");
  check_weights(shape, weights, k);

  const auto left = kron(weights, 0, k);
  const auto right = kron(weights, k + 1, n);
  const std::size_t n_left = left.size(), dk = shape[k], n_right = right.size();
  const T* data = psi.data();
  const T* r = right.data();
  const bool parallel = psi.size() >= kParallelWork;

  if (n_left == 1) {
#pragma omp parallel for schedule(static) if (parallel)
    for (std::size_t i = 0; i < dk; ++i) out[i] = dot(data + i * n_right, r, n_right);
    return;
  }

  const std::size_t blocks = std::min(n_left, kMaxBlocks);
  std::vector<T> partial(blocks * dk, T{});
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t p0 = b * n_left / blocks, p1 = (b + 1) * n_left / blocks;
    T* acc = partial.data() + b * dk;
    for (std::size_t p = p0; p < p1; ++p) {
      const T* base = data + p * dk * n_right;
      const T wl = left[p];
      if (n_right == 1) {
        for (std::size_t i = 0; i < dk; ++i) acc[i] += wl * base[i];
      } else {
        for (std::size_t i = 0; i < dk; ++i) acc[i] += wl * dot(base + i * n_right, r, n_right);
      }
    }
  }
  std::fill(out.begin(), out.end(), T{});
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t i = 0; i < dk; ++i) out[i] += partial[b * dk + i];
}

template <class T>
void contract_last_impl(std::span<const T> psi, const Shape& shape, std::span<const T> w,
                        std::span<T> out) {
  if (shape.empty() || psi.size() != shape_size(shape)) throw ShapeError("data/shape mismatch");
  const std::size_t dl = shape.back();
  if (w.size() != dl) throw ShapeError("contract_last: weight length mismatch");
  const std::size_t rows = psi.size() / dl;
  if (out.size() != rows) throw ShapeError("contract_last: output length mismatch");
  const T* data = psi.data();
  const T* wp = w.data();
#pragma omp parallel for schedule(static) if (psi.size() >= kParallelWork)
  for (std::size_t p = 0; p < rows; ++p) out[p] = dot(data + p * dl, wp, dl);
}

template <class T>
void contract_each_impl(std::span<const T> psi, const Shape& shape,
                        std::span<const std::span<const T>> weights,
                        std::span<const std::span<T>> outs) {
  const std::size_t n = shape.size();
  if (outs.size() != n) throw ShapeError("contract_each: need one output per axis");
  check_weights(shape, weights, n);
  if (n == 1) {
    if (outs[0].size() != psi.size()) throw ShapeError("contract_each: output length mismatch");
    std::copy(psi.begin(), psi.end(), outs[0].begin());
    return;
  }
  contract_except_impl<T>(psi, shape, weights, n - 1, outs[n - 1]);
  // Peel the last axis and recurse on the order n-1 remainder.
  Shape head(shape.begin(), shape.end() - 1);
  std::vector<T> reduced(psi.size() / shape.back());
  contract_last_impl<T>(psi, shape, weights[n - 1], reduced);
  contract_each_impl<T>(reduced, head, weights.first(n - 1), outs.first(n - 1));
}

template <class T>
T contract_all_impl(std::span<const T> psi, const Shape& shape,
                    std::span<const std::span<const T>> weights) {
  check_weights(shape, weights, shape.size());
  const std::size_t last = shape.size() - 1;
  std::vector<T> v(shape[last]);
  contract_except_impl<T>(psi, shape, weights, last, v);
  return dot(v.data(), weights[last].data(), v.size());
}

template <class T>
void add_outer_product_impl(std::span<const std::span<const T>> factors, T scale,
                            std::span<T> out) {
  if (factors.empty()) throw ShapeError("outer product of zero factors");
  std::size_t total = 1;
  for (auto f : factors) total *= f.size();
  if (total != out.size()) throw ShapeError("outer product size mismatch");

  const auto left = kron(factors, 0, factors.size() - 1, scale);
  const auto last = factors.back();
  const std::size_t dl = last.size();
#pragma omp parallel for schedule(static) if (total >= kParallelWork)
  for (std::size_t p = 0; p < left.size(); ++p) {
    T* row = out.data() + p * dl;
    const T wl = left[p];
    for (std::size_t i = 0; i < dl; ++i) row[i] += wl * last[i];
  }
}

template <class T>
void permutation_average_impl(std::span<const T> x, const Shape& shape,
                              std::span<const std::vector<std::size_t>> perms,
                              std::span<T> out) {
  const std::size_t n = shape.size();
  if (x.size() != shape_size(shape) || out.size() != x.size())
    throw ShapeError("permutation_average size mismatch");
  if (perms.empty()) throw SpecError("no permutations given");
  const auto strides = row_major_strides(shape);

  // Source strides per output axis for each permutation.
  std::vector<std::vector<std::size_t>> src_strides;
  src_strides.reserve(perms.size());
  for (const auto& p : perms) {
    if (p.size() != n) throw SpecError("permutation has wrong length");
    std::vector<std::size_t> s(n, 0);
    std::vector<bool> seen(n, false);
    for (std::size_t j = 0; j < n; ++j) {
      if (p[j] >= n || seen[p[j]]) throw SpecError("not a permutation");
      if (shape[p[j]] != shape[j]) throw ShapeError("permutation mixes axes of different length");
      seen[p[j]] = true;
      s[p[j]] = strides[j];
    }
    src_strides.push_back(std::move(s));
  }

  const std::size_t d0 = shape[0];
  const std::size_t inner = x.size() / d0;
  const double inv = 1.0 / static_cast<double>(perms.size());
#pragma omp parallel for schedule(static) if (x.size() * perms.size() >= kParallelWork)
  for (std::size_t i0 = 0; i0 < d0; ++i0) {
    T* dst = out.data() + i0 * inner;
    std::fill(dst, dst + inner, T{});
    std::vector<std::size_t> idx(n, 0);
    for (const auto& s : src_strides) {
      std::fill(idx.begin(), idx.end(), 0);
      std::size_t src = i0 * s[0];
      for (std::size_t f = 0; f < inner; ++f) {
        dst[f] += x[src];
        // odometer over axes 1..n-1
        for (std::size_t m = n; m-- > 1;) {
          if (++idx[m] < shape[m]) {
            src += s[m];
            break;
          }
          idx[m] = 0;
          src -= (shape[m] - 1) * s[m];
        }
      }
    }
    for (std::size_t f = 0; f < inner; ++f) dst[f] *= inv;
  }
}

template <class T>
void mps_contract_impl(std::span<const std::span<const T>> locals, const Shape& phys,
                       const Shape& bond, std::span<T> out) {
  const std::size_t n = phys.size();
  if (n == 0 || bond.size() != n || locals.size() != n)
    throw ShapeError("MPS needs matching site, bond and local-tensor counts");
  for (std::size_t k = 0; k < n; ++k)
    if (locals[k].size() != bond[k] * phys[k] * bond[(k + 1) % n])
      throw ShapeError("local tensor " + std::to_string(k) + " does not match bond chain");
  if (out.size() != shape_size(phys)) throw ShapeError("MPS output size mismatch");

  const std::size_t q0 = bond[0];
  // Element (a, s, b) of site k.
  auto slice = [&](std::size_t k, std::size_t s) {
    return locals[k].data() + s * bond[(k + 1) % n];
  };
  auto row_stride = [&](std::size_t k) { return phys[k] * bond[(k + 1) % n]; };

  // closing trace: sum_{a,b} P[a,b] * A_last[b, s, a]
  auto close = [&](const T* prefix, std::size_t qk, std::size_t s) {
    const std::size_t k = n - 1;
    const T* a_last = slice(k, s);
    const std::size_t rs = row_stride(k);
    T acc{};
    for (std::size_t a = 0; a < q0; ++a)
      for (std::size_t b = 0; b < qk; ++b) acc += prefix[a * qk + b] * a_last[b * rs + a];
    return acc;
  };

  if (n == 1) {
    for (std::size_t s = 0; s < phys[0]; ++s) {
      std::vector<T> id(q0 * q0, T{});
      for (std::size_t a = 0; a < q0; ++a) id[a * q0 + a] = T(1);
      out[s] = close(id.data(), q0, s);
    }
    return;
  }

  const std::size_t inner = out.size() / phys[0];
  const std::size_t work = out.size() * q0 * q0 * *std::max_element(bond.begin(), bond.end());
#pragma omp parallel for schedule(static) if (work >= kParallelWork)
  for (std::size_t s0 = 0; s0 < phys[0]; ++s0) {
    // prefix[k] = A_0[s_0] ... A_k[s_k], a q0 x bond[k+1] matrix, k = 0..n-2
    std::vector<std::vector<T>> prefix(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) prefix[k].assign(q0 * bond[k + 1], T{});
    {
      const T* a0 = slice(0, s0);
      const std::size_t rs = row_stride(0);
      for (std::size_t a = 0; a < q0; ++a)
        for (std::size_t b = 0; b < bond[1]; ++b) prefix[0][a * bond[1] + b] = a0[a * rs + b];
    }
    std::vector<std::size_t> s(n, 0);
    s[0] = s0;
    std::size_t dirty = 1;  // first site whose prefix must be rebuilt
    for (std::size_t f = 0; f < inner; ++f) {
      for (std::size_t k = dirty; k + 1 < n; ++k) {
        const std::size_t qk = bond[k], qn = bond[k + 1];
        const T* ak = slice(k, s[k]);
        const std::size_t rs = row_stride(k);
        const T* p = prefix[k - 1].data();
        T* dst = prefix[k].data();
        std::fill(dst, dst + q0 * qn, T{});
        for (std::size_t a = 0; a < q0; ++a)
          for (std::size_t m = 0; m < qk; ++m) {
            const T pm = p[a * qk + m];
            const T* row = ak + m * rs;
            for (std::size_t b = 0; b < qn; ++b) dst[a * qn + b] += pm * row[b];
          }
      }
      out[s0 * inner + f] = close(prefix[n - 2].data(), bond[n - 1], s[n - 1]);
      for (std::size_t m = n; m-- > 1;) {
        if (++s[m] < phys[m]) {
          dirty = m;
          break;
        }
        s[m] = 0;
      }
    }
  }
}

}  // namespace

void contract_except(std::span<const double> psi, const Shape& shape,
                     std::span<const std::span<const double>> weights, std::size_t k,
                     std::span<double> out) {
  contract_except_impl<double>(psi, shape, weights, k, out);
}
void contract_except(std::span<const cplx> psi, const Shape& shape,
                     std::span<const std::span<const cplx>> weights, std::size_t k,
                     std::span<cplx> out) {
  contract_except_impl<cplx>(psi, shape, weights, k, out);
}

void contract_last(std::span<const double> psi, const Shape& shape, std::span<const double> w,
                   std::span<double> out) {
  contract_last_impl<double>(psi, shape, w, out);
}
void contract_last(std::span<const cplx> psi, const Shape& shape, std::span<const cplx> w,
                   std::span<cplx> out) {
  contract_last_impl<cplx>(psi, shape, w, out);
}

void contract_each(std::span<const double> psi, const Shape& shape,
                   std::span<const std::span<const double>> weights,
                   std::span<const std::span<double>> outs) {
  contract_each_impl<double>(psi, shape, weights, outs);
}
void contract_each(std::span<const cplx> psi, const Shape& shape,
                   std::span<const std::span<const cplx>> weights,
                   std::span<const std::span<cplx>> outs) {
  contract_each_impl<cplx>(psi, shape, weights, outs);
}

double contract_all(std::span<const double> psi, const Shape& shape,
                    std::span<const std::span<const double>> weights) {
  return contract_all_impl<double>(psi, shape, weights);
}
cplx contract_all(std::span<const cplx> psi, const Shape& shape,
                  std::span<const std::span<const cplx>> weights) {
  return contract_all_impl<cplx>(psi, shape, weights);
}

void add_outer_product(std::span<const std::span<const double>> factors, double scale,
                       std::span<double> out) {
  add_outer_product_impl<double>(factors, scale, out);
}
void add_outer_product(std::span<const std::span<const cplx>> factors, cplx scale,
                       std::span<cplx> out) {
  add_outer_product_impl<cplx>(factors, scale, out);
}

void permutation_average(std::span<const double> x, const Shape& shape,
                         std::span<const std::vector<std::size_t>> perms,
                         std::span<double> out) {
  permutation_average_impl<double>(x, shape, perms, out);
}
void permutation_average(std::span<const cplx> x, const Shape& shape,
                         std::span<const std::vector<std::size_t>> perms,
                         std::span<cplx> out) {
  permutation_average_impl<cplx>(x, shape, perms, out);
}

void mps_contract(std::span<const std::span<const double>> locals, const Shape& phys,
                  const Shape& bond, std::span<double> out) {
  mps_contract_impl<double>(locals, phys, bond, out);
}
void mps_contract(std::span<const std::span<const cplx>> locals, const Shape& phys,
                  const Shape& bond, std::span<cplx> out) {
  mps_contract_impl<cplx>(locals, phys, bond, out);
}

}  // namespace injnorm::kernels
