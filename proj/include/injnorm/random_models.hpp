#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "injnorm/rng.hpp"
#include "injnorm/tensor.hpp"

namespace injnorm {

enum class ModelKind { Gaussian, GaussianSymmetrized, GaussianCyclic, MPS, MPSTranslationInvariant };

std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);
bool is_mps(ModelKind k) noexcept;

/// Declarative description of a random tensor ensemble.
///
/// Gaussian kinds use a single local dimension `d[0]` on every axis. MPS kinds
/// carry one physical dimension and one bond dimension per site; bond `q[k]`
/// sits to the left of site k and the chain closes with q[n] = q[0].
struct ModelSpec {
  ModelKind kind = ModelKind::Gaussian;
  Field field = Field::Real;
  std::size_t n = 3;
  std::vector<std::size_t> d{2};
  std::vector<std::size_t> q;
  Seed seed{};

  /// Throws SpecError when the invariants of `kind` do not hold.
  void validate() const;
  std::size_t local_dim(std::size_t site) const;
  std::size_t bond_dim(std::size_t site) const;  // wraps modulo n
  Shape shape() const;

  /// Gaussian spec of the same field, order and dimension (the tensor that
  /// symmetrized kinds project).
  ModelSpec auxiliary_gaussian() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

void to_json(nlohmann::json& j, const ModelSpec& s);
void from_json(const nlohmann::json& j, ModelSpec& s);

/// Entries iid N(0, 2/d). Complex entries draw real and imaginary parts from
/// N(0, 2/d) and are then multiplied by 1/sqrt(2), so E||X||^2 = 2 d^(n-1) for both fields.
DenseTensor sample_gaussian(const ModelSpec& spec, Seed seed, std::uint64_t sample_index = 0);

/// symmetrize_full of the Gaussian sample with the same seed and index.
DenseTensor sample_symmetrized(const ModelSpec& spec, Seed seed, std::uint64_t sample_index = 0);

/// symmetrize_cyclic of the Gaussian sample with the same seed and index.
DenseTensor sample_cyclic(const ModelSpec& spec, Seed seed, std::uint64_t sample_index = 0);

/// Local tensor of site k (0-based) with shape (q_k, d_k, q_{k+1}); entries
/// N(0, 2 / (d_k sqrt(q_k q_{k+1}))), complex ones scaled by 1/sqrt(2).
/// Translation-invariant specs return the same tensor for every site.
DenseTensor sample_mps_local(std::size_t site, const ModelSpec& spec, Seed seed,
                             std::uint64_t sample_index = 0);

/// Periodic contraction X[s_1..s_n] = tr(A1[:,s_1,:] ... An[:,s_n,:]).
DenseTensor assemble_mps(const std::vector<DenseTensor>& locals);

DenseTensor sample_mps(const ModelSpec& spec, Seed seed, std::uint64_t sample_index = 0);

/// Dispatches on spec.kind.
DenseTensor sample_model(const ModelSpec& spec, Seed seed, std::uint64_t sample_index = 0);

}  // namespace injnorm
