#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "injnorm/rng.hpp"
#include "injnorm/tensor.hpp"

namespace injnorm {

/// Product-state approximation algorithms.
///  - ALS: alternating least squares over the cores, normalized after convergence.
///  - PIM: symmetric higher-order power iteration, a <- Psi(conj a, ..., ., ...) / norm.
///  - NGD: normalized gradient descent; cores renormalized before every step.
///  - SGD: NGD with one shared core per rank term (symmetric product states);
///    steps with learning_rate / n so the update matches NGD per slot.
enum class Algorithm { ALS, PIM, NGD, SGD };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::NGD;
  std::size_t rank = 1;
  double learning_rate = 0.05;
  std::size_t max_epochs = 10000;
  /// Stop once the best loss improved by less than `tol` over the last
  /// `plateau_window` epochs.
  double tol = 1e-10;
  std::size_t plateau_window = 100;
  std::size_t restarts = 10;
  Seed seed{};
  bool record_trace = false;

  void validate() const;
};

void to_json(nlohmann::json& j, const OptimizerConfig& c);
/// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, OptimizerConfig& c);

struct OptimizeResult {
  /// Normalized form: every core has unit norm.
  ProductCandidate candidate;
  /// |<Psi|phi>| for rank 1; for rank R > 1 the largest overlap of a single
  /// rank term, which is still a product state and hence a lower bound.
  double overlap = 0;
  /// ||Psi - assemble(candidate)||^2.
  double loss = 0;
  std::size_t epochs_used = 0;
  std::size_t restart_index = 0;
  /// ALS only: a Gram system was singular and solved with a ridge term.
  bool regularized = false;
  std::vector<double> loss_trace;
};

/// ||psi - assemble(c)||^2.
double loss(const DenseTensor& psi, const ProductCandidate& c);

/// Gradient of the loss with respect to core (r, k). Real and imaginary parts
/// are independent real coordinates: the returned vector is
/// dL/dRe(a) + i dL/dIm(a). For rank 1 and unit cores this is
/// 2 (a_k - Psi contracted with conj(a_j) on every axis j != k).
std::vector<cplx> gradient(const DenseTensor& psi, const ProductCandidate& c, std::size_t k,
                           std::size_t r);

OptimizeResult ngd_fit(const DenseTensor& psi, const OptimizerConfig& cfg,
                       std::size_t restart_index = 0);
OptimizeResult sgd_fit(const DenseTensor& psi, const OptimizerConfig& cfg,
                       std::size_t restart_index = 0);
OptimizeResult als_fit(const DenseTensor& psi, const OptimizerConfig& cfg,
                       std::size_t restart_index = 0);
OptimizeResult pim_fit(const DenseTensor& psi, const OptimizerConfig& cfg,
                       std::size_t restart_index = 0);

/// Dispatches on cfg.algorithm.
OptimizeResult fit(const DenseTensor& psi, const OptimizerConfig& cfg,
                   std::size_t restart_index = 0);

struct InjectiveNormEstimate {
  double euclidean_norm = 0;
  /// Largest overlap over all restarts: a lower bound on the injective norm.
  double injective_norm = 0;
  /// injective_norm / euclidean_norm.
  double normalized = 0;
  /// -log2(normalized^2).
  double gme_bits = 0;
  OptimizeResult best;
};

/// Runs cfg.restarts independently seeded fits (concurrently when OpenMP
/// threads are available) and keeps the best overlap; ties go to the lowest
/// restart index. Throws ZeroTensorError for the zero tensor.
InjectiveNormEstimate estimate_injective_norm(const DenseTensor& psi, const OptimizerConfig& cfg);

/// Writes "epoch,loss" rows for a recorded loss trace.
void write_loss_trace_csv(std::ostream& os, const OptimizeResult& r);

}  // namespace injnorm
