#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "injnorm/optimizers.hpp"
#include "injnorm/random_models.hpp"

namespace injnorm {

struct ExperimentConfig {
  /// Template spec; grid values replace its d (and q for MPS kinds).
  ModelSpec model;
  std::vector<Algorithm> algorithms{Algorithm::NGD};
  OptimizerConfig optimizer;
  std::vector<std::size_t> d_grid;
  std::vector<std::size_t> q_grid;
  std::size_t samples = 20;
  Seed seed{};
  std::string output;
  /// Divide every sampled tensor by its norm before optimizing.
  bool normalize_input = false;
  /// When false the wall_time_ms column is written as 0.
  bool record_wall_time = true;

  void validate() const;
  /// Model spec for every grid point, in run order.
  std::vector<ModelSpec> grid() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

struct ResultRecord {
  std::string model_kind;
  std::string field;
  std::size_t n = 0;
  std::string d;
  std::string q;
  std::string symmetry;
  std::string algorithm;
  std::size_t rank = 1;
  std::uint64_t seed = 0;
  std::size_t sample_index = 0;
  double euclidean_norm = 0;
  double injective_estimate = 0;
  double normalized_estimate = 0;
  double gme_bits = 0;
  std::size_t epochs_used = 0;
  std::size_t restarts = 0;
  double wall_time_ms = 0;
  /// Set on rows whose estimate failed; numeric result columns are then empty.
  std::optional<std::string> error;
};

/// Seed of the tensor at (d, q, sample): independent of the rest of the grid.
Seed sample_seed(Seed master, const ModelSpec& point);
Seed optimizer_seed(Seed master, const ModelSpec& point, std::size_t sample_index);

/// Samples, estimates and records every grid point x sample x algorithm.
/// Records are written to `out` (header first) in that order as soon as all
/// earlier records are complete.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg, std::ostream* out = nullptr);

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const ResultRecord& r);
/// Parses a CSV written by write_csv_header / write_csv_row. Throws FormatError.
std::vector<ResultRecord> read_results_csv(std::istream& is);

/// Worker threads from INJNORM_THREADS, or 0 when unset.
int configured_threads();
void apply_thread_setting();

}  // namespace injnorm
