#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace injnorm {

/// SqrtInverse: y = C1 + C2 / sqrt(d).
/// MPSSurface:  y = (C1/sqrt(d) + C2/sqrt(q) + C3/sqrt(dq) + C4/d + C5/q + C6/(dq))^2.
enum class FitKind { SqrtInverse, MPSSurface };

std::string_view to_string(FitKind k);
FitKind parse_fit_kind(std::string_view s);

struct FitPoint {
  double d = 0;
  double q = 0;
  double y = 0;
  double weight = 1;
};

struct FitResult {
  FitKind kind = FitKind::SqrtInverse;
  std::vector<double> constants;
  /// y - predicted, in input order.
  std::vector<double> residuals;
  /// Mean of |residual / y| in percent over points with y != 0.
  double mape = 0;
  std::size_t n_points = 0;

  double predict(double d, double q = 0) const;
};

/// Basis values at one point, in constant order.
std::vector<double> fit_basis(FitKind kind, double d, double q = 0);
double fit_predict(FitKind kind, const std::vector<double>& constants, double d, double q = 0);

/// Weighted when any point carries a weight other than 1.
FitResult fit_sqrt_inverse(const std::vector<FitPoint>& points);
FitResult fit_mps_surface(const std::vector<FitPoint>& points);
FitResult fit(FitKind kind, const std::vector<FitPoint>& points);

/// {model, constants, mape, n_points}
nlohmann::json fit_report(const FitResult& r);

}  // namespace injnorm
