#include "injnorm/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "injnorm/errors.hpp"

namespace injnorm {

std::string_view to_string(FitKind k) {
  return k == FitKind::SqrtInverse ? "sqrt-inverse" : "mps-surface";
}

FitKind parse_fit_kind(std::string_view s) {
  if (s == "sqrt-inverse" || s == "sqrt_inverse") return FitKind::SqrtInverse;
  if (s == "mps-surface" || s == "mps_surface") return FitKind::MPSSurface;
  throw SpecError("unknown fit model '" + std::string(s) + "'");
}

std::vector<double> fit_basis(FitKind kind, double d, double q) {
  if (!(d > 0)) throw SpecError("fit abscissa d must be positive");
  if (kind == FitKind::SqrtInverse) return {1.0, 1.0 / std::sqrt(d)};
  if (!(q > 0)) throw SpecError("fit abscissa q must be positive");
  const double sd = std::sqrt(d), sq = std::sqrt(q);
  return {1.0 / sd, 1.0 / sq, 1.0 / (sd * sq), 1.0 / d, 1.0 / q, 1.0 / (d * q)};
}

double fit_predict(FitKind kind, const std::vector<double>& constants, double d, double q) {
  const auto b = fit_basis(kind, d, q);
  if (constants.size() != b.size()) throw SpecError("wrong number of fit constants");
  double s = 0;
  for (std::size_t i = 0; i < b.size(); ++i) s += constants[i] * b[i];
  return kind == FitKind::MPSSurface ? s * s : s;
}

double FitResult::predict(double d, double q) const { return fit_predict(kind, constants, d, q); }

namespace {

Eigen::VectorXd solve_least_squares(FitKind kind, const std::vector<FitPoint>& points,
                                    const Eigen::VectorXd& target) {
  const auto m = static_cast<Eigen::Index>(points.size());
  const Eigen::Index p = kind == FitKind::SqrtInverse ? 2 : 6;
  Eigen::MatrixXd a(m, p);
  Eigen::VectorXd b = target;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& pt = points[static_cast<std::size_t>(i)];
    if (!(pt.weight > 0)) throw SpecError("fit weights must be positive");
    const double sw = std::sqrt(pt.weight);
    const auto row = fit_basis(kind, pt.d, pt.q);
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = sw * row[static_cast<std::size_t>(j)];
    b(i) *= sw;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < p)
    throw RankError("design matrix has rank " + std::to_string(qr.rank()) + " < " +
                    std::to_string(p));
  return qr.solve(b);
}

FitResult summarize(FitKind kind, const std::vector<FitPoint>& points, std::vector<double> c) {
  FitResult r;
  r.kind = kind;
  r.constants = std::move(c);
  r.n_points = points.size();
  double ape = 0;
  std::size_t counted = 0;
  for (const auto& pt : points) {
    const double res = pt.y - r.predict(pt.d, pt.q);
    r.residuals.push_back(res);
    if (pt.y != 0) {
      ape += std::abs(res / pt.y);
      ++counted;
    }
  }
  r.mape = counted ? 100.0 * ape / static_cast<double>(counted) : 0.0;
  return r;
}

}  // namespace

FitResult fit_sqrt_inverse(const std::vector<FitPoint>& points) {
  std::set<double> distinct;
  for (const auto& p : points) distinct.insert(p.d);
  if (distinct.size() < 2) throw RankError("sqrt-inverse fit needs at least 2 distinct d values");
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) y(static_cast<Eigen::Index>(i)) = points[i].y;
  const Eigen::VectorXd x = solve_least_squares(FitKind::SqrtInverse, points, y);
  return summarize(FitKind::SqrtInverse, points, {x(0), x(1)});
}

FitResult fit_mps_surface(const std::vector<FitPoint>& points) {
  if (points.size() < 6) throw RankError("mps-surface fit needs at least 6 points");
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].y < 0) throw SpecError("mps-surface fit needs non-negative y");
    y(static_cast<Eigen::Index>(i)) = std::sqrt(points[i].y);
  }
  Eigen::VectorXd x = solve_least_squares(FitKind::MPSSurface, points, y);
  // Canonical branch: the linear combination is positive on the data.
  double lin_sum = 0;
  for (const auto& pt : points) {
    const auto b = fit_basis(FitKind::MPSSurface, pt.d, pt.q);
    for (std::size_t j = 0; j < b.size(); ++j) lin_sum += x(static_cast<Eigen::Index>(j)) * b[j];
  }
  if (lin_sum < 0) x = -x;
  std::vector<double> c(x.data(), x.data() + x.size());
  for (auto& v : c)
    if (v == 0) v = 0.0;
  return summarize(FitKind::MPSSurface, points, std::move(c));
}

FitResult fit(FitKind kind, const std::vector<FitPoint>& points) {
  return kind == FitKind::SqrtInverse ? fit_sqrt_inverse(points) : fit_mps_surface(points);
}

nlohmann::json fit_report(const FitResult& r) {
  return nlohmann::json{{"model", to_string(r.kind)},
                        {"constants", r.constants},
                        {"mape", r.mape},
                        {"n_points", r.n_points}};
}

}  // namespace injnorm
