#include "injnorm/optimizers.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "injnorm/kernels.hpp"
#include "injnorm/linalg.hpp"

namespace injnorm {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ALS: return "als";
    case Algorithm::PIM: return "pim";
    case Algorithm::NGD: return "ngd";
    case Algorithm::SGD: return "sgd";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) {
    return static_cast<char>(std::tolower(ch));
  });
  if (lower == "als") return Algorithm::ALS;
  if (lower == "pim") return Algorithm::PIM;
  if (lower == "ngd") return Algorithm::NGD;
  if (lower == "sgd") return Algorithm::SGD;
  throw SpecError("unknown algorithm '" + std::string(s) + "'");
}

void OptimizerConfig::validate() const {
  if (rank == 0) throw SpecError("rank must be >= 1");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate))
    throw SpecError("learning_rate must be positive");
  if (max_epochs == 0) throw SpecError("max_epochs must be positive");
  if (!(tol >= 0)) throw SpecError("tol must be >= 0");
  if (plateau_window == 0) throw SpecError("plateau_window must be positive");
  if (restarts == 0) throw SpecError("restarts must be >= 1");
}

void to_json(nlohmann::json& j, const OptimizerConfig& c) {
  j = nlohmann::json{{"algorithm", to_string(c.algorithm)},
                     {"rank", c.rank},
                     {"learning_rate", c.learning_rate},
                     {"max_epochs", c.max_epochs},
                     {"tol", c.tol},
                     {"plateau_window", c.plateau_window},
                     {"restarts", c.restarts},
                     {"seed", c.seed.value},
                     {"record_trace", c.record_trace}};
}

void from_json(const nlohmann::json& j, OptimizerConfig& c) {
  if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  c.rank = j.value("rank", c.rank);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.tol = j.value("tol", c.tol);
  c.plateau_window = j.value("plateau_window", c.plateau_window);
  c.restarts = j.value("restarts", c.restarts);
  c.seed = Seed{j.value("seed", c.seed.value)};
  c.record_trace = j.value("record_trace", c.record_trace);
}

namespace {

constexpr std::uint64_t kTagInit = 0x696e6974ULL;
constexpr double kRidge = 1e-12;

template <class T>
using Vec = std::vector<T>;
// Cores indexed r * n + k.
template <class T>
using Cores = std::vector<Vec<T>>;

template <class T>
T conj_of(T x) {
  if constexpr (std::is_same_v<T, double>) return x;
  else return std::conj(x);
}

template <class T>
T cdot(std::span<const T> x, std::span<const T> y) {
  T s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += conj_of(x[i]) * y[i];
  return s;
}

template <class T>
double vnorm(std::span<const T> x) {
  double s = 0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

template <class T>
std::span<const T> data_of(const DenseTensor& t) {
  if constexpr (std::is_same_v<T, double>) return t.real_data();
  else return t.complex_data();
}

template <class T>
Vec<T> conj_copy(std::span<const T> x) {
  Vec<T> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](T v) { return conj_of(v); });
  return out;
}

/// Entries N(0, 1/d); complex cores combine two real draws as (a + i a') / sqrt(2).
template <class T>
Vec<T> random_core(GaussianStream& g, std::size_t d) {
  const double sigma = 1.0 / std::sqrt(static_cast<double>(d));
  Vec<T> a(d);
  for (auto& x : a) {
    if constexpr (std::is_same_v<T, double>) {
      x = sigma * g.next();
    } else {
      const double re = sigma * g.next();
      const double im = sigma * g.next();
      x = cplx(re, im) * (1.0 / std::numbers::sqrt2);
    }
  }
  return a;
}

class Plateau {
 public:
  Plateau(std::size_t window, double tol) : window_(window), tol_(tol) {}
  /// Records the best loss so far; true when it stalled over the window.
  bool stalled(double best) {
    history_.push_back(best);
    if (history_.size() <= window_) return false;
    return history_[history_.size() - 1 - window_] - best < tol_;
  }

 private:
  std::size_t window_;
  double tol_;
  std::vector<double> history_;
};

struct Target {
  Shape shape;
  double norm2 = 0;
};

template <class T>
std::vector<std::span<const T>> views(const Cores<T>& cores, std::size_t r, std::size_t n) {
  std::vector<std::span<const T>> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = cores[r * n + k];
  return v;
}

/// Gram products G[r][s] = prod_{j != skip} <a_rj, a_sj>.
template <class T>
std::vector<Vec<T>> gram(const Cores<T>& a, std::size_t rank, std::size_t n, std::size_t skip) {
  std::vector<Vec<T>> g(rank, Vec<T>(rank, T(1)));
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t s = 0; s < rank; ++s)
      for (std::size_t j = 0; j < n; ++j)
        if (j != skip)
          g[r][s] *= cdot<T>(a[r * n + j], a[s * n + j]);
  return g;
}

template <class T>
double phi_norm2(const Cores<T>& a, std::size_t rank, std::size_t n) {
  const auto g = gram(a, rank, n, n);
  double s = 0;
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t q = 0; q < rank; ++q) s += std::real(cplx(g[r][q]));
  return s;
}

/// Builds the result from unit cores: aligns the global phase for rank 1 so
/// that <Psi|phi> is real and non-negative, then evaluates overlap and loss.
/// `symmetric` cores share one vector per rank term.
template <class T>
OptimizeResult finalize(std::span<const T> psi, const Target& tgt, Cores<T> cores,
                        std::size_t rank, bool symmetric) {
  const std::size_t n = tgt.shape.size();
  auto term_overlap = [&](std::size_t r) {
    // sum_i psi_i prod_k conj(a_rk[i_k]) = conj(<Psi|phi_r>)
    std::vector<Vec<T>> cw(n);
    std::vector<std::span<const T>> w(n);
    for (std::size_t k = 0; k < n; ++k) {
      cw[k] = conj_copy<T>(cores[r * n + k]);
      w[k] = cw[k];
    }
    return kernels::contract_all(psi, tgt.shape, w);
  };

  if (rank == 1) {
    const T s = term_overlap(0);
    const double mag = std::abs(s);
    if (mag > 0) {
      if (!symmetric) {
        const T u = s / mag;
        for (auto& x : cores[0]) x *= u;
      } else if constexpr (std::is_same_v<T, double>) {
        if (s < 0 && n % 2 == 1)
          for (std::size_t k = 0; k < n; ++k)
            for (auto& x : cores[k]) x = -x;
      } else {
        const cplx v = std::polar(1.0, std::arg(s) / static_cast<double>(n));
        for (std::size_t k = 0; k < n; ++k)
          for (auto& x : cores[k]) x *= v;
      }
    }
  }

  OptimizeResult res;
  double re_sum = 0;
  for (std::size_t r = 0; r < rank; ++r) {
    const T s = term_overlap(r);
    re_sum += std::real(cplx(s));
    res.overlap = std::max(res.overlap, std::abs(s));
  }
  res.loss = tgt.norm2 + phi_norm2(cores, rank, n) - 2 * re_sum;

  const Field field = std::is_same_v<T, double> ? Field::Real : Field::Complex;
  res.candidate = ProductCandidate(field, tgt.shape, rank);
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      auto dst = res.candidate.core(r, k);
      std::transform(cores[r * n + k].begin(), cores[r * n + k].end(), dst.begin(),
                     [](T v) { return cplx(v); });
    }
  return res;
}

template <class T>
void normalize_or_throw(Vec<T>& a, std::size_t epoch) {
  const double nrm = vnorm<T>(a);
  if (!(nrm > 0) || !std::isfinite(nrm))
    throw DivergenceError(epoch, "core norm became " + std::to_string(nrm) + " at epoch " +
                                     std::to_string(epoch));
  for (auto& x : a) x /= nrm;
}

void check_loss(double j, std::size_t epoch) {
  if (!std::isfinite(j))
    throw DivergenceError(epoch, "non-finite loss at epoch " + std::to_string(epoch));
}

template <class T>
OptimizeResult ngd_impl(std::span<const T> psi, const Target& tgt, const OptimizerConfig& cfg,
                        std::size_t restart) {
  const std::size_t n = tgt.shape.size(), rank = cfg.rank;
  GaussianStream g(derive_key(cfg.seed, {kTagInit, restart}));
  Cores<T> a(rank * n), c(rank * n), step(rank * n);
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      a[r * n + k] = random_core<T>(g, tgt.shape[k]);
      c[r * n + k].resize(tgt.shape[k]);
      step[r * n + k].resize(tgt.shape[k]);
    }

  Plateau plateau(cfg.plateau_window, cfg.tol);
  std::vector<double> trace;
  double best_loss = std::numeric_limits<double>::infinity();
  Cores<T> best = a;
  std::size_t epoch = 0;
  std::vector<Vec<T>> cw(n);
  std::vector<std::span<const T>> w(n);
  std::vector<std::span<T>> outs(n);

  while (epoch < cfg.max_epochs) {
    for (auto& core : a) normalize_or_throw(core, epoch);

    T overlap_sum{};
    for (std::size_t r = 0; r < rank; ++r) {
      for (std::size_t k = 0; k < n; ++k) {
        cw[k] = conj_copy<T>(a[r * n + k]);
        w[k] = cw[k];
        outs[k] = c[r * n + k];
      }
      kernels::contract_each(psi, tgt.shape, w, outs);
      overlap_sum += cdot<T>(a[r * n], c[r * n]);
    }
    const double phi2 = rank == 1 ? 1.0 : phi_norm2(a, rank, n);
    const double loss_value = tgt.norm2 + phi2 - 2 * std::real(cplx(overlap_sum));
    check_loss(loss_value, epoch);
    if (cfg.record_trace) trace.push_back(loss_value);
    if (loss_value < best_loss) {
      best_loss = loss_value;
      best = a;
    }
    ++epoch;
    if (plateau.stalled(best_loss)) break;

    // dJ/da_rk = 2 (sum_s a_sk prod_{j != k} <a_rj, a_sj> - c_rk)
    for (std::size_t k = 0; k < n; ++k) {
      const auto gk = rank == 1 ? std::vector<Vec<T>>{} : gram(a, rank, n, k);
      for (std::size_t r = 0; r < rank; ++r) {
        auto& st = step[r * n + k];
        const auto& cr = c[r * n + k];
        if (rank == 1) {
          const auto& ar = a[k];
          for (std::size_t i = 0; i < st.size(); ++i) st[i] = 2.0 * (ar[i] - cr[i]);
        } else {
          std::fill(st.begin(), st.end(), T{});
          for (std::size_t s = 0; s < rank; ++s) {
            const auto& as = a[s * n + k];
            for (std::size_t i = 0; i < st.size(); ++i) st[i] += gk[r][s] * as[i];
          }
          for (std::size_t i = 0; i < st.size(); ++i) st[i] = 2.0 * (st[i] - cr[i]);
        }
      }
    }
    for (std::size_t idx = 0; idx < a.size(); ++idx)
      for (std::size_t i = 0; i < a[idx].size(); ++i) a[idx][i] -= cfg.learning_rate * step[idx][i];
  }

  auto res = finalize<T>(psi, tgt, std::move(best), rank, false);
  res.epochs_used = epoch;
  res.loss_trace = std::move(trace);
  return res;
}

template <class T>
OptimizeResult sgd_impl(std::span<const T> psi, const Target& tgt, const OptimizerConfig& cfg,
                        std::size_t restart) {
  const std::size_t n = tgt.shape.size(), rank = cfg.rank, d = tgt.shape[0];
  GaussianStream g(derive_key(cfg.seed, {kTagInit, restart}));
  Cores<T> a(rank), csum(rank, Vec<T>(d)), step(rank, Vec<T>(d));
  for (auto& core : a) core = random_core<T>(g, d);

  Plateau plateau(cfg.plateau_window, cfg.tol);
  std::vector<double> trace;
  double best_loss = std::numeric_limits<double>::infinity();
  Cores<T> best = a;
  // real even order cannot flip the sign of a^n, so each term carries one
  constexpr bool kReal = std::is_same_v<T, double>;
  const bool signed_terms = kReal && n % 2 == 0;
  std::vector<double> sig(rank, 1.0), best_sig = sig;
  std::size_t epoch = 0;
  std::vector<Vec<T>> outs_store(n, Vec<T>(d));
  std::vector<std::span<T>> outs(n);
  for (std::size_t k = 0; k < n; ++k) outs[k] = outs_store[k];
  std::vector<std::span<const T>> w(n);
  const auto nd = static_cast<double>(n);

  while (epoch < cfg.max_epochs) {
    for (auto& core : a) normalize_or_throw(core, epoch);

    T overlap_sum{};
    for (std::size_t r = 0; r < rank; ++r) {
      const auto cw = conj_copy<T>(a[r]);
      std::fill(w.begin(), w.end(), std::span<const T>(cw));
      kernels::contract_each(psi, tgt.shape, w, outs);
      std::fill(csum[r].begin(), csum[r].end(), T{});
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < d; ++i) csum[r][i] += outs_store[k][i];
      const T sr = cdot<T>(a[r], outs_store[n - 1]);
      if (signed_terms) sig[r] = std::real(cplx(sr)) < 0 ? -1.0 : 1.0;
      overlap_sum += sig[r] * sr;
    }
    // G[r][s] = <a_r, a_s>; ||phi||^2 = sum_rs G^n
    std::vector<Vec<T>> gm(rank, Vec<T>(rank));
    double phi2 = 0;
    for (std::size_t r = 0; r < rank; ++r)
      for (std::size_t s = 0; s < rank; ++s) {
        gm[r][s] = cdot<T>(a[r], a[s]);
        phi2 += sig[r] * sig[s] * std::real(std::pow(cplx(gm[r][s]), nd));
      }
    const double loss_value = tgt.norm2 + phi2 - 2 * std::real(cplx(overlap_sum));
    check_loss(loss_value, epoch);
    if (cfg.record_trace) trace.push_back(loss_value);
    if (loss_value < best_loss) {
      best_loss = loss_value;
      best = a;
      best_sig = sig;
    }
    ++epoch;
    if (plateau.stalled(best_loss)) break;

    // dJ/da_r = 2 (n sum_s s_r s_s <a_r, a_s>^(n-1) a_s - s_r sum_k c_rk)
    for (std::size_t r = 0; r < rank; ++r) {
      auto& st = step[r];
      std::fill(st.begin(), st.end(), T{});
      for (std::size_t s = 0; s < rank; ++s) {
        const T coeff = sig[r] * sig[s] * nd * std::pow(gm[r][s], nd - 1);
        for (std::size_t i = 0; i < d; ++i) st[i] += coeff * a[s][i];
      }
      for (std::size_t i = 0; i < d; ++i) st[i] = 2.0 * (st[i] - sig[r] * csum[r][i]);
    }
    // per-slot step: the shared core collects n identical gradient terms
    const double lr = cfg.learning_rate / nd;
    for (std::size_t r = 0; r < rank; ++r)
      for (std::size_t i = 0; i < d; ++i) a[r][i] -= lr * step[r][i];
  }

  Cores<T> expanded(rank * n);
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t k = 0; k < n; ++k) expanded[r * n + k] = best[r];
  for (std::size_t r = 0; r < rank; ++r)
    if (best_sig[r] < 0)
      for (auto& x : expanded[r * n]) x = -x;
  auto res = finalize<T>(psi, tgt, std::move(expanded), rank, true);
  res.epochs_used = epoch;
  res.loss_trace = std::move(trace);
  return res;
}

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
OptimizeResult als_impl(std::span<const T> psi, const Target& tgt, const OptimizerConfig& cfg,
                        std::size_t restart) {
  const std::size_t n = tgt.shape.size(), rank = cfg.rank;
  GaussianStream g(derive_key(cfg.seed, {kTagInit, restart}));
  Cores<T> a(rank * n), c(rank);
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t k = 0; k < n; ++k) a[r * n + k] = random_core<T>(g, tgt.shape[k]);

  Plateau plateau(cfg.plateau_window, cfg.tol);
  std::vector<double> trace;
  bool regularized = false;
  std::size_t epoch = 0;
  std::vector<Vec<T>> cw(n);
  std::vector<std::span<const T>> w(n);

  while (epoch < cfg.max_epochs) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t dk = tgt.shape[k];
      for (std::size_t r = 0; r < rank; ++r) {
        for (std::size_t j = 0; j < n; ++j) {
          cw[j] = j == k ? Vec<T>(dk) : conj_copy<T>(a[r * n + j]);
          w[j] = cw[j];
        }
        c[r].resize(dk);
        kernels::contract_except(psi, tgt.shape, w, k, std::span<T>(c[r]));
      }
      if (rank == 1) {
        double denom = 1;
        for (std::size_t j = 0; j < n; ++j)
          if (j != k) denom *= std::norm(vnorm<T>(a[j]));
        if (!(denom > 0) || !std::isfinite(denom))
          throw DivergenceError(epoch, "ALS core collapsed at epoch " + std::to_string(epoch));
        for (std::size_t i = 0; i < dk; ++i) a[k][i] = c[0][i] / denom;
        continue;
      }
      // Normal equations: G A^T = C^T with G[r][s] = prod_{j != k} <a_rj, a_sj>.
      const auto gk = gram(a, rank, n, k);
      Mat<T> gmat(rank, rank), rhs(rank, dk);
      for (std::size_t r = 0; r < rank; ++r) {
        for (std::size_t s = 0; s < rank; ++s) gmat(r, s) = gk[r][s];
        for (std::size_t i = 0; i < dk; ++i) rhs(r, i) = c[r][i];
      }
      Eigen::SelfAdjointEigenSolver<Mat<T>> eig(gmat, Eigen::EigenvaluesOnly);
      const double lmax = eig.eigenvalues().maxCoeff(), lmin = eig.eigenvalues().minCoeff();
      if (!(lmin > kRidge * lmax)) {
        regularized = true;
        gmat += Mat<T>::Identity(rank, rank) * T(kRidge * std::max(lmax, 1.0));
      }
      const Mat<T> x = gmat.ldlt().solve(rhs);
      for (std::size_t r = 0; r < rank; ++r)
        for (std::size_t i = 0; i < dk; ++i) a[r * n + k][i] = x(r, i);
    }
    // c holds the last-axis contractions for the current cores
    T overlap_sum{};
    for (std::size_t r = 0; r < rank; ++r) overlap_sum += cdot<T>(a[r * n + n - 1], c[r]);
    const double loss_value =
        tgt.norm2 + phi_norm2(a, rank, n) - 2 * std::real(cplx(overlap_sum));
    check_loss(loss_value, epoch);
    if (cfg.record_trace) trace.push_back(loss_value);
    ++epoch;
    if (plateau.stalled(loss_value)) break;
  }

  for (auto& core : a) normalize_or_throw(core, epoch);
  auto res = finalize<T>(psi, tgt, std::move(a), rank, false);
  res.epochs_used = epoch;
  res.regularized = regularized;
  res.loss_trace = std::move(trace);
  return res;
}

template <class T>
OptimizeResult pim_impl(std::span<const T> psi, const Target& tgt, const OptimizerConfig& cfg,
                        std::size_t restart) {
  const std::size_t n = tgt.shape.size(), rank = cfg.rank, d = tgt.shape[0];
  GaussianStream g(derive_key(cfg.seed, {kTagInit, restart}));
  constexpr int kMaxReinit = 16;

  Vec<T> residual;
  std::span<const T> target = psi;
  double target_norm2 = tgt.norm2;
  if (rank > 1) {
    residual.assign(psi.begin(), psi.end());
    target = residual;
  }

  Cores<T> terms;
  std::vector<double> trace;
  std::size_t total_epochs = 0;
  std::vector<Vec<T>> outs_store(n, Vec<T>(d));
  std::vector<std::span<T>> outs(n);
  for (std::size_t k = 0; k < n; ++k) outs[k] = outs_store[k];
  std::vector<std::span<const T>> w(n);

  for (std::size_t r = 0; r < rank; ++r) {
    Vec<T> a = random_core<T>(g, d);
    normalize_or_throw(a, total_epochs);
    Plateau plateau(cfg.plateau_window, cfg.tol);
    double best_overlap = -1;
    Vec<T> best = a;
    T best_s{};
    int reinit = 0;
    std::size_t epoch = 0;
    Vec<T> next(d);
    // shift grows while the iterate moves without improving (cycles)
    double shift = 0, prev_overlap = -1, last_move = 0;

    while (epoch < cfg.max_epochs) {
      const auto cw = conj_copy<T>(a);
      std::fill(w.begin(), w.end(), std::span<const T>(cw));
      kernels::contract_each(target, tgt.shape, w, outs);
      const T s = cdot<T>(a, outs_store[n - 1]);
      const double overlap = std::abs(s);
      const double loss_value = target_norm2 + 1 - 2 * overlap;
      check_loss(loss_value, total_epochs + epoch);
      if (cfg.record_trace) trace.push_back(loss_value);
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = a;
        best_s = s;
      }
      ++epoch;
      if (plateau.stalled(target_norm2 + 1 - 2 * best_overlap)) break;
      if (prev_overlap >= 0 && overlap <= prev_overlap * (1 + 1e-15) && last_move > 1e-10)
        shift = shift > 0 ? 2 * shift : static_cast<double>(n) * std::max(overlap, 1e-300);
      prev_overlap = overlap;

      std::fill(next.begin(), next.end(), T{});
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < d; ++i) next[i] += outs_store[k][i];
      if (shift > 0 && overlap > 0) {
        const T u = s / overlap;
        for (std::size_t i = 0; i < d; ++i) next[i] += shift * u * a[i];
      }
      const double nrm = vnorm<T>(next);
      if (!(nrm > 0)) {
        if (++reinit > kMaxReinit)
          throw DivergenceError(total_epochs + epoch, "PIM contraction vanished repeatedly");
        a = random_core<T>(g, d);
        normalize_or_throw(a, total_epochs + epoch);
        shift = 0;
        prev_overlap = -1;
        continue;
      }
      for (std::size_t i = 0; i < d; ++i) next[i] /= nrm;
      last_move = 1 - std::abs(cdot<T>(a, next));
      a.swap(next);
    }
    total_epochs += epoch;
    terms.push_back(best);

    if (r + 1 < rank) {
      // Deflate: residual -= <a^n | residual> a^n.
      std::vector<std::span<const T>> f(n, std::span<const T>(best));
      kernels::add_outer_product(f, T(-best_s), std::span<T>(residual));
      target_norm2 = 0;
      for (const auto& x : residual) target_norm2 += std::norm(x);
    }
  }

  Cores<T> expanded(rank * n);
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t k = 0; k < n; ++k) expanded[r * n + k] = terms[r];
  auto res = finalize<T>(psi, tgt, std::move(expanded), rank, true);
  res.epochs_used = total_epochs;
  res.loss_trace = std::move(trace);
  return res;
}

Target make_target(const DenseTensor& psi) {
  const double nrm = euclidean_norm(psi);
  return Target{psi.shape(), nrm * nrm};
}

template <class Fn>
OptimizeResult run_typed(const DenseTensor& psi, Fn&& fn) {
  const Target tgt = make_target(psi);
  if (psi.is_real()) return fn(psi.real_data(), tgt);
  return fn(psi.complex_data(), tgt);
}

void require_symmetric_shape(const DenseTensor& psi, const char* algo) {
  if (!psi.is_hypercubic())
    throw ShapeError(std::string(algo) + " needs a hypercubic target, got " +
                     shape_string(psi.shape()));
}

}  // namespace

double loss(const DenseTensor& psi, const ProductCandidate& c) {
  if (c.dims() != psi.shape()) throw ShapeError("loss: candidate and target shapes differ");
  auto phi = assemble_product(c);
  const DenseTensor lhs = psi.is_real() && !phi.is_real() ? psi.to_complex() : psi;
  if (!lhs.is_real() && phi.is_real()) phi = phi.to_complex();
  double s = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i) s += std::norm(lhs.flat(i) - phi.flat(i));
  return s;
}

std::vector<cplx> gradient(const DenseTensor& psi, const ProductCandidate& c, std::size_t k,
                           std::size_t r) {
  if (c.dims() != psi.shape()) throw ShapeError("gradient: candidate and target shapes differ");
  const std::size_t n = c.order(), rank = c.rank();
  if (k >= n || r >= rank) throw IndexError("gradient: core index out of range");
  const DenseTensor target = psi.to_complex();

  Cores<cplx> a(rank * n);
  for (std::size_t s = 0; s < rank; ++s)
    for (std::size_t j = 0; j < n; ++j) {
      const auto core = c.core(s, j);
      a[s * n + j].assign(core.begin(), core.end());
    }
  std::vector<Vec<cplx>> cw(n);
  std::vector<std::span<const cplx>> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    cw[j] = conj_copy<cplx>(a[r * n + j]);
    w[j] = cw[j];
  }
  std::vector<cplx> contraction(psi.shape()[k]);
  kernels::contract_except(target.complex_data(), psi.shape(), w, k, contraction);

  const auto gk = gram(a, rank, n, k);
  std::vector<cplx> grad(contraction.size(), cplx{});
  for (std::size_t s = 0; s < rank; ++s)
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += gk[r][s] * a[s * n + k][i];
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = 2.0 * (grad[i] - contraction[i]);
  if (psi.is_real() && c.field() == Field::Real)
    for (auto& x : grad) x = cplx(x.real(), 0.0);
  return grad;
}

OptimizeResult ngd_fit(const DenseTensor& psi, const OptimizerConfig& cfg,
                       std::size_t restart_index) {
  cfg.validate();
  auto res = run_typed(psi, [&](auto data, const Target& tgt) {
    return ngd_impl(data, tgt, cfg, restart_index);
  });
  res.restart_index = restart_index;
  return res;
}

OptimizeResult sgd_fit(const DenseTensor& psi, const OptimizerConfig& cfg,
                       std::size_t restart_index) {
  cfg.validate();
  require_symmetric_shape(psi, "SGD");
  auto res = run_typed(psi, [&](auto data, const Target& tgt) {
    return sgd_impl(data, tgt, cfg, restart_index);
  });
  res.restart_index = restart_index;
  return res;
}

OptimizeResult als_fit(const DenseTensor& psi, const OptimizerConfig& cfg,
                       std::size_t restart_index) {
  cfg.validate();
  auto res = run_typed(psi, [&](auto data, const Target& tgt) {
    return als_impl(data, tgt, cfg, restart_index);
  });
  res.restart_index = restart_index;
  return res;
}

OptimizeResult pim_fit(const DenseTensor& psi, const OptimizerConfig& cfg,
                       std::size_t restart_index) {
  cfg.validate();
  require_symmetric_shape(psi, "PIM");
  auto res = run_typed(psi, [&](auto data, const Target& tgt) {
    return pim_impl(data, tgt, cfg, restart_index);
  });
  res.restart_index = restart_index;
  return res;
}

OptimizeResult fit(const DenseTensor& psi, const OptimizerConfig& cfg, std::size_t restart_index) {
  switch (cfg.algorithm) {
    case Algorithm::ALS: return als_fit(psi, cfg, restart_index);
    case Algorithm::PIM: return pim_fit(psi, cfg, restart_index);
    case Algorithm::NGD: return ngd_fit(psi, cfg, restart_index);
    case Algorithm::SGD: return sgd_fit(psi, cfg, restart_index);
  }
  throw SpecError("unhandled algorithm");
}

InjectiveNormEstimate estimate_injective_norm(const DenseTensor& psi, const OptimizerConfig& cfg) {
  cfg.validate();
  InjectiveNormEstimate est;
  est.euclidean_norm = euclidean_norm(psi);
  if (est.euclidean_norm == 0) throw ZeroTensorError("injective norm estimate of the zero tensor");

  const std::size_t restarts = cfg.restarts;
  std::vector<OptimizeResult> results(restarts);
  std::vector<std::exception_ptr> errors(restarts);
#pragma omp parallel for schedule(dynamic) if (restarts > 1)
  for (std::size_t i = 0; i < restarts; ++i) {
    try {
      results[i] = fit(psi, cfg, i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::size_t best = 0;
  for (std::size_t i = 1; i < restarts; ++i)
    if (results[i].overlap > results[best].overlap) best = i;
  est.best = std::move(results[best]);
  est.injective_norm = est.best.overlap;
  est.normalized = est.injective_norm / est.euclidean_norm;
  est.gme_bits = -std::log2(est.normalized * est.normalized);
  return est;
}

void write_loss_trace_csv(std::ostream& os, const OptimizeResult& r) {
  os << "epoch,loss\n";
  char buf[64];
  for (std::size_t t = 0; t < r.loss_trace.size(); ++t) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), r.loss_trace[t]);
    os << t << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
  }
}

}  // namespace injnorm
