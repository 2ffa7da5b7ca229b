#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "injnorm/errors.hpp"
#include "injnorm/linalg.hpp"
#include "injnorm/reference_states.hpp"
#include "oracles.hpp"

using namespace injnorm;

namespace {

double entry(const DenseTensor& t, std::vector<std::size_t> idx) { return t.at(idx).real(); }

// Overlap of a Dicke state with the symmetric product state whose amplitudes
// are sqrt(k_j / n), which attains the maximum.
double dicke_overlap(const DenseTensor& psi, const std::vector<std::size_t>& k, std::size_t n) {
  std::vector<cplx> v(k.size());
  for (std::size_t j = 0; j < k.size(); ++j)
    v[j] = std::sqrt(static_cast<double>(k[j]) / static_cast<double>(n));
  return static_cast<double>(std::abs(oracle::contract(psi, oracle::Vectors(n, v))));
}

double log2_binomial_weight(const std::vector<std::size_t>& k, std::size_t n) {
  // log2 of n! / prod k_j!
  double s = std::lgamma(static_cast<double>(n) + 1);
  for (auto kj : k) s -= std::lgamma(static_cast<double>(kj) + 1);
  return s / std::log(2.0);
}

}  // namespace

TEST(Dicke, small_examples) {
  const auto bell = build_dicke({2, 2, {1, 1}});
  EXPECT_TRUE(bell.is_real());
  EXPECT_NEAR(entry(bell, {0, 1}), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(entry(bell, {1, 0}), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(entry(bell, {0, 0}), 0.0);

  const auto prod = build_dicke({3, 2, {3, 0}});
  EXPECT_EQ(entry(prod, {0, 0, 0}), 1.0);
  EXPECT_NEAR(euclidean_norm(prod), 1.0, 1e-15);

  const auto w = build_dicke({3, 2, {1, 2}});
  int nonzero = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w.flat(i) != 0.0) {
      ++nonzero;
      EXPECT_NEAR(w.flat(i).real(), 1 / std::sqrt(3.0), 1e-15);
    }
  EXPECT_EQ(nonzero, 3);
  EXPECT_NEAR(entry(w, {0, 1, 1}), 1 / std::sqrt(3.0), 1e-15);
}

TEST(Dicke, symmetric_and_unit) {
  const auto psi = build_dicke({4, 3, {2, 1, 1}});
  EXPECT_NEAR(euclidean_norm(psi), 1.0, 1e-12);
  double m = 0;
  const auto s = oracle::symmetrize(psi);
  for (std::size_t i = 0; i < psi.size(); ++i) m = std::max(m, std::abs(psi.flat(i) - s.flat(i)));
  EXPECT_LE(m, 1e-15);
}

TEST(Dicke, invalid) {
  EXPECT_THROW(build_dicke({3, 2, {1, 1}}), SpecError);
  EXPECT_THROW(build_dicke({3, 2, {1, 1, 1}}), SpecError);
  EXPECT_THROW(gme_dicke({0, 2, {}}), SpecError);
}

TEST(GmeDicke, examples) {
  EXPECT_EQ(gme_dicke({3, 2, {3, 0}}), 0.0);
  EXPECT_NEAR(gme_dicke({3, 2, {1, 2}}), std::log2(9.0 / 4), 1e-12);
  EXPECT_NEAR(gme_dicke({3, 2, {1, 2}}), 1.169925, 1e-6);
}

TEST(GmeDicke, n10_against_direct_evaluation) {
  for (std::size_t k0 = 0; k0 <= 10; ++k0) {
    const std::vector<std::size_t> k{k0, 10 - k0};
    // log2[(1/C) prod (n/k)^k]
    double expect = -log2_binomial_weight(k, 10);
    for (auto kj : k)
      if (kj > 0) expect += static_cast<double>(kj) * std::log2(10.0 / static_cast<double>(kj));
    EXPECT_NEAR(gme_dicke({10, 2, k}), expect, 1e-10) << "k0=" << k0;
  }
}

TEST(GmeDicke, attained_by_symmetric_product) {
  for (const auto& k : std::vector<std::vector<std::size_t>>{{1, 2}, {2, 2}, {1, 1, 2}, {3, 1}}) {
    const std::size_t n = std::accumulate(k.begin(), k.end(), std::size_t{0});
    const DickeSpec spec{n, k.size(), k};
    const double overlap = dicke_overlap(build_dicke(spec), k, n);
    EXPECT_NEAR(-std::log2(overlap * overlap), gme_dicke(spec), 1e-10);
  }
}

TEST(Antisym, small_examples) {
  const auto a2 = build_antisym({2, 2});
  EXPECT_NEAR(entry(a2, {0, 1}), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(entry(a2, {1, 0}), -1 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(entry(a2, {0, 0}), 0.0);

  const auto a3 = build_antisym({3, 3});
  int nonzero = 0;
  for (std::size_t i = 0; i < a3.size(); ++i)
    if (a3.flat(i) != 0.0) {
      ++nonzero;
      EXPECT_NEAR(std::abs(a3.flat(i).real()), 1 / std::sqrt(6.0), 1e-15);
    }
  EXPECT_EQ(nonzero, 6);
  EXPECT_NEAR(entry(a3, {1, 0, 2}), -1 / std::sqrt(6.0), 1e-15);
  EXPECT_NEAR(entry(a3, {1, 2, 0}), 1 / std::sqrt(6.0), 1e-15);
  EXPECT_THROW(build_antisym({3, 2}), SpecError);
}

TEST(Antisym, transpositions_negate) {
  const auto a = build_antisym({3, 4});
  EXPECT_NEAR(euclidean_norm(a), 1.0, 1e-12);
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto idx = oracle::decode(i, a.shape());
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t q = p + 1; q < 3; ++q) {
        auto swapped = idx;
        std::swap(swapped[p], swapped[q]);
        EXPECT_NEAR(a.flat(i).real(), -a.at(swapped).real(), 1e-15);
      }
  }
}

TEST(GmeAntisym, examples) {
  EXPECT_EQ(gme_antisym({1, 1}), 0.0);
  EXPECT_EQ(gme_antisym({2, 2}), 1.0);
  EXPECT_NEAR(gme_antisym({3, 3}), 2.584963, 1e-6);
  EXPECT_NEAR(gme_antisym({4, 5}), std::log2(24.0), 1e-12);
}
