#include <gtest/gtest.h>

#include <cmath>

#include "injnorm/errors.hpp"
#include "injnorm/linalg.hpp"
#include "injnorm/random_models.hpp"
#include "oracles.hpp"

using namespace injnorm;

namespace {

ModelSpec gaussian(ModelKind kind, Field field, std::size_t n, std::size_t d) {
  ModelSpec s;
  s.kind = kind;
  s.field = field;
  s.n = n;
  s.d = {d};
  return s;
}

ModelSpec mps(ModelKind kind, Field field, std::size_t n, std::size_t d, std::size_t q) {
  ModelSpec s;
  s.kind = kind;
  s.field = field;
  s.n = n;
  s.d.assign(n, d);
  s.q.assign(n, q);
  return s;
}

double mean_norm2(const ModelSpec& spec, std::size_t samples, Seed seed) {
  std::vector<double> v;
  for (std::size_t i = 0; i < samples; ++i) {
    const double nrm = euclidean_norm(sample_model(spec, seed, i));
    v.push_back(nrm * nrm);
  }
  return oracle::mean(v);
}

double max_entry_diff(const DenseTensor& a, const DenseTensor& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.flat(i) - b.flat(i)));
  return m;
}

}  // namespace

TEST(ModelSpec, validate) {
  auto s = gaussian(ModelKind::Gaussian, Field::Real, 3, 4);
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.shape(), (Shape{4, 4, 4}));
  s.n = 1;
  EXPECT_THROW(s.validate(), SpecError);
  s = gaussian(ModelKind::Gaussian, Field::Real, 3, 4);
  s.q = {2, 2, 2};
  EXPECT_THROW(s.validate(), SpecError);
  auto m = mps(ModelKind::MPS, Field::Complex, 3, 2, 2);
  EXPECT_NO_THROW(m.validate());
  m.q = {2, 2};
  EXPECT_THROW(m.validate(), SpecError);
  auto ti = mps(ModelKind::MPSTranslationInvariant, Field::Complex, 3, 2, 2);
  ti.q = {2, 3, 2};
  EXPECT_THROW(ti.validate(), SpecError);
  EXPECT_THROW(parse_model_kind("banana"), SpecError);
  EXPECT_EQ(parse_model_kind("mps_ti"), ModelKind::MPSTranslationInvariant);
}

TEST(ModelSpec, json_round_trip) {
  auto s = mps(ModelKind::MPS, Field::Complex, 3, 5, 4);
  s.seed = Seed{99};
  const nlohmann::json j = s;
  EXPECT_EQ(j.get<ModelSpec>(), s);
  const auto parsed = nlohmann::json::parse(
      R"({"kind":"mps","field":"real","n":3,"d":4,"q":2,"seed":5})").get<ModelSpec>();
  EXPECT_EQ(parsed.q, (std::vector<std::size_t>{2, 2, 2}));
  EXPECT_EQ(parsed.seed, Seed{5});
}

TEST(SampleGaussian, deterministic) {
  const auto s = gaussian(ModelKind::Gaussian, Field::Complex, 3, 5);
  EXPECT_EQ(max_entry_diff(sample_gaussian(s, Seed{1}, 3), sample_gaussian(s, Seed{1}, 3)), 0.0);
  EXPECT_GT(max_entry_diff(sample_gaussian(s, Seed{1}, 3), sample_gaussian(s, Seed{1}, 4)), 0.0);
  EXPECT_THROW(sample_gaussian(mps(ModelKind::MPS, Field::Real, 3, 2, 2), Seed{1}), SpecError);
}

TEST(SampleGaussian, real_norm) {
  const double m = mean_norm2(gaussian(ModelKind::Gaussian, Field::Real, 3, 20), 200, Seed{2});
  EXPECT_NEAR(m, 800.0, 0.05 * 800.0);
}

TEST(SampleGaussian, complex_norm) {
  const double m = mean_norm2(gaussian(ModelKind::Gaussian, Field::Complex, 2, 50), 200, Seed{3});
  EXPECT_NEAR(m, 100.0, 0.05 * 100.0);
}

TEST(SampleSymmetrized, norm_and_invariance) {
  const auto s = gaussian(ModelKind::GaussianSymmetrized, Field::Real, 3, 20);
  EXPECT_NEAR(mean_norm2(s, 200, Seed{4}), 154.0, 0.05 * 154.0);
  const auto x = sample_symmetrized(s, Seed{4}, 0);
  EXPECT_LE(max_entry_diff(x, oracle::symmetrize(x)), 1e-12);
  EXPECT_LE(max_entry_diff(x, symmetrize_full(sample_gaussian(s.auxiliary_gaussian(), Seed{4}, 0))),
            0.0);
}

TEST(SampleSymmetrized, order2_entry_variances) {
  const auto s = gaussian(ModelKind::GaussianSymmetrized, Field::Real, 2, 2);
  std::vector<double> diag, off;
  for (std::size_t i = 0; i < 10000; ++i) {
    const auto x = sample_symmetrized(s, Seed{5}, i);
    diag.push_back(x.flat(0).real());
    off.push_back(x.flat(1).real());
  }
  const double vd = oracle::stddev(diag), vo = oracle::stddev(off);
  EXPECT_NEAR(vd * vd, 2.0 / 2, 0.1 * (2.0 / 2));
  EXPECT_NEAR(vo * vo, 1.0 / 2, 0.1 * (1.0 / 2));
}

TEST(SampleCyclic, norm_and_invariance) {
  const auto s = gaussian(ModelKind::GaussianCyclic, Field::Complex, 3, 30);
  EXPECT_NEAR(mean_norm2(s, 200, Seed{6}), 600.0, 0.07 * 600.0);
  const auto x = sample_cyclic(s, Seed{6}, 1);
  EXPECT_LE(max_entry_diff(x, oracle::cyclic(x)), 1e-12);
}

TEST(SampleCyclic, order2_equals_full_symmetrization) {
  const auto c = gaussian(ModelKind::GaussianCyclic, Field::Real, 2, 6);
  const auto f = gaussian(ModelKind::GaussianSymmetrized, Field::Real, 2, 6);
  EXPECT_LE(max_entry_diff(sample_cyclic(c, Seed{7}, 2), sample_symmetrized(f, Seed{7}, 2)), 1e-15);
}

TEST(SampleMpsLocal, variance_and_determinism) {
  const auto s = mps(ModelKind::MPS, Field::Complex, 3, 4, 3);
  double acc = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; count < 100000; ++i) {
    const auto a = sample_mps_local(1, s, Seed{8}, i);
    EXPECT_EQ(a.shape(), (Shape{3, 4, 3}));
    for (std::size_t e = 0; e < a.size(); ++e) acc += std::norm(a.flat(e));
    count += a.size();
  }
  EXPECT_NEAR(acc / static_cast<double>(count), 1.0 / 6, 0.05 / 6);
  EXPECT_EQ(max_entry_diff(sample_mps_local(0, s, Seed{8}, 0), sample_mps_local(0, s, Seed{8}, 0)), 0.0);
  EXPECT_GT(max_entry_diff(sample_mps_local(0, s, Seed{8}, 0), sample_mps_local(1, s, Seed{8}, 0)), 0.0);
  EXPECT_THROW(sample_mps_local(3, s, Seed{8}, 0), IndexError);
}

TEST(SampleMpsLocal, translation_invariant_repeats) {
  const auto s = mps(ModelKind::MPSTranslationInvariant, Field::Complex, 3, 3, 2);
  EXPECT_EQ(max_entry_diff(sample_mps_local(0, s, Seed{9}, 0), sample_mps_local(1, s, Seed{9}, 0)), 0.0);
}

TEST(AssembleMps, matches_naive_sum) {
  const auto s = mps(ModelKind::MPS, Field::Complex, 3, 3, 2);
  std::vector<DenseTensor> locals;
  for (std::size_t k = 0; k < 3; ++k) locals.push_back(sample_mps_local(k, s, Seed{10}, 0));
  EXPECT_LE(max_entry_diff(assemble_mps(locals), oracle::mps(locals)), 1e-12);
  EXPECT_LE(max_entry_diff(sample_mps(s, Seed{10}, 0), oracle::mps(locals)), 1e-12);
}

TEST(AssembleMps, bond_mismatch) {
  const auto s = mps(ModelKind::MPS, Field::Real, 3, 2, 2);
  std::vector<DenseTensor> locals;
  for (std::size_t k = 0; k < 3; ++k) locals.push_back(sample_mps_local(k, s, Seed{11}, 0));
  locals[1] = DenseTensor::zeros({3, 2, 2}, Field::Real);
  EXPECT_THROW(assemble_mps(locals), ShapeError);
}

TEST(AssembleMps, unit_bond_is_product) {
  const auto s = mps(ModelKind::MPS, Field::Real, 3, 4, 1);
  const auto x = sample_mps(s, Seed{12}, 0);
  EXPECT_NEAR(operator_norm_order2(DenseTensor({4, 16}, std::vector<double>(
                                                   x.real_data().begin(), x.real_data().end()))),
              euclidean_norm(x), 1e-12 * euclidean_norm(x));
}

TEST(SampleMps, norm) {
  EXPECT_NEAR(mean_norm2(mps(ModelKind::MPS, Field::Complex, 3, 8, 8), 100, Seed{13}), 8.0, 0.8);
  EXPECT_NEAR(mean_norm2(mps(ModelKind::MPS, Field::Real, 3, 10, 10), 100, Seed{14}), 8.0, 0.8);
}

TEST(SampleMps, translation_invariant_shift_symmetry) {
  const auto s = mps(ModelKind::MPSTranslationInvariant, Field::Complex, 3, 3, 4);
  const auto x = sample_mps(s, Seed{15}, 0);
  EXPECT_LE(max_entry_diff(x, oracle::cyclic(x)), 1e-12);
  EXPECT_EQ(max_entry_diff(x, sample_mps(s, Seed{15}, 0)), 0.0);
}
