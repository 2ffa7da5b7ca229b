#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "injnorm/errors.hpp"
#include "injnorm/linalg.hpp"
#include "oracles.hpp"

using namespace injnorm;

namespace {

DenseTensor basis(Shape shape, std::vector<std::size_t> idx) {
  std::vector<double> data(shape_size(shape), 0.0);
  std::size_t flat = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) flat = flat * shape[k] + idx[k];
  data[flat] = 1.0;
  return DenseTensor(std::move(shape), std::move(data));
}

DenseTensor random_tensor(Shape shape, bool complex, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const auto n = shape_size(shape);
  if (!complex) {
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return DenseTensor(std::move(shape), std::move(v));
  }
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return DenseTensor(std::move(shape), std::move(v));
}

double max_entry_diff(const DenseTensor& a, const DenseTensor& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.flat(i) - b.flat(i)));
  return m;
}

}  // namespace

TEST(InnerProduct, basis_cases) {
  EXPECT_EQ(inner_product(basis({2, 2}, {0, 0}), basis({2, 2}, {0, 0})), cplx(1, 0));
  EXPECT_EQ(inner_product(basis({2, 2}, {0, 0}), basis({2, 2}, {1, 1})), cplx(0, 0));
}

TEST(InnerProduct, random_complex_against_extended_sum) {
  std::mt19937_64 rng(11);
  const auto a = random_tensor({4, 5, 3}, true, rng);
  const auto b = random_tensor({4, 5, 3}, true, rng);
  const cplx got = inner_product(a, b);
  const auto expect = oracle::inner(a, b);
  EXPECT_NEAR(got.real(), static_cast<double>(expect.real()), 1e-12 * std::abs(got));
  EXPECT_NEAR(got.imag(), static_cast<double>(expect.imag()), 1e-12 * std::abs(got));
}

TEST(InnerProduct, conjugate_linear_in_first_argument) {
  DenseTensor a({2}, std::vector<cplx>{{0, 1}, {0, 0}});
  DenseTensor b({2}, std::vector<cplx>{{1, 0}, {0, 0}});
  EXPECT_EQ(inner_product(a, b), cplx(0, -1));
}

TEST(InnerProduct, errors) {
  const auto r = DenseTensor::zeros({2, 2}, Field::Real);
  EXPECT_THROW(inner_product(r, DenseTensor::zeros({2, 3}, Field::Real)), ShapeError);
  EXPECT_THROW(inner_product(r, DenseTensor::zeros({2, 2}, Field::Complex)), FieldError);
}

TEST(InnerProduct, cauchy_schwarz) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_tensor({3, 3, 2}, t % 2, rng);
    const auto b = random_tensor({3, 3, 2}, t % 2, rng);
    EXPECT_LE(std::abs(inner_product(a, b)), euclidean_norm(a) * euclidean_norm(b) * (1 + 1e-14));
  }
}

TEST(EuclideanNorm, examples) {
  EXPECT_EQ(euclidean_norm(DenseTensor::zeros({3, 3}, Field::Complex)), 0.0);
  EXPECT_DOUBLE_EQ(euclidean_norm(basis({2, 2, 2}, {0, 1, 0})), 1.0);
  EXPECT_NEAR(euclidean_norm(DenseTensor({2, 2, 2}, std::vector<double>(8, 1.0))), std::sqrt(8.0),
              1e-15);
  EXPECT_THROW(normalized(DenseTensor::zeros({2}, Field::Real)), ZeroTensorError);
}

TEST(AssembleProduct, examples) {
  ProductCandidate c(Field::Real, {2, 2}, 1);
  c.core(0, 0)[0] = 1;
  c.core(0, 1)[0] = 1;
  const auto m = assemble_product(c);
  EXPECT_EQ(m.field(), Field::Real);
  EXPECT_EQ(max_entry_diff(m, basis({2, 2}, {0, 0})), 0.0);

  ProductCandidate c2(Field::Real, {2, 2}, 2);
  c2.core(0, 0)[0] = c2.core(0, 1)[0] = 1;
  c2.core(1, 0)[1] = c2.core(1, 1)[1] = 1;
  const auto diag = assemble_product(c2);
  EXPECT_EQ(max_entry_diff(diag, DenseTensor({2, 2}, std::vector<double>{1, 0, 0, 1})), 0.0);
}

TEST(AssembleProduct, unit_cores_give_unit_norm) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int t = 0; t < 10; ++t) {
    ProductCandidate c(Field::Complex, {3, 4, 5}, 1);
    for (std::size_t k = 0; k < 3; ++k)
      for (auto& x : c.core(0, k)) x = cplx(g(rng), g(rng));
    c.normalize();
    EXPECT_NEAR(euclidean_norm(assemble_product(c)), 1.0, 1e-12);
  }
}

TEST(AssembleProduct, matches_oracle) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g;
  ProductCandidate c(Field::Complex, {2, 3, 2}, 2);
  std::vector<oracle::Vectors> cores(2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t k = 0; k < 3; ++k) {
      for (auto& x : c.core(r, k)) x = cplx(g(rng), g(rng));
      cores[r].emplace_back(c.core(r, k).begin(), c.core(r, k).end());
    }
  EXPECT_LE(max_entry_diff(assemble_product(c), oracle::product(cores, false)), 1e-13);
}

TEST(SymmetrizeFull, examples) {
  const auto e12 = basis({2, 2}, {0, 1});
  const auto s = symmetrize_full(e12);
  EXPECT_EQ(max_entry_diff(s, DenseTensor({2, 2}, std::vector<double>{0, 0.5, 0.5, 0})), 0.0);
  EXPECT_LE(max_entry_diff(symmetrize_full(s), s), 1e-15);
}

TEST(SymmetrizeFull, matches_s3_enumeration) {
  std::mt19937_64 rng(15);
  for (bool complex : {false, true}) {
    const auto x = random_tensor({3, 3, 3}, complex, rng);
    const auto s = symmetrize_full(x);
    EXPECT_EQ(s.field(), x.field());
    EXPECT_LE(max_entry_diff(s, oracle::symmetrize(x)), 1e-14);
    EXPECT_LE(euclidean_norm(s), euclidean_norm(x));
    EXPECT_LE(max_entry_diff(symmetrize_full(s), s), 1e-14);
  }
}

TEST(SymmetrizeFull, errors) {
  EXPECT_THROW(symmetrize_full(DenseTensor::zeros({2, 3}, Field::Real)), ShapeError);
  EXPECT_THROW(symmetrize_full(DenseTensor::zeros(Shape(9, 1), Field::Real)), CapacityError);
  EXPECT_THROW(symmetrize_full(DenseTensor::zeros({2, 2, 2}, Field::Real), 2), CapacityError);
}

TEST(SymmetrizeCyclic, examples) {
  const auto e123 = basis({3, 3, 3}, {0, 1, 2});
  const auto expect_data = [] {
    std::vector<double> v(27, 0.0);
    v[0 * 9 + 1 * 3 + 2] = v[2 * 9 + 0 * 3 + 1] = v[1 * 9 + 2 * 3 + 0] = 1.0 / 3;
    return v;
  }();
  EXPECT_LE(max_entry_diff(symmetrize_cyclic(e123), DenseTensor({3, 3, 3}, expect_data)), 1e-16);

  std::mt19937_64 rng(16);
  const auto sym = symmetrize_full(random_tensor({3, 3, 3}, true, rng));
  EXPECT_LE(max_entry_diff(symmetrize_cyclic(sym), sym), 1e-14);
}

TEST(SymmetrizeCyclic, matches_c4_enumeration) {
  std::mt19937_64 rng(17);
  const auto x = random_tensor({2, 2, 2, 2}, true, rng);
  const auto c = symmetrize_cyclic(x);
  EXPECT_LE(max_entry_diff(c, oracle::cyclic(x)), 1e-15);
  EXPECT_LE(max_entry_diff(symmetrize_cyclic(c), c), 1e-15);
  EXPECT_LE(euclidean_norm(c), euclidean_norm(x));
  EXPECT_THROW(symmetrize_cyclic(DenseTensor::zeros({2, 3}, Field::Real)), ShapeError);
}

TEST(Permutations, counts) {
  EXPECT_EQ(all_permutations(4).size(), 24u);
  EXPECT_EQ(cyclic_shifts(5).size(), 5u);
  EXPECT_EQ(all_permutations(3).front(), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(OperatorNorm, examples) {
  EXPECT_NEAR(operator_norm_order2(DenseTensor({3, 3}, std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 1})),
              1.0, 1e-14);
  EXPECT_NEAR(operator_norm_order2(DenseTensor({2, 2}, std::vector<double>{3, 0, 0, 1})), 3.0, 1e-14);
  EXPECT_THROW(operator_norm_order2(DenseTensor::zeros({2, 2, 2}, Field::Real)), ShapeError);
}

TEST(OperatorNorm, random_against_eigen_oracle) {
  std::mt19937_64 rng(18);
  for (int t = 0; t < 10; ++t) {
    const auto a = random_tensor({8, 8}, true, rng);
    const double s = operator_norm_order2(a);
    EXPECT_NEAR(s, oracle::top_singular_value(a), 1e-10 * s);
    EXPECT_LE(s, euclidean_norm(a));
  }
  const auto rect = random_tensor({5, 9}, false, rng);
  EXPECT_NEAR(operator_norm_order2(rect), oracle::top_singular_value(rect), 1e-10);
}

TEST(ApproxEqual, tolerances) {
  EXPECT_TRUE(approx_equal(1.0, 1.0 + 1e-12));
  EXPECT_FALSE(approx_equal(1.0, 1.001));
  EXPECT_TRUE(approx_equal(0.0, 1e-13));
}
