#include "fuzzy/orbifold.hpp"

#include <gtest/gtest.h>

#include <random>

namespace fuzzy {
namespace {

// r_w counted from the weights of the spin (N-1)/2 irrep directly.
std::vector<int> residue_oracle(int k, int N) {
  const HalfInt j(N - 1);
  std::vector<int> r(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < N; ++i) {
    const int twice_m = static_cast<int>(std::lround(2 * j.weight(i)));
    ++r[static_cast<std::size_t>(((twice_m % k) + k) % k)];
  }
  return r;
}

template <class Rng>
Matrix random_matrix(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = Complex(normal(rng), normal(rng));
  return A;
}

TEST(CyclicSubgroup, ClosedAndRepresentation) {
  for (int k : {1, 3, 5, 7}) {
    const FiniteSubgroup K = cyclic_subgroup(k, cached_irrep(5));
    EXPECT_EQ(K.order(), static_cast<std::size_t>(k));
    EXPECT_TRUE(K.is_closed());
    EXPECT_LT(K.representation_defect(), 1e-12);
  }
  EXPECT_THROW(cyclic_subgroup(4, cached_irrep(2)), std::invalid_argument);
}

TEST(CyclicSubgroup, RotatesSphereByTwoPiOverK) {
  const FiniteSubgroup K = cyclic_subgroup(5, cached_irrep(1));
  std::vector<double> angles;
  for (const auto& g : K.elements) {
    const Eigen::Matrix3d R = g.rotation();
    double a = std::atan2(R(1, 0), R(0, 0));
    if (a < -1e-12) a += 2 * kPi;
    angles.push_back(a);
  }
  std::sort(angles.begin(), angles.end());
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(angles[j], 2 * kPi * j / 5, 1e-12);
}

TEST(Commutant, SmallExamples) {
  const CommutantBasis c36 = zn_commutant(3, 6);
  EXPECT_EQ(c36.block_dims, (std::vector<int>{2, 2, 2}));
  EXPECT_EQ(c36.dimension(), 12);
  EXPECT_EQ(zn_commutant(1, 7).dimension(), 49);
  const CommutantBasis c510 = zn_commutant(5, 10);
  EXPECT_EQ(c510.block_dims, (std::vector<int>{2, 2, 2, 2, 2}));
  EXPECT_EQ(c510.dimension(), 20);
  EXPECT_THROW(zn_commutant(2, 6), std::invalid_argument);
}

TEST(Commutant, DimensionIdentityOverRange) {
  for (int k = 1; k <= 9; k += 2) {
    for (int N = 1; N <= 36; ++N) {
      const CommutantBasis C = zn_commutant(k, N);
      ASSERT_EQ(C.block_dims, residue_oracle(k, N)) << k << " " << N;
      ASSERT_EQ(C.dimension(), C.block_dimension_sum()) << k << " " << N;
    }
  }
}

TEST(Commutant, BasisCommutesAndMatchesProjectionRank) {
  for (auto [k, N] : std::vector<std::pair<int, int>>{{3, 6}, {3, 7}, {5, 10}, {7, 8}}) {
    const FiniteSubgroup K = cyclic_subgroup(k, cached_irrep(N - 1));
    const CommutantBasis C = zn_commutant(k, N);
    for (const auto& E : C.basis)
      for (const auto& U : K.images) ASSERT_LT((U * E - E * U).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_EQ(invariant_projection_rank(K), C.dimension());
  }
}

TEST(InvariantProject, ConditionalExpectationProperties) {
  std::mt19937_64 rng(31);
  const FiniteSubgroup K = cyclic_subgroup(3, cached_irrep(6));
  for (int s = 0; s < 10; ++s) {
    const Matrix T = random_matrix(7, rng);
    const Matrix E = invariant_project(K, T);
    EXPECT_LT((invariant_project(K, E) - E).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_NEAR(std::abs(E.trace() - T.trace()), 0.0, 1e-11);
    const Matrix P = T * T.adjoint();
    EXPECT_GE(min_eigenvalue(invariant_project(K, P)), -1e-10);
  }
  const Matrix I = Matrix::Identity(7, 7);
  EXPECT_LT((invariant_project(K, I) - I).cwiseAbs().maxCoeff(), 1e-13);
  const Matrix Jz = cached_irrep(6).Jz;
  EXPECT_LT((invariant_project(K, Jz) - Jz).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(InvariantHarmonics, ExamplesAndRange) {
  const InvariantHarmonics h3 = invariant_harmonics(3, 3);
  EXPECT_EQ(h3.projector_rank[2], 1);
  EXPECT_EQ(h3.projector_rank[3], 3);
  const InvariantHarmonics h1 = invariant_harmonics(1, 5);
  for (int l = 0; l <= 5; ++l) EXPECT_EQ(h1.projector_rank[l], 2 * l + 1);
  for (int k = 1; k <= 9; k += 2) EXPECT_TRUE(invariant_harmonics(k, 24).consistent()) << k;
  EXPECT_THROW(invariant_harmonics(6, 3), std::invalid_argument);
}

TEST(OrbifoldQuantization, CheckPasses) {
  for (auto [k, n] : std::vector<std::pair<int, int>>{{3, 5}, {3, 9}, {5, 9}}) {
    const OrbifoldReport r = orbifold_quantization_check(k, n);
    EXPECT_TRUE(r.ok()) << k << " " << n << " " << r.symbol_leak << " " << r.adjoint_leak << " "
                        << r.intertwining_defect << " " << r.spectrum_defect;
  }
  EXPECT_THROW(orbifold_quantization_check(5, 3), std::invalid_argument);
}

TEST(OrbifoldQuantization, InvariantAndNonInvariantFields) {
  const CoherentFamily fam = coherent_family(9);
  const FiniteSubgroup K = cyclic_subgroup(3, fam.rep);
  const Matrix one = adjoint_symbol(fam, HarmonicField::constant(1.0));
  EXPECT_LT((invariant_project(K, one) - one).cwiseAbs().maxCoeff(), 1e-12);

  const HarmonicField inv = HarmonicField::single(3, 3) + HarmonicField::single(3, -3);
  const Matrix B = adjoint_symbol(fam, inv);
  for (const auto& U : K.images) EXPECT_LT((U * B - B * U).cwiseAbs().maxCoeff(), 1e-12);

  const HarmonicField non = HarmonicField::single(1, 1) + HarmonicField::single(1, -1);
  const Matrix C = adjoint_symbol(fam, non);
  EXPECT_GT((invariant_project(K, C) - C).cwiseAbs().maxCoeff(), 1e-2);
}

// dim p C[G] p = sum over irreps pi of rank(pi(p))^2.
TEST(GroupAlgebra, CyclicFour) {
  const GroupTable G = cyclic_group_table(4);
  const StabilizerResult r = group_algebra_stabilizer(G, {2});
  EXPECT_EQ(r.subgroup, (std::vector<int>{0, 2}));
  EXPECT_LT(r.idempotent_defect, 1e-15);
  EXPECT_LT(r.selfadjoint_defect, 1e-15);
  // Characters chi_j(g) = i^{jg}; pi_j(p) = (1 + (-1)^j) / 2.
  int oracle = 0;
  for (int j = 0; j < 4; ++j) oracle += (j % 2 == 0) ? 1 : 0;
  EXPECT_EQ(r.compressed_dim, oracle);
  EXPECT_EQ(r.compressed_dim, 2);

  const StabilizerResult trivial = group_algebra_stabilizer(G, {});
  EXPECT_LT((trivial.p - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(trivial.compressed_dim, 4);
  EXPECT_EQ(group_algebra_stabilizer(G, {1}).compressed_dim, 1);
}

TEST(GroupAlgebra, SymmetricThree) {
  const GroupTable G = symmetric_group_3_table();
  validate(G);
  EXPECT_EQ(G.identity(), 0);
  // Block oracle: trivial, sign and the 2-dim standard irrep on sum-zero vectors.
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> q{0, 1, 2};
  do perms.push_back(q);
  while (std::next_permutation(q.begin(), q.end()));
  Eigen::MatrixXd basis(3, 2);
  basis << 1, 1, -1, 0, 0, -1;
  const Eigen::MatrixXd Q = basis.householderQr().householderQ() * Eigen::MatrixXd::Identity(3, 2);
  auto perm_matrix = [&](int g) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < 3; ++i) M(perms[g][i], i) = 1.0;
    return M;
  };
  const StabilizerResult r = group_algebra_stabilizer(G, {1});
  ASSERT_EQ(r.subgroup.size(), 2u);
  double trivial = 0.0, sign = 0.0;
  Eigen::MatrixXd standard = Eigen::MatrixXd::Zero(2, 2);
  for (int g : r.subgroup) {
    trivial += 1.0 / 2;
    sign += perm_matrix(g).determinant() / 2;
    standard += Q.transpose() * perm_matrix(g) * Q / 2;
  }
  const int rank_std = static_cast<int>(std::lround(standard.trace()));
  const int oracle = int(std::lround(trivial)) + int(std::lround(sign)) + rank_std * rank_std;
  EXPECT_EQ(rank_std, 1);
  EXPECT_EQ(r.compressed_dim, oracle);
  EXPECT_EQ(r.compressed_dim, 2);
  EXPECT_EQ(group_algebra_stabilizer(G, {}).compressed_dim, 6);
}

TEST(GroupAlgebra, ParsingAndValidation) {
  const GroupTable G = parse_group_table("4\n0 1 2 3\n1 2 3 0\n2 3 0 1\n3 0 1 2\n");
  EXPECT_EQ(group_algebra_stabilizer(G, {2}).compressed_dim, 2);
  EXPECT_THROW(parse_group_table("3\n0 1 2\n1 2 0\n"), std::invalid_argument);
  EXPECT_THROW(parse_group_table("2\n0 1\n0 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_group_table("x"), std::invalid_argument);
  EXPECT_THROW(group_algebra_stabilizer(G, {7}), std::invalid_argument);
}

}  // namespace
}  // namespace fuzzy
