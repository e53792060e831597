#include "fuzzy/haar_harmonic.hpp"

#include <gtest/gtest.h>

#include <random>

namespace fuzzy {
namespace {

// Composite Simpson rule on [a, b]; oracle for 1-D Euler integrals.
template <class F>
double simpson(F&& f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const GaussLegendre gl = gauss_legendre(7);
  for (int k = 0; k <= 13; ++k) {
    double acc = 0.0;
    for (int i = 0; i < 7; ++i) acc += gl.weights[i] * std::pow(gl.nodes[i], k);
    const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
    EXPECT_NEAR(acc, exact, 1e-14) << "k=" << k;
  }
}

TEST(HaarRule, NormalizationAndSimpleIntegrals) {
  const QuadratureRule rule = haar_rule(6);
  EXPECT_GE(rule.exact_degree, 6);
  EXPECT_NEAR(rule.integrate([](const GroupElement&) { return 1.0; }), 1.0, 1e-14);

  const SpinIrrep half = build_irrep(HalfInt(1));
  const double oracle = simpson([](double b) { return std::pow(std::cos(b / 2), 2) * std::sin(b) / 2; }, 0, kPi);
  EXPECT_NEAR(oracle, 0.5, 1e-12);
  const double sq = rule.integrate([&](const GroupElement& g) { return std::norm(wigner_matrix(half, g)(0, 0)); });
  EXPECT_NEAR(sq, oracle, 1e-12);

  const SpinIrrep one = build_irrep(HalfInt(2));
  const Complex mid = rule.integrate([&](const GroupElement& g) { return wigner_matrix(one, g)(1, 1); });
  EXPECT_LT(std::abs(mid), 1e-14);
}

TEST(HaarRule, SchurOrthogonalityForAllPairs) {
  const int degree = 8;
  const QuadratureRule rule = haar_rule(degree);
  std::vector<SpinIrrep> reps;
  for (int t = 0; t <= degree; ++t) reps.push_back(build_irrep(HalfInt(t)));
  std::vector<std::vector<Matrix>> U(reps.size());
  for (std::size_t t = 0; t < reps.size(); ++t)
    for (const auto& g : rule.nodes) U[t].push_back(wigner_matrix(reps[t], g));
  for (int t1 = 0; t1 <= degree; ++t1) {
    for (int t2 = 0; t1 + t2 <= degree; ++t2) {
      for (int a = 0; a <= t1; ++a)
        for (int b = 0; b <= t1; ++b)
          for (int c = 0; c <= t2; ++c)
            for (int d = 0; d <= t2; ++d) {
              Complex acc = 0.0;
              for (std::size_t k = 0; k < rule.nodes.size(); ++k)
                acc += rule.weights[k] * U[t1][k](a, b) * std::conj(U[t2][k](c, d));
              const double expected = (t1 == t2 && a == c && b == d) ? 1.0 / (t1 + 1) : 0.0;
              ASSERT_LT(std::abs(acc - expected), 1e-11) << t1 << " " << t2 << " " << a << b << c << d;
            }
    }
  }
}

TEST(CoherentMoment, MatchesOneDimensionalOracle) {
  for (int m : {0, 1, 9}) {
    const double oracle =
        simpson([m](double b) { return std::pow(std::cos(b / 2), 2 * m) * std::sin(b) / 2; }, 0, kPi);
    EXPECT_NEAR(coherent_moment(m), oracle, 1e-11) << "m=" << m;
    EXPECT_NEAR(coherent_moment(m), 1.0 / (m + 1), 1e-13);
  }
  EXPECT_NEAR(coherent_moment(9), 0.1, 1e-13);
  EXPECT_THROW(coherent_moment(-1), std::invalid_argument);
}

TEST(Harmonics, ConstantAnalyzesToSqrtFourPi) {
  const SphereGrid grid = sphere_grid(8);
  const HarmonicField f = analyze(Vector::Ones(static_cast<Eigen::Index>(grid.size())), grid, 4);
  EXPECT_NEAR(f(0, 0).real(), std::sqrt(4 * kPi), 1e-13);
  EXPECT_LT(f.coeffs.tail(f.coeffs.size() - 1).norm(), 1e-13);
}

TEST(Harmonics, ClosedFormY21AnalyzesToUnitCoefficient) {
  const SphereGrid grid = sphere_grid(10);
  const HarmonicField f = analyze_function(
      [](double t, double p) {
        return -std::sqrt(15.0 / (8 * kPi)) * std::sin(t) * std::cos(t) * std::exp(kI * p);
      },
      grid, 5);
  HarmonicField expected = HarmonicField::single(2, 1, 5);
  EXPECT_LT((f.coeffs - expected.coeffs).norm(), 1e-13);
}

TEST(Harmonics, ClosedFormLowDegreeValues) {
  const double t = 0.7, p = 1.9;
  const Vector y = ylm_all(2, t, p);
  EXPECT_NEAR(std::abs(y(harmonic_index(1, 0)) - std::sqrt(3 / (4 * kPi)) * std::cos(t)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(y(harmonic_index(1, 1)) + std::sqrt(3 / (8 * kPi)) * std::sin(t) * std::exp(kI * p)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(y(harmonic_index(1, -1)) - std::sqrt(3 / (8 * kPi)) * std::sin(t) * std::exp(-kI * p)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(y(harmonic_index(2, 0)) - std::sqrt(5 / (16 * kPi)) * (3 * std::cos(t) * std::cos(t) - 1)), 0.0, 1e-15);
}

TEST(Harmonics, RandomFieldRoundTrip) {
  std::mt19937_64 rng(1);
  const SphereGrid grid = sphere_grid(16);
  for (int t = 0; t < 5; ++t) {
    HarmonicField f = HarmonicField::zero(8);
    f.coeffs = Vector::Random(f.coeffs.size());
    const HarmonicField back = analyze(synthesize(f, grid), grid, 8);
    EXPECT_LT((back.coeffs - f.coeffs).cwiseAbs().maxCoeff(), 1e-11);
  }
  const HarmonicField real = random_real_field(6, rng);
  EXPECT_TRUE(real.is_real());
  EXPECT_LT(synthesize(real, grid).imag().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Harmonics, InsufficientGridDegreeThrows) {
  const SphereGrid grid = sphere_grid(7);
  EXPECT_THROW(analyze(Vector::Zero(static_cast<Eigen::Index>(grid.size())), grid, 4), std::invalid_argument);
}

TEST(Translate, IdentityLeavesFieldUnchanged) {
  std::mt19937_64 rng(2);
  const HarmonicField f = random_real_field(5, rng);
  EXPECT_LT((translate(f, GroupElement::identity()).coeffs - f.coeffs).norm(), 1e-13);
}

TEST(Translate, QuarterTurnOfY10) {
  const HarmonicField f = HarmonicField::single(1, 0, 1);
  const GroupElement g{0, kPi / 2, 0};
  const HarmonicField out = translate(f, g);
  EXPECT_NEAR(out.block(1).norm(), 1.0, 1e-13);
  // (R^{-1} x)_z = x . (R e_z) = x_x for a quarter turn about y.
  const double c = std::sqrt(3 / (4 * kPi));
  for (double t : {0.2, 1.1, 2.5})
    for (double p : {0.0, 0.9, 4.0}) {
      EXPECT_NEAR(std::abs(evaluate(out, t, p) - c * std::sin(t) * std::cos(p)), 0.0, 1e-13);
    }
}

TEST(Translate, PointwiseOracleAndGroupAction) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const HarmonicField f = random_real_field(6, rng);
    const GroupElement g1 = random_group_element(rng), g2 = random_group_element(rng);
    const HarmonicField tf = translate(f, g1);
    const Eigen::Matrix3d Rinv = g1.rotation().transpose();
    for (int k = 0; k < 5; ++k) {
      const double th = 0.3 + 0.5 * k, ph = 1.3 * k;
      const auto [th2, ph2] = sphere_angles(Rinv * sphere_point(th, ph));
      EXPECT_LT(std::abs(evaluate(tf, th, ph) - evaluate(f, th2, ph2)), 1e-11);
    }
    const HarmonicField composed = translate(translate(f, g2), g1);
    EXPECT_LT((composed.coeffs - translate(f, g1 * g2).coeffs).norm(), 1e-9);
    for (int l = 0; l <= 6; ++l) EXPECT_NEAR(tf.block(l).norm(), f.block(l).norm(), 1e-12);
  }
}

TEST(SupNorm, ConstantAndY10) {
  EXPECT_NEAR(sup_norm(HarmonicField::constant(-2.5)).value, 2.5, 1e-12);
  const NormValue y10 = sup_norm(HarmonicField::single(1, 0));
  EXPECT_NEAR(y10.value, std::sqrt(3 / (4 * kPi)), 1e-9);
  EXPECT_LE(y10.tolerance, 1e-6);
}

TEST(SupNorm, TriangleInequalityAndInvariance) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const HarmonicField f = random_real_field(5, rng), g = random_real_field(5, rng);
    const double nf = sup_norm(f).value, ng = sup_norm(g).value;
    EXPECT_LE(sup_norm(f + g).value, nf + ng + 1e-9);
    const double moved = sup_norm(translate(f, random_group_element(rng))).value;
    EXPECT_NEAR(moved, nf, 1e-6 * std::max(1.0, nf));
  }
}

TEST(SupNorm, DominatesDenseSamples) {
  std::mt19937_64 rng(6);
  const HarmonicField f = random_real_field(10, rng);
  const double sup = sup_norm(f).value;
  const SphereGrid dense = sphere_grid(120);
  const double sampled = synthesize(f, dense).cwiseAbs().maxCoeff();
  EXPECT_GE(sup, sampled - 1e-12);
  EXPECT_LT(sup - sampled, 1e-2 * sup);
}

}  // namespace
}  // namespace fuzzy
