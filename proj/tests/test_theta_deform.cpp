#include "fuzzy/theta_deform.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

namespace fuzzy {
namespace {

template <class Rng>
Matrix random_matrix(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = Complex(normal(rng), normal(rng));
  return A;
}

// Diagonal integer generators for a rank-d torus on C^N.
template <class Rng>
std::vector<Matrix> random_torus(int d, int N, Rng& rng) {
  std::uniform_int_distribution<int> pick(-3, 3);
  std::vector<Matrix> gens;
  for (int a = 0; a < d; ++a) {
    Eigen::VectorXcd h(N);
    for (int i = 0; i < N; ++i) h(i) = double(pick(rng));
    gens.push_back(h.asDiagonal());
  }
  return gens;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

TEST(Grade, DiagonalAndMatrixUnit) {
  const std::vector<Matrix> gens{Eigen::Vector3cd(2, -1, 5).asDiagonal(), Eigen::Vector3cd(0, 1, 1).asDiagonal()};
  const Matrix D = Eigen::Vector3cd(1.0, 2.0, Complex(0, 3)).asDiagonal();
  const GradedElement gd = grade_by_torus(gens, D);
  ASSERT_EQ(gd.components.size(), 1u);
  EXPECT_EQ(gd.components.begin()->first, (Weight{0, 0}));

  Matrix E = Matrix::Zero(3, 3);
  E(0, 1) = 1.0;
  const GradedElement ge = grade_by_torus(gens, E);
  ASSERT_EQ(ge.components.size(), 1u);
  EXPECT_EQ(ge.components.begin()->first, (Weight{3, -1}));
}

TEST(Grade, ReassemblyAndTorusConsistency) {
  std::mt19937_64 rng(41);
  const std::vector<Matrix> gens = random_torus(3, 6, rng);
  for (int s = 0; s < 10; ++s) {
    const Matrix T = random_matrix(6, rng);
    const GradedElement g = grade_by_torus(gens, T);
    EXPECT_LT((g.reassemble() - T).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT(torus_consistency_defect(gens, g, {0.13, -0.71, 0.42}), 1e-13);
  }
}

TEST(Grade, RejectsBadGenerators) {
  Matrix X = Matrix::Zero(2, 2);
  X(0, 1) = X(1, 0) = 1.0;
  const Matrix Z = Eigen::Vector2cd(1, -1).asDiagonal();
  EXPECT_THROW(grade_by_torus({X, Z}, Matrix::Identity(2, 2)), std::invalid_argument);
  EXPECT_THROW(grade_by_torus({X}, Matrix::Identity(2, 2)), std::invalid_argument);
  EXPECT_THROW(grade_by_torus({Eigen::Vector2cd(0.5, 1).asDiagonal()}, Matrix::Identity(2, 2)), std::invalid_argument);
  EXPECT_THROW(grade_by_torus({Z}, Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST(TwistedProduct, TrivialDeformationIsOrdinaryProduct) {
  std::mt19937_64 rng(42);
  const std::vector<Matrix> gens = random_torus(2, 5, rng);
  const Matrix A = random_matrix(5, rng), B = random_matrix(5, rng);
  const GradedElement x = grade_by_torus(gens, A), y = grade_by_torus(gens, B);
  const SkewForm th = SkewForm::planar(0.8);
  EXPECT_LT((twisted_product(x, y, th, 0.0).reassemble() - A * B).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((twisted_product(x, y, SkewForm::zero(2), 0.6).reassemble() - A * B).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT((twisted_product(x, y, th, 0.3).reassemble() - A * B).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(TwistedProduct, HomogeneousPhase) {
  std::mt19937_64 rng(43);
  const SkewForm th = random_skew_form(3, rng);
  const Matrix a = random_matrix(3, rng), b = random_matrix(3, rng);
  const Weight m{1, -2, 3}, k{0, 4, -1};
  const double hbar = 0.37;
  const GradedElement p = twisted_product(GradedElement::homogeneous(m, a), GradedElement::homogeneous(k, b), th, hbar);
  ASSERT_EQ(p.components.size(), 1u);
  EXPECT_EQ(p.components.begin()->first, (Weight{1, 2, 2}));
  double tmk = 0.0;  // (theta m) . k
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) tmk += th.matrix()(i, j) * m[j] * k[i];
  const Complex phase = std::exp(Complex(0, 2 * kPi * hbar * tmk));
  EXPECT_LT((p.components.begin()->second - phase * a * b).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(TwistedProduct, AssociativeOnRandomTriples) {
  std::mt19937_64 rng(44);
  for (int s = 0; s < 50; ++s) {
    const int d = 1 + s % 3;
    const std::vector<Matrix> gens = random_torus(d, 4, rng);
    const SkewForm th = random_skew_form(d, rng);
    const double hbar = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const GradedElement x = grade_by_torus(gens, random_matrix(4, rng)), y = grade_by_torus(gens, random_matrix(4, rng)),
                        z = grade_by_torus(gens, random_matrix(4, rng));
    const GradedElement left = twisted_product(twisted_product(x, y, th, hbar), z, th, hbar);
    const GradedElement right = twisted_product(x, twisted_product(y, z, th, hbar), th, hbar);
    ASSERT_LT(graded_distance(left, right), 1e-11) << s;
  }
}

TEST(TwistedProduct, WeightAdditivityAndShapeErrors) {
  std::mt19937_64 rng(45);
  const std::vector<Matrix> gens = random_torus(2, 5, rng);
  const GradedElement x = grade_by_torus(gens, random_matrix(5, rng)), y = grade_by_torus(gens, random_matrix(5, rng));
  const GradedElement p = twisted_product(x, y, SkewForm::planar(1.3), 0.5);
  for (const Weight& w : p.support(1e-14)) {
    bool found = false;
    for (const auto& [m, xm] : x.components)
      for (const auto& [k, yk] : y.components) found = found || detail::add(m, k) == w;
    EXPECT_TRUE(found);
  }
  const GradedElement other = grade_by_torus(random_torus(3, 5, rng), random_matrix(5, rng));
  EXPECT_THROW(twisted_product(x, other, SkewForm::planar(1.0), 0.5), std::invalid_argument);
  EXPECT_THROW(twisted_product(x, y, SkewForm::zero(3), 0.5), std::invalid_argument);
}

TEST(Star, FixedPointsAndCompatibility) {
  Matrix H = Matrix::Zero(2, 2);
  H(0, 0) = 2.0;
  H(1, 1) = -1.0;
  const GradedElement h = GradedElement::homogeneous({0, 0}, H);
  EXPECT_EQ(graded_distance(star(h), h), 0.0);
  Matrix E = Matrix::Zero(2, 2);
  E(0, 1) = Complex(0, 1);
  const GradedElement s = star(GradedElement::homogeneous({2, -1}, E));
  EXPECT_EQ(s.components.begin()->first, (Weight{-2, 1}));

  std::mt19937_64 rng(46);
  for (int t = 0; t < 10; ++t) {
    const std::vector<Matrix> gens = random_torus(2, 5, rng);
    const GradedElement x = grade_by_torus(gens, random_matrix(5, rng)), y = grade_by_torus(gens, random_matrix(5, rng));
    EXPECT_LT(star_compatibility_defect(x, y, random_skew_form(2, rng), 0.45), 1e-12);
  }
}

TEST(Trace, OffWeightVanishes) {
  Matrix E12 = Matrix::Zero(3, 3), E23 = Matrix::Zero(3, 3);
  E12(0, 1) = 1.0;
  E23(1, 2) = 1.0;
  const TraceCheck c = trace_invariance_check(GradedElement::homogeneous({1}, E12), GradedElement::homogeneous({1}, E23),
                                              SkewForm::zero(1), 0.5);
  EXPECT_EQ(c.lhs, Complex(0.0));
  EXPECT_EQ(c.rhs, Complex(0.0));
}

TEST(Trace, InvariantAcrossHbarSweepAndForms) {
  std::mt19937_64 rng(47);
  for (int f = 0; f < 3; ++f) {
    const std::vector<Matrix> gens = random_torus(3, 6, rng);
    const SkewForm th = random_skew_form(3, rng);
    const GradedElement x = grade_by_torus(gens, random_matrix(6, rng)), y = grade_by_torus(gens, random_matrix(6, rng));
    for (double hbar : {0.0, 0.1, 1.0 / 3, 0.7}) {
      const TraceCheck c = trace_invariance_check(x, y, th, hbar);
      EXPECT_LT(c.gap(), 1e-11);
      EXPECT_LT(c.haar_defect, 1e-12);
      EXPECT_LT(std::abs(twisted_trace(x, y, th, hbar) - c.lhs), 1e-11);
    }
  }
}

TEST(Gaussian, WeightZeroAndRange) {
  std::mt19937_64 rng(48);
  const std::vector<Matrix> gens = random_torus(2, 4, rng);
  const GradedElement x = grade_by_torus(gens, random_matrix(4, rng));
  Eigen::MatrixXd g(2, 2);
  g << 2.0, 0.5, 0.5, 1.0;
  GaussianSmoother s(GaussMetric(g), 0.2);
  EXPECT_EQ(s.factor({0, 0}), 1.0);
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      const double f = s.factor({a, b});
      EXPECT_LE(f, 1.0);
      EXPECT_GT(f, 0.0);
    }
  const GradedElement y = s.apply(x);
  EXPECT_LT((y.component({0, 0}) - x.component({0, 0})).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(GaussianSmoother(GaussMetric(g), 0.0), std::invalid_argument);
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(GaussMetric{bad}, std::invalid_argument);
}

TEST(Gaussian, OneDimensionalOracle) {
  for (double hbar : {0.01, 0.1, 1.0}) {
    GaussianSmoother s(GaussMetric(Eigen::MatrixXd::Identity(1, 1)), hbar);
    const double L = 12 * std::sqrt(hbar);
    auto G = [hbar](double u) { return std::exp(-u * u / hbar); };
    const double mass = simpson(G, -L, L, 20000);
    const double oracle = simpson([&](double u) { return G(u) * std::cos(2 * kPi * u); }, -L, L, 20000) / mass;
    EXPECT_NEAR(s.factor({1}), oracle, 1e-12) << hbar;
  }
}

TEST(Gaussian, MultiplicativeForDiagonalMetric) {
  Eigen::MatrixXd g = Eigen::Vector2d(0.7, 2.5).asDiagonal();
  GaussianSmoother s(GaussMetric(g), 0.3);
  GaussianSmoother s1(GaussMetric(Eigen::MatrixXd::Constant(1, 1, 0.7)), 0.3);
  GaussianSmoother s2(GaussMetric(Eigen::MatrixXd::Constant(1, 1, 2.5)), 0.3);
  for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}, {1, 1}, {-2, 3}}) {
    EXPECT_NEAR(s.factor({a, b}), s1.factor({a}) * s2.factor({b}), 1e-14);
  }
}

TEST(Gaussian, NonDiagonalMetricMatchesPlanarQuadrature) {
  Eigen::MatrixXd g(2, 2);
  g << 1.5, 0.6, 0.6, 0.9;
  const double hbar = 0.4;
  GaussianSmoother s(GaussMetric(g), hbar);
  const Weight w{1, -1};
  const double L = 4.0;
  auto G = [&](double u, double v) { return std::exp(-(g(0, 0) * u * u + 2 * g(0, 1) * u * v + g(1, 1) * v * v) / hbar); };
  auto inner = [&](double u, bool wave) {
    return simpson([&](double v) { return G(u, v) * (wave ? std::cos(2 * kPi * (w[0] * u + w[1] * v)) : 1.0); }, -L, L, 800);
  };
  const double mass = simpson([&](double u) { return inner(u, false); }, -L, L, 800);
  const double wave = simpson([&](double u) { return inner(u, true); }, -L, L, 800);
  EXPECT_NEAR(s.factor(w), wave / mass, 1e-9);
}

TEST(Gaussian, ConvergesAsHbarShrinks) {
  std::mt19937_64 rng(49);
  const std::vector<Matrix> gens = random_torus(2, 5, rng);
  const GradedElement x = grade_by_torus(gens, random_matrix(5, rng));
  const GaussMetric g(Eigen::MatrixXd::Identity(2, 2));
  double prev = 1e300;
  for (double hbar : {1.0, 0.1, 0.01}) {
    const double dev = operator_norm(gaussian_smooth(x, g, hbar).reassemble() - x.reassemble());
    EXPECT_LT(dev, prev) << hbar;
    prev = dev;
  }
}

TEST(BerezinDeform, ZeroThetaIdentical) {
  const DeformInvarianceReport r = berezin_deform_invariance(1, SkewForm::zero(2), 0.5);
  EXPECT_LT(r.max_gap, 1e-15);
  EXPECT_EQ(r.product_deviation, 0.0);
}

TEST(BerezinDeform, TablesAgreeAndMatchProductSpectrum) {
  std::mt19937_64 rng(50);
  const TransformSpectrum beta = spectrum(2, 2);
  for (auto [th, hbar] : std::vector<std::pair<SkewForm, double>>{{SkewForm::planar(1.0), 1.0 / 3},
                                                                  {random_skew_form(2, rng), 0.7}}) {
    const DeformInvarianceReport r = berezin_deform_invariance(2, th, hbar);
    EXPECT_TRUE(r.ok()) << r.max_gap;
    EXPECT_GT(r.product_deviation, 1e-3);
    // Diagonal with entries beta_{l1} beta_{l2}.
    const int H = harmonic_count(2);
    Matrix oracle = Matrix::Zero(H * H, H * H);
    for (int a = 0; a < H; ++a)
      for (int b = 0; b < H; ++b) {
        const int la = static_cast<int>(std::sqrt(a)), lb = static_cast<int>(std::sqrt(b));
        oracle(a * H + b, a * H + b) = beta.beta[la] * beta.beta[lb];
      }
    EXPECT_LT((r.undeformed - oracle).cwiseAbs().maxCoeff(), 1e-12);
  }
}

}  // namespace
}  // namespace fuzzy
