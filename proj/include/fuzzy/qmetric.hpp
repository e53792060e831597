#pragma once

// Lip-norms from the rotation-angle length function, the delta_n / theta_n
// estimates and the Gromov-Hausdorff upper bound 2 max(delta_n, theta_n).
//
// Both Lip-norms are derivative seminorms: sup over unit axes u of
// ||[u.J, T]|| on matrices and of ||d_u f||_inf on fields. The difference
// quotients ||alpha_g(x) - x|| / l(g) are sampled separately as a check.

#include "fuzzy/berezin.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fuzzy {

/// Rotation angle: cos(l/2) = cos(beta/2) cos((alpha+gamma)/2), l in [0, 2pi].
struct LengthFunction {
  double operator()(const GroupElement& g) const {
    const double c = std::cos(g.beta / 2) * std::cos((g.alpha + g.gamma) / 2);
    return 2.0 * std::acos(std::clamp(c, -1.0, 1.0));
  }

  /// Haar mean via the Weyl integration formula: l depends only on the class
  /// angle psi = l/2, whose density is (2/pi) sin^2(psi) on [0, pi].
  double haar_mean() const {
    const GaussLegendre gl = gauss_legendre(32, 0.0, kPi);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double psi = gl.nodes[i];
      acc += gl.weights[i] * 2.0 * psi * std::sin(psi) * std::sin(psi);
    }
    return acc * 2.0 / kPi;
  }
};

struct LipValue {
  enum class Method { derivative, quotient_sampled };
  double value = 0.0;
  Method method = Method::derivative;
  double tolerance = 0.0;
};

inline const char* to_string(LipValue::Method m) {
  return m == LipValue::Method::derivative ? "derivative" : "quotient-sampled";
}

struct SphereMax {
  double value = 0.0;
  double tolerance = 0.0;
  Eigen::Vector3d argmax = Eigen::Vector3d::UnitZ();
};

namespace detail {

inline std::vector<Eigen::Vector3d> fibonacci_sphere(int count) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(count));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    pts.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return pts;
}

template <class F>
std::pair<double, Eigen::Vector3d> compass_polish(F& f, Eigen::Vector3d p, double step) {
  double best = f(p);
  while (step > 1e-9) {
    const Eigen::Vector3d helper = std::abs(p.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
    const Eigen::Vector3d e1 = p.cross(helper).normalized();
    const Eigen::Vector3d e2 = p.cross(e1).normalized();
    bool improved = false;
    for (int k = 0; k < 8 && !improved; ++k) {
      const double ang = kPi * k / 4;
      const Eigen::Vector3d q = (std::cos(step) * p + std::sin(step) * (std::cos(ang) * e1 + std::sin(ang) * e2)).normalized();
      const double v = f(q);
      if (v > best) {
        best = v;
        p = q;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return {best, p};
}

template <class F>
SphereMax sphere_max_level(F& f, int count) {
  const std::vector<Eigen::Vector3d> pts = fibonacci_sphere(count);
  std::vector<std::pair<double, int>> vals;
  for (int i = 0; i < count; ++i) vals.emplace_back(f(pts[i]), i);
  // Ties go to the smaller index.
  std::stable_sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  SphereMax best{-1.0, 0.0, pts[0]};
  const double step = 2.0 / std::sqrt(double(count));
  for (std::size_t c = 0; c < std::min<std::size_t>(4, vals.size()); ++c) {
    const auto [v, p] = compass_polish(f, pts[vals[c].second], step);
    if (v > best.value) best = {v, 0.0, p};
  }
  return best;
}

}  // namespace detail

/// Maximum of f over the unit sphere; point count doubles until two levels
/// agree to rel_tol.
template <class F>
SphereMax maximize_on_sphere(F&& f, int base_points = 64, double rel_tol = 1e-6) {
  SphereMax prev = detail::sphere_max_level(f, base_points);
  int count = base_points;
  for (int level = 0; level < 4; ++level) {
    count *= 2;
    SphereMax next = detail::sphere_max_level(f, count);
    const double change = std::abs(next.value - prev.value);
    if (next.value < prev.value) next = prev;
    next.tolerance = change;
    if (change <= rel_tol * std::max(1.0, next.value)) return next;
    prev = next;
  }
  return prev;
}

namespace detail {

inline void require_hermitian(const Matrix& T, const char* who) {
  if (T.rows() != T.cols()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
  const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
  if ((T - T.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument(std::string(who) + ": matrix must be Hermitian");
  }
}

inline void require_real(const HarmonicField& f, const char* who) {
  if (!f.is_real()) throw std::invalid_argument(std::string(who) + ": field must be real-valued");
}

}  // namespace detail

/// sup_u ||[u.J, T]|| for Hermitian T in B(H^n), n = T.rows() - 1.
inline LipValue lip_matrix(const Matrix& T) {
  detail::require_hermitian(T, "lip_matrix");
  const SpinIrrep& rep = cached_irrep(static_cast<int>(T.rows()) - 1);
  // i[J_a, T] is Hermitian; its norm is the largest |eigenvalue|.
  std::array<Matrix, 3> H;
  for (int a = 0; a < 3; ++a) H[a] = kI * (rep.generator(a) * T - T * rep.generator(a));
  const double scale = std::max({H[0].norm(), H[1].norm(), H[2].norm()});
  if (scale <= 1e-13 * std::max(1.0, T.norm())) return {0.0, LipValue::Method::derivative, 0.0};
  auto norm_at = [&](const Eigen::Vector3d& u) {
    const Matrix M = u(0) * H[0] + u(1) * H[1] + u(2) * H[2];
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Matrix>(M, Eigen::EigenvaluesOnly).eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  };
  const SphereMax m = maximize_on_sphere(norm_at);
  return {m.value, LipValue::Method::derivative, m.tolerance};
}

inline LipValue lip_matrix(int n, const Matrix& T) {
  if (T.rows() != n + 1) throw std::invalid_argument("lip_matrix: expected a " + std::to_string(n + 1) + "x" + std::to_string(n + 1) + " matrix");
  return lip_matrix(T);
}

/// sup_u ||d_u f||_inf = sup_x |(d_x f, d_y f, d_z f)(x)| for real f.
inline LipValue lip_field(const HarmonicField& f) {
  detail::require_real(f, "lip_field");
  const std::array<HarmonicField, 3> d{axis_derivative(f, 0), axis_derivative(f, 1), axis_derivative(f, 2)};
  if (f.effective_degree(1e-14) == 0) return {0.0, LipValue::Method::derivative, 0.0};
  const NormValue v = sup_norm_joint(std::span<const HarmonicField>(d.data(), 3));
  return {v.value, LipValue::Method::derivative, v.tolerance};
}

/// max over sampled g of ||alpha_g(T) - T|| / l(g).
template <class Rng>
LipValue lip_matrix_quotient(const Matrix& T, int samples, Rng& rng) {
  const SpinIrrep& rep = cached_irrep(static_cast<int>(T.rows()) - 1);
  const LengthFunction len;
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const GroupElement g = random_group_element(rng);
    const double l = len(g);
    if (l < 1e-12) continue;
    best = std::max(best, operator_norm(adjoint_act(rep, g, T) - T) / l);
  }
  return {best, LipValue::Method::quotient_sampled, 0.0};
}

/// max over sampled g of ||translate(f, g) - f||_inf / l(g).
template <class Rng>
LipValue lip_field_quotient(const HarmonicField& f, int samples, Rng& rng) {
  const LengthFunction len;
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const GroupElement g = random_group_element(rng);
    const double l = len(g);
    if (l < 1e-12) continue;
    best = std::max(best, sup_norm(translate(f, g) - f).value / l);
  }
  return {best, LipValue::Method::quotient_sampled, 0.0};
}

/// A group element exp(-i t u.J) near the identity, rotation angle t.
inline GroupElement axis_rotation(const Eigen::Vector3d& u, double t) {
  const Eigen::Vector3d v = u.normalized();
  Matrix2 m;
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  m << Complex(c, -s * v.z()), Complex(-s * v.y(), -s * v.x()), Complex(s * v.y(), -s * v.x()), Complex(c, s * v.z());
  return GroupElement::from_su2(m);
}

struct SearchOptions {
  std::uint64_t seed = 1;
  int samples = 32;
  int max_degree = -1;  // delta_n only; -1 means 2n
};

struct DeltaEstimate {
  double value = 0.0;        // empirical max of ||transform f - f||_inf / L(f)
  double block_bound = 0.0;  // sum_l (1 - beta_l) c_l over l = 1..max_degree
  int max_degree = 0;
  int candidates = 0;
};

namespace detail {

// Real part of Y_{l,l}, normalized as a field.
inline HarmonicField sectoral_real(int l) {
  HarmonicField f = HarmonicField::zero(l);
  f(l, l) = 0.5;
  f(l, -l) = (l % 2 == 0 ? 0.5 : -0.5);
  return f;
}

}  // namespace detail

/// Seeded search over real fields of degree 1..max_degree. Deterministic
/// candidates: Y_{l,0} and Re Y_{l,l} for every l. Random candidates: half
/// single random blocks, half mixtures with weights 1/l^2.
inline DeltaEstimate delta_n(int n, const SearchOptions& opt = {}) {
  const int D = opt.max_degree < 0 ? 2 * n : opt.max_degree;
  if (D < 1) throw std::invalid_argument("delta_n: max_degree must be >= 1");
  const CoherentFamily fam = coherent_family(n);
  const TransformSpectrum spec = spectrum(fam, std::min(D, n));
  std::mt19937_64 rng(opt.seed);

  DeltaEstimate est;
  est.max_degree = D;
  std::vector<double> block_sup(static_cast<std::size_t>(D + 1), 0.0);
  auto consider = [&](const HarmonicField& f, int block) {
    const double lip = lip_field(f).value;
    if (lip <= 1e-12) return;
    const double err = sup_norm(transform_by_spectrum(spec, f) - f).value;
    est.value = std::max(est.value, err / lip);
    if (block > 0) block_sup[block] = std::max(block_sup[block], sup_norm(f).value / lip);
    ++est.candidates;
  };
  for (int l = 1; l <= D; ++l) {
    consider(HarmonicField::single(l, 0), l);
    consider(detail::sectoral_real(l), l);
  }
  std::uniform_int_distribution<int> pick(1, D);
  for (int s = 0; s < opt.samples; ++s) {
    if (s % 2 == 0) {
      const int l = pick(rng);
      consider(random_real_block(l, rng), l);
    } else {
      HarmonicField f = random_real_field(D, rng, [](int l) { return l == 0 ? 0.0 : 1.0 / (double(l) * l); });
      consider(f, 0);
    }
  }
  for (int l = 1; l <= D; ++l) {
    const double beta = l < static_cast<int>(spec.beta.size()) ? spec.beta[l] : 0.0;
    est.block_bound += (1.0 - beta) * block_sup[l];
  }
  return est;
}

/// Seeded search over Hermitian T: sigma-breve of Y_{l,0} and of random real
/// blocks for l = 1..n, then random GUE matrices.
inline double theta_n(int n, const SearchOptions& opt = {}) {
  const CoherentFamily fam = coherent_family(n);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double best = 0.0;
  auto consider = [&](const Matrix& T0) {
    const Matrix T = (T0 + T0.adjoint()) / 2.0;
    const double lip = lip_matrix(T).value;
    if (lip <= 1e-12) return;
    best = std::max(best, operator_norm(T - adjoint_symbol(fam, symbol(fam, T))) / lip);
  };
  for (int l = 1; l <= n; ++l) {
    consider(adjoint_symbol(fam, HarmonicField::single(l, 0)));
    consider(adjoint_symbol(fam, random_real_block(l, rng)));
  }
  const int d = n + 1;
  for (int s = 0; s < opt.samples; ++s) {
    Matrix A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = Complex(normal(rng), normal(rng));
    consider(A);
  }
  return best;
}

struct BridgeEstimate {
  int n = 0;
  double delta_n = 0.0;
  double theta_n = 0.0;
  double epsilon = 0.0;
  double gh_upper = 0.0;
  std::uint64_t search_seed = 0;
  double delta_block_bound = 0.0;
  int max_degree = 0;
};

inline BridgeEstimate gh_upper(int n, const SearchOptions& opt = {}) {
  const DeltaEstimate d = delta_n(n, opt);
  const double t = theta_n(n, opt);
  BridgeEstimate b;
  b.n = n;
  b.delta_n = d.value;
  b.theta_n = t;
  b.epsilon = std::max(d.value, t);
  b.gh_upper = 2.0 * b.epsilon;
  b.search_seed = opt.seed;
  b.delta_block_bound = d.block_bound;
  b.max_degree = d.max_degree;
  return b;
}

struct InequalityReport {
  double worst_ratio = 0.0;  // max lhs / rhs over inputs with rhs > 0
  bool holds = true;
  int checked = 0;
};

struct RadiusReport {
  double haar_mean_length = 0.0;
  InequalityReport fields;
  InequalityReport matrices;
  bool holds() const { return fields.holds && matrices.holds; }
};

/// ||b - mean(b)|| <= 2 h(l) Lip(b) on random real fields of degree <= 4 and
/// random Hermitian matrices in B(H^n).
inline RadiusReport radius_check(int n, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RadiusReport rep;
  rep.haar_mean_length = LengthFunction{}.haar_mean();
  const double slack = 1.0 + 1e-3;
  auto record = [&](InequalityReport& r, double lhs, double lip) {
    const double rhs = 2.0 * rep.haar_mean_length * lip;
    ++r.checked;
    if (rhs > 0) r.worst_ratio = std::max(r.worst_ratio, lhs / rhs);
    if (lhs > rhs * slack + 1e-12) r.holds = false;
  };
  const int d = n + 1;
  for (int s = 0; s < samples; ++s) {
    HarmonicField b = random_real_field(4, rng);
    HarmonicField centered = b;
    centered.coeffs(0) = 0.0;
    record(rep.fields, sup_norm(centered).value, lip_field(b).value);

    Matrix A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = Complex(normal(rng), normal(rng));
    const Matrix T = (A + A.adjoint()) / 2.0;
    const Complex mean = T.trace() / double(d);
    record(rep.matrices, operator_norm(T - mean * Matrix::Identity(d, d)), lip_matrix(T).value);
  }
  return rep;
}

struct ContractionReport {
  InequalityReport adjoint;  // Lip(sigma-breve f) against Lip(f)
  InequalityReport symbol;   // Lip(sigma T) against Lip(T)
  bool holds() const { return adjoint.holds && symbol.holds; }
};

/// Both Berezin maps are Lip-contractions, on random degree-3 fields and
/// random Hermitian matrices.
inline ContractionReport contraction_check(int n, int samples, std::uint64_t seed) {
  const CoherentFamily fam = coherent_family(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ContractionReport rep;
  const double slack = 1.0 + 1e-3;
  auto record = [&](InequalityReport& r, double lhs, double rhs) {
    ++r.checked;
    if (rhs > 0) r.worst_ratio = std::max(r.worst_ratio, lhs / rhs);
    if (lhs > rhs * slack + 1e-12) r.holds = false;
  };
  const int d = n + 1;
  for (int s = 0; s < samples; ++s) {
    const HarmonicField f = random_real_field(3, rng);
    const Matrix Bf = adjoint_symbol(fam, f);
    record(rep.adjoint, lip_matrix((Bf + Bf.adjoint()) / 2.0).value, lip_field(f).value);

    Matrix A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = Complex(normal(rng), normal(rng));
    const Matrix T = (A + A.adjoint()) / 2.0;
    record(rep.symbol, lip_field(symbol(fam, T)).value, lip_matrix(T).value);
  }
  return rep;
}

}  // namespace fuzzy
