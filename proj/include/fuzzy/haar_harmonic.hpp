#pragma once

// Exact quadrature on SU(2) and S^2, and spherical-harmonic analysis of
// band-limited fields.
//
// Spherical harmonics are orthonormal for the area measure on the unit sphere
// and carry the Condon-Shortley phase. Quadrature weights are normalized to a
// probability measure, so analysis multiplies by 4pi. A HarmonicField stores
// block l at offsets [l^2, l^2 + 2l] ordered m = l..-l, matching the basis order
// of SpinIrrep, so translate() is a block-diagonal product of Wigner matrices.

#include "fuzzy/su2_repr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fuzzy {

struct GaussLegendre {
  std::vector<double> nodes;    // ascending in [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Newton iteration on P_n from the Chebyshev initial guesses.
inline GaussLegendre gauss_legendre(int npts) {
  if (npts < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  GaussLegendre gl;
  gl.nodes.resize(npts);
  gl.weights.resize(npts);
  for (int i = 0; i < (npts + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (npts + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= npts; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = npts * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= npts; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = npts * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[npts - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[npts - 1 - i] = w;
  }
  if (npts % 2 == 1) gl.nodes[npts / 2] = 0.0;
  return gl;
}

/// Gauss-Legendre rule mapped onto [a, b].
inline GaussLegendre gauss_legendre(int npts, double a, double b) {
  GaussLegendre gl = gauss_legendre(npts);
  for (int i = 0; i < npts; ++i) {
    gl.nodes[i] = 0.5 * (b - a) * gl.nodes[i] + 0.5 * (a + b);
    gl.weights[i] *= 0.5 * (b - a);
  }
  return gl;
}

/// Haar quadrature on SU(2). Integrates every matrix coefficient of every irrep
/// with 2j <= exact_degree exactly; products of coefficients of spins j1, j2 are
/// exact when 2j1 + 2j2 <= exact_degree.
struct QuadratureRule {
  std::vector<GroupElement> nodes;
  std::vector<double> weights;
  int exact_degree = 0;

  template <class F>
  auto integrate(F&& f) const {
    using R = std::decay_t<decltype(f(nodes[0]))>;
    R acc = R(0) * 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Product rule: Gauss-Legendre in cos(beta) times uniform grids in alpha and
/// gamma over [0, 4pi).
inline QuadratureRule haar_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("haar_rule: degree must be >= 0");
  // Frequencies of e^{-i m alpha} with |2m| <= degree vanish on degree+1 points.
  const int n_angle = degree + 1;
  // Surviving terms are d^j_00(beta) = P_j(cos beta) with j <= degree/2.
  const int n_beta = degree / 4 + 1;
  const GaussLegendre gl = gauss_legendre(n_beta);
  QuadratureRule rule;
  rule.exact_degree = degree;
  rule.nodes.reserve(static_cast<std::size_t>(n_angle) * n_angle * n_beta);
  for (int b = 0; b < n_beta; ++b) {
    const double beta = std::acos(std::clamp(gl.nodes[b], -1.0, 1.0));
    const double wb = gl.weights[b] / 2.0 / n_angle / n_angle;
    for (int a = 0; a < n_angle; ++a) {
      for (int c = 0; c < n_angle; ++c) {
        rule.nodes.push_back({4 * kPi * a / n_angle, beta, 4 * kPi * c / n_angle});
        rule.weights.push_back(wb);
      }
    }
  }
  return rule;
}

/// Haar integral of cos^{2m}(beta/2) = |<U_x xi, xi>|^{2m} for spin 1/2.
inline double coherent_moment(int m) {
  if (m < 0) throw std::invalid_argument("coherent_moment: m must be >= 0");
  const QuadratureRule rule = haar_rule(2 * m);
  return rule.integrate([m](const GroupElement& g) { return std::pow(std::cos(g.beta / 2), 2 * m); });
}

/// Product grid on S^2: Gauss-Legendre rings in cos(theta), uniform longitudes.
/// Exact for products Y_{l,m} conj(Y_{l',m'}) with l + l' <= exact_degree.
struct SphereGrid {
  int exact_degree = 0;
  std::vector<double> ring_theta;   // colatitude of each ring
  std::vector<double> ring_weight;  // per-ring weight, sums to 1 / n_phi
  int n_phi = 1;

  std::size_t size() const { return ring_theta.size() * static_cast<std::size_t>(n_phi); }
  double theta(std::size_t k) const { return ring_theta[k / n_phi]; }
  double phi(std::size_t k) const { return 2 * kPi * static_cast<double>(k % n_phi) / n_phi; }
  double weight(std::size_t k) const { return ring_weight[k / n_phi]; }
};

inline SphereGrid sphere_grid(int degree) {
  if (degree < 0) throw std::invalid_argument("sphere_grid: degree must be >= 0");
  const GaussLegendre gl = gauss_legendre(degree / 2 + 1);
  SphereGrid grid;
  grid.exact_degree = degree;
  grid.n_phi = degree + 1;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    grid.ring_theta.push_back(std::acos(std::clamp(gl.nodes[i], -1.0, 1.0)));
    grid.ring_weight.push_back(gl.weights[i] / 2.0 / grid.n_phi);
  }
  return grid;
}

inline int harmonic_index(int l, int m) { return l * l + (l - m); }
inline int harmonic_count(int L) { return (L + 1) * (L + 1); }

/// Orthonormal associated Legendre values Pbar_l^m(cos theta) for 0 <= m <= l <= L,
/// Condon-Shortley phase included, so Y_lm = Pbar_l^m e^{i m phi} for m >= 0.
/// Stored at [l(l+1)/2 + m].
inline std::vector<double> normalized_legendre(int L, double theta) {
  std::vector<double> p(static_cast<std::size_t>((L + 1) * (L + 2) / 2), 0.0);
  const double x = std::cos(theta), s = std::sin(theta);
  auto at = [&p](int l, int m) -> double& { return p[static_cast<std::size_t>(l * (l + 1) / 2 + m)]; };
  at(0, 0) = std::sqrt(1.0 / (4 * kPi));
  for (int m = 1; m <= L; ++m) at(m, m) = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * at(m - 1, m - 1);
  for (int m = 0; m < L; ++m) at(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * at(m, m);
  for (int m = 0; m <= L; ++m) {
    for (int l = m + 2; l <= L; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      at(l, m) = a * (x * at(l - 1, m) - b * at(l - 2, m));
    }
  }
  return p;
}

/// All Y_lm(theta, phi), l <= L, in HarmonicField order.
inline Vector ylm_all(int L, double theta, double phi) {
  const std::vector<double> p = normalized_legendre(L, theta);
  std::vector<Complex> phase(static_cast<std::size_t>(L + 1), 1.0);
  const Complex step = std::exp(kI * phi);
  for (int m = 1; m <= L; ++m) phase[m] = phase[m - 1] * step;
  Vector y(harmonic_count(L));
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      const Complex v = p[static_cast<std::size_t>(l * (l + 1) / 2 + m)] * phase[m];
      y(harmonic_index(l, m)) = v;
      if (m > 0) y(harmonic_index(l, -m)) = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(v);
    }
  }
  return y;
}

/// A band-limited function on S^2, f = sum_{l<=L} c_lm Y_lm.
struct HarmonicField {
  int max_degree = 0;
  Vector coeffs = Vector::Zero(1);

  static HarmonicField zero(int L) { return {L, Vector::Zero(harmonic_count(L))}; }
  static HarmonicField constant(Complex c, int L = 0) {
    HarmonicField f = zero(L);
    f.coeffs(0) = c * std::sqrt(4 * kPi);
    return f;
  }
  static HarmonicField single(int l, int m, int L = -1) {
    HarmonicField f = zero(std::max(L, l));
    f.coeffs(harmonic_index(l, m)) = 1.0;
    return f;
  }

  Complex& operator()(int l, int m) { return coeffs(harmonic_index(l, m)); }
  Complex operator()(int l, int m) const { return coeffs(harmonic_index(l, m)); }

  auto block(int l) { return coeffs.segment(l * l, 2 * l + 1); }
  auto block(int l) const { return coeffs.segment(l * l, 2 * l + 1); }

  /// Same function with capacity L (truncating above L).
  HarmonicField resized(int L) const {
    HarmonicField out = zero(L);
    const int n = std::min(harmonic_count(L), harmonic_count(max_degree));
    out.coeffs.head(n) = coeffs.head(n);
    return out;
  }

  /// Largest l carrying a coefficient above tol.
  int effective_degree(double tol = 0.0) const {
    for (int l = max_degree; l > 0; --l) {
      if (block(l).cwiseAbs().maxCoeff() > tol) return l;
    }
    return 0;
  }

  /// Deviation from the reality condition c(l,-m) = (-1)^m conj(c(l,m)).
  double reality_defect() const {
    double worst = 0.0;
    for (int l = 0; l <= max_degree; ++l) {
      for (int m = 0; m <= l; ++m) {
        const Complex expect = (m % 2 == 0 ? 1.0 : -1.0) * std::conj((*this)(l, m));
        worst = std::max(worst, std::abs((*this)(l, -m) - expect));
      }
    }
    return worst;
  }
  bool is_real(double tol = 1e-10) const { return reality_defect() <= tol * (1.0 + coeffs.cwiseAbs().maxCoeff()); }

  friend HarmonicField operator+(const HarmonicField& a, const HarmonicField& b) {
    const int L = std::max(a.max_degree, b.max_degree);
    HarmonicField out = a.resized(L);
    out.coeffs += b.resized(L).coeffs;
    return out;
  }
  friend HarmonicField operator-(const HarmonicField& a, const HarmonicField& b) { return a + (-1.0) * b; }
  friend HarmonicField operator*(Complex s, const HarmonicField& a) { return {a.max_degree, s * a.coeffs}; }
};

namespace detail {

/// E(m + L, k) = exp(sign i m phi_k) for phi_k = 2 pi k / n_phi.
inline Matrix phase_table(int L, int n_phi, double sign) {
  Matrix E(2 * L + 1, n_phi);
  for (int k = 0; k < n_phi; ++k) {
    const Complex step = std::exp(Complex(0.0, sign * 2 * kPi * k / n_phi));
    Complex up = 1.0;
    E(L, k) = 1.0;
    for (int m = 1; m <= L; ++m) {
      up *= step;
      E(L + m, k) = up;
      E(L - m, k) = std::conj(up);
    }
  }
  return E;
}

}  // namespace detail

/// Field value at a point: sum c_lm Y_lm.
inline Complex evaluate(const HarmonicField& f, double theta, double phi) {
  return ylm_all(f.max_degree, theta, phi).transpose() * f.coeffs;
}

/// Samples of f on the grid nodes, ring by ring.
inline Vector synthesize(const HarmonicField& f, const SphereGrid& grid) {
  const int L = f.max_degree;
  const auto n_rings = static_cast<Eigen::Index>(grid.ring_theta.size());
  // ring_m(r, m + L) = sum_l c_lm Pbar_l^m(theta_r), then one product with the phase table.
  Matrix ring_m(n_rings, 2 * L + 1);
  for (Eigen::Index r = 0; r < n_rings; ++r) {
    const std::vector<double> p = normalized_legendre(L, grid.ring_theta[static_cast<std::size_t>(r)]);
    for (int m = -L; m <= L; ++m) {
      Complex acc = 0.0;
      const int am = std::abs(m);
      const double sign = (m < 0 && (am % 2 == 1)) ? -1.0 : 1.0;
      for (int l = am; l <= L; ++l) acc += f(l, m) * (sign * p[static_cast<std::size_t>(l * (l + 1) / 2 + am)]);
      ring_m(r, m + L) = acc;
    }
  }
  const Matrix values = ring_m * detail::phase_table(L, grid.n_phi, 1.0);
  Vector out(static_cast<Eigen::Index>(grid.size()));
  for (Eigen::Index r = 0; r < n_rings; ++r) out.segment(r * grid.n_phi, grid.n_phi) = values.row(r).transpose();
  return out;
}

/// Coefficients up to degree L from samples on the grid.
inline HarmonicField analyze(const Vector& samples, const SphereGrid& grid, int L) {
  if (L < 0) throw std::invalid_argument("analyze: L must be >= 0");
  if (grid.exact_degree < 2 * L) {
    throw std::invalid_argument("analyze: grid exact degree " + std::to_string(grid.exact_degree) +
                                " is below 2L = " + std::to_string(2 * L));
  }
  if (samples.size() != static_cast<Eigen::Index>(grid.size())) throw std::invalid_argument("analyze: sample count mismatch");
  HarmonicField f = HarmonicField::zero(L);
  const auto n_rings = static_cast<Eigen::Index>(grid.ring_theta.size());
  const Matrix per_ring = Eigen::Map<const Matrix>(samples.data(), grid.n_phi, n_rings).transpose();
  const Matrix fourier = per_ring * detail::phase_table(L, grid.n_phi, -1.0).transpose();
  std::vector<Complex> ring_m(static_cast<std::size_t>(2 * L + 1));
  for (std::size_t r = 0; r < grid.ring_theta.size(); ++r) {
    for (int m = -L; m <= L; ++m) {
      ring_m[static_cast<std::size_t>(m + L)] = fourier(static_cast<Eigen::Index>(r), m + L) * grid.ring_weight[r] * (4 * kPi);
    }
    const std::vector<double> p = normalized_legendre(L, grid.ring_theta[r]);
    for (int l = 0; l <= L; ++l) {
      for (int m = -l; m <= l; ++m) {
        const int am = std::abs(m);
        const double sign = (m < 0 && (am % 2 == 1)) ? -1.0 : 1.0;
        f(l, m) += ring_m[static_cast<std::size_t>(m + L)] * (sign * p[static_cast<std::size_t>(l * (l + 1) / 2 + am)]);
      }
    }
  }
  return f;
}

/// Samples a callable on the grid and analyzes it.
template <class F>
HarmonicField analyze_function(F&& f, const SphereGrid& grid, int L) {
  Vector samples(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) samples(static_cast<Eigen::Index>(k)) = f(grid.theta(k), grid.phi(k));
  return analyze(samples, grid, L);
}

/// Unit vector of the point with colatitude theta and longitude phi.
inline Eigen::Vector3d sphere_point(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

inline std::pair<double, double> sphere_angles(const Eigen::Vector3d& p) {
  const double theta = std::acos(std::clamp(p.z() / p.norm(), -1.0, 1.0));
  double phi = std::atan2(p.y(), p.x());
  if (phi < 0) phi += 2 * kPi;
  return {theta, phi};
}

/// The field x -> f(g^{-1} x). Block l transforms by the spin-l Wigner matrix.
inline HarmonicField translate(const HarmonicField& f, const GroupElement& g) {
  HarmonicField out = HarmonicField::zero(f.max_degree);
  for (int l = 0; l <= f.max_degree; ++l) {
    const SpinIrrep& rep = cached_irrep(2 * l);
    out.block(l) = wigner_matrix(rep, g) * f.block(l);
  }
  return out;
}

/// Derivative of translate(exp(-i t u.J), f) at t = 0 for a coordinate axis u:
/// block l maps to -i J_axis c_l. Real fields stay real.
inline HarmonicField axis_derivative(const HarmonicField& f, int axis) {
  HarmonicField out = HarmonicField::zero(f.max_degree);
  for (int l = 1; l <= f.max_degree; ++l) {
    const SpinIrrep& rep = cached_irrep(2 * l);
    out.block(l) = -kI * (rep.generator(axis) * f.block(l));
  }
  return out;
}

/// A supremum found by grid search plus local polishing; tolerance is the
/// change between the last two refinement levels.
struct NormValue {
  double value = 0.0;
  double tolerance = 0.0;
  double theta = 0.0;  // location of the maximum
  double phi = 0.0;
};

namespace detail {

/// sqrt(sum_k |f_k|^2) at a point.
inline double joint_magnitude(std::span<const HarmonicField> fields, double theta, double phi) {
  int L = 0;
  for (const auto& f : fields) L = std::max(L, f.max_degree);
  const Vector y = ylm_all(L, theta, phi);
  double acc = 0.0;
  for (const auto& f : fields) {
    const Complex v = y.head(f.coeffs.size()).transpose() * f.coeffs;
    acc += std::norm(v);
  }
  return std::sqrt(acc);
}

/// Compass search on the sphere around p; steps in a local tangent frame.
inline std::pair<double, Eigen::Vector3d> polish_maximum(std::span<const HarmonicField> fields,
                                                         Eigen::Vector3d p, double step) {
  auto value_at = [&](const Eigen::Vector3d& q) {
    const auto [t, f] = sphere_angles(q);
    return joint_magnitude(fields, t, f);
  };
  double best = value_at(p);
  while (step > 1e-10) {
    Eigen::Vector3d helper = std::abs(p.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
    const Eigen::Vector3d e1 = p.cross(helper).normalized();
    const Eigen::Vector3d e2 = p.cross(e1).normalized();
    bool improved = false;
    for (int k = 0; k < 8; ++k) {
      const double ang = kPi * k / 4;
      const Eigen::Vector3d dir = std::cos(ang) * e1 + std::sin(ang) * e2;
      const Eigen::Vector3d q = (std::cos(step) * p + std::sin(step) * dir).normalized();
      const double v = value_at(q);
      if (v > best) {
        best = v;
        p = q;
        improved = true;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return {best, p};
}

/// Grid maximum of the joint magnitude with the top candidates polished.
inline NormValue sup_on_level(std::span<const HarmonicField> fields, int n_theta) {
  const int n_phi = 2 * n_theta;
  std::vector<std::pair<double, Eigen::Vector3d>> samples;
  samples.reserve(static_cast<std::size_t>(n_theta + 2) * n_phi);
  // Poles, then interior rings.
  for (double pole : {0.0, kPi}) {
    samples.emplace_back(joint_magnitude(fields, pole, 0.0), sphere_point(pole, 0.0));
  }
  SphereGrid rings;
  rings.n_phi = n_phi;
  for (int i = 0; i < n_theta; ++i) {
    rings.ring_theta.push_back(kPi * (i + 0.5) / n_theta);
    rings.ring_weight.push_back(0.0);
  }
  std::vector<Vector> values;
  for (const auto& f : fields) values.push_back(synthesize(f, rings));
  for (std::size_t k = 0; k < rings.size(); ++k) {
    double acc = 0.0;
    for (const auto& v : values) acc += std::norm(v(static_cast<Eigen::Index>(k)));
    samples.emplace_back(std::sqrt(acc), sphere_point(rings.theta(k), rings.phi(k)));
  }
  constexpr std::size_t kCandidates = 6;
  const std::size_t keep = std::min(kCandidates, samples.size());
  std::partial_sort(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(keep), samples.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  NormValue best;
  best.value = -1.0;
  const double step = kPi / n_theta;
  for (std::size_t c = 0; c < keep; ++c) {
    const auto [v, p] = polish_maximum(fields, samples[c].second, step);
    if (v > best.value) {
      best.value = v;
      std::tie(best.theta, best.phi) = sphere_angles(p);
    }
  }
  return best;
}

}  // namespace detail

/// sup_x sqrt(sum_k |f_k(x)|^2), refined until two levels agree to rel_tol.
inline NormValue sup_norm_joint(std::span<const HarmonicField> fields, double rel_tol = 1e-6) {
  int L = 0;
  for (const auto& f : fields) L = std::max(L, f.max_degree);
  int n_theta = 2 * L + 4;
  NormValue prev = detail::sup_on_level(fields, n_theta);
  for (int level = 0; level < 5; ++level) {
    n_theta *= 2;
    NormValue next = detail::sup_on_level(fields, n_theta);
    const double change = std::abs(next.value - prev.value);
    if (next.value < prev.value) next = NormValue{prev.value, 0.0, prev.theta, prev.phi};
    next.tolerance = change;
    if (change <= rel_tol * std::max(1.0, next.value)) return next;
    prev = next;
  }
  return prev;
}

inline NormValue sup_norm(const HarmonicField& f, double rel_tol = 1e-6) {
  return sup_norm_joint(std::span<const HarmonicField>(&f, 1), rel_tol);
}

/// Upper bound sum_l |c_l| sqrt((2l+1)/4pi) on the sup norm, from the addition
/// theorem and Cauchy-Schwarz on each block.
inline double sup_bound(const HarmonicField& f) {
  double acc = 0.0;
  for (int l = 0; l <= f.max_degree; ++l) acc += f.block(l).norm() * std::sqrt((2 * l + 1) / (4 * kPi));
  return acc;
}

/// A random real field: block l gets independent Gaussian coefficients scaled
/// by weight(l), with the reality condition imposed.
template <class Rng>
HarmonicField random_real_field(int L, Rng& rng, const std::function<double(int)>& weight) {
  std::normal_distribution<double> normal(0.0, 1.0);
  HarmonicField f = HarmonicField::zero(L);
  for (int l = 0; l <= L; ++l) {
    const double w = weight(l);
    f(l, 0) = w * normal(rng);
    for (int m = 1; m <= l; ++m) {
      const Complex c(w * normal(rng) / std::sqrt(2.0), w * normal(rng) / std::sqrt(2.0));
      f(l, m) = c;
      f(l, -m) = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(c);
    }
  }
  return f;
}

template <class Rng>
HarmonicField random_real_field(int L, Rng& rng) {
  return random_real_field(L, rng, [](int) { return 1.0; });
}

/// Random real field supported on the single block l.
template <class Rng>
HarmonicField random_real_block(int l, Rng& rng) {
  return random_real_field(l, rng, [l](int k) { return k == l ? 1.0 : 0.0; });
}

}  // namespace fuzzy
