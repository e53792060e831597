#pragma once

// Berezin quantization of the 2-sphere with spin n/2 coherent states.
//
// A sphere point (theta, phi) is the orbit point of GroupElement{phi, theta, 0};
// its coherent vector is U(g) e_0. Integrals over the sphere use the normalized
// area measure, so the adjoint carries the factor d = n + 1 and the L^2 pairing
// on fields is sum conj(f_lm) g_lm / 4pi.

#include "fuzzy/haar_harmonic.hpp"

#include <Eigen/SVD>

#include <string>
#include <vector>

namespace fuzzy {

struct CoherentFamily {
  int n = 0;
  SpinIrrep rep;
  Matrix P;  // projector onto e_0

  Vector state(const GroupElement& g) const { return coherent_vector(rep, g); }
  Vector state_at(double theta, double phi) const { return state({phi, theta, 0.0}); }
  /// alpha_g(P) = U(g) P U(g)^*.
  Matrix projector(const GroupElement& g) const {
    const Vector v = state(g);
    return v * v.adjoint();
  }
  int dim() const { return rep.dim; }
};

inline CoherentFamily coherent_family(int n) {
  if (n < 0) throw std::invalid_argument("coherent_family: n must be >= 0");
  CoherentFamily fam;
  fam.n = n;
  fam.rep = build_irrep(HalfInt(n));
  fam.P = Matrix::Zero(n + 1, n + 1);
  fam.P(0, 0) = 1.0;
  return fam;
}

/// Coherent vectors at every node of a grid, one column per node.
inline Matrix coherent_table(const CoherentFamily& fam, const SphereGrid& grid) {
  const int d = fam.dim();
  Matrix V(d, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t r = 0; r < grid.ring_theta.size(); ++r) {
    const Vector base = fam.state_at(grid.ring_theta[r], 0.0);
    for (int p = 0; p < grid.n_phi; ++p) {
      const std::size_t k = r * grid.n_phi + p;
      const Vector phase = detail::phase_diagonal(fam.rep.weights, grid.phi(k));
      V.col(static_cast<Eigen::Index>(k)) = phase.cwiseProduct(base);
    }
  }
  return V;
}

namespace detail {

inline void check_square(const CoherentFamily& fam, const Matrix& T, const char* who) {
  if (T.rows() != fam.dim() || T.cols() != fam.dim()) {
    throw std::invalid_argument(std::string(who) + ": expected a " + std::to_string(fam.dim()) + "x" +
                                std::to_string(fam.dim()) + " matrix");
  }
}

// <v_k, T v_k> for every column of V.
inline Vector expectations(const Matrix& V, const Matrix& T) {
  return (V.conjugate().cwiseProduct(T * V)).colwise().sum().transpose();
}

}  // namespace detail

/// sigma_T(x) = tr(T alpha_x(P)) at one point.
inline Complex symbol_at(const CoherentFamily& fam, const Matrix& T, double theta, double phi) {
  detail::check_square(fam, T, "symbol_at");
  const Vector v = fam.state_at(theta, phi);
  return v.dot(T * v);
}

/// The symbol as a field of degree n, sampled and analyzed exactly.
inline HarmonicField symbol(const CoherentFamily& fam, const Matrix& T) {
  detail::check_square(fam, T, "symbol");
  const SphereGrid grid = sphere_grid(2 * fam.n);
  return analyze(detail::expectations(coherent_table(fam, grid), T), grid, fam.n);
}

inline HarmonicField symbol(int n, const Matrix& T) { return symbol(coherent_family(n), T); }

/// d * integral of f(x) alpha_x(P). quad_degree < 0 picks n + deg f.
inline Matrix adjoint_symbol(const CoherentFamily& fam, const HarmonicField& f, int quad_degree = -1) {
  const int need = fam.n + f.effective_degree();
  if (quad_degree < 0) quad_degree = need;
  if (quad_degree < need) {
    throw std::invalid_argument("adjoint_symbol: quadrature degree " + std::to_string(quad_degree) +
                                " is below n + deg f = " + std::to_string(need));
  }
  const SphereGrid grid = sphere_grid(quad_degree);
  const Matrix V = coherent_table(fam, grid);
  Vector w = synthesize(f, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) w(static_cast<Eigen::Index>(k)) *= grid.weight(k) * fam.dim();
  return V * w.asDiagonal() * V.adjoint();
}

inline Matrix adjoint_symbol(int n, const HarmonicField& f, int quad_degree = -1) {
  return adjoint_symbol(coherent_family(n), f, quad_degree);
}

/// h_{P^n}(x) = d tr(P alpha_x(P)) = (n+1) cos^{2n}(theta/2).
inline HarmonicField hP_field(const CoherentFamily& fam) { return double(fam.dim()) * symbol(fam, fam.P); }
inline HarmonicField hP_field(int n) { return hP_field(coherent_family(n)); }

/// sigma(sigma-breve(f)).
inline HarmonicField transform_via_maps(const CoherentFamily& fam, const HarmonicField& f) {
  return symbol(fam, adjoint_symbol(fam, f));
}

/// F(y) = integral over S^2 of h(p) f(y p), the zonal convolution with h_{P^n}.
/// Computed pointwise from translated copies of f; output degree is deg f.
inline HarmonicField transform_via_convolution(const CoherentFamily& fam, const HarmonicField& f) {
  const int L = f.effective_degree();
  const HarmonicField h = hP_field(fam);
  const SphereGrid inner = sphere_grid(fam.n + L);
  Eigen::VectorXd kernel(static_cast<Eigen::Index>(inner.size()));
  for (std::size_t k = 0; k < inner.size(); ++k) {
    kernel(static_cast<Eigen::Index>(k)) = inner.weight(k) * evaluate(h, inner.theta(k), 0.0).real();
  }
  const HarmonicField src = f.resized(L);
  const SphereGrid outer = sphere_grid(2 * L);
  Vector values(static_cast<Eigen::Index>(outer.size()));
  for (std::size_t k = 0; k < outer.size(); ++k) {
    const GroupElement y{outer.phi(k), outer.theta(k), 0.0};
    values(static_cast<Eigen::Index>(k)) = kernel.cast<Complex>().dot(synthesize(translate(src, y.inverse()), inner));
  }
  return analyze(values, outer, L);
}

struct TransformPair {
  HarmonicField via_maps;
  HarmonicField via_convolution;
  double coefficient_gap = 0.0;  // max |difference| over coefficients
  double sup_gap = 0.0;          // sup_bound of the difference
};

inline TransformPair transform(const CoherentFamily& fam, const HarmonicField& f) {
  TransformPair out{transform_via_maps(fam, f), transform_via_convolution(fam, f)};
  const int L = std::max(out.via_maps.max_degree, out.via_convolution.max_degree);
  const HarmonicField diff = out.via_maps.resized(L) - out.via_convolution.resized(L);
  out.coefficient_gap = diff.coeffs.size() ? diff.coeffs.cwiseAbs().maxCoeff() : 0.0;
  out.sup_gap = sup_bound(diff);
  return out;
}

inline TransformPair transform(int n, const HarmonicField& f) { return transform(coherent_family(n), f); }

/// Eigenvalues of sigma o sigma-breve on each isotypic block l = 0..L.
struct TransformSpectrum {
  int n = 0;
  std::vector<double> beta;
};

/// beta[l] is read off the (l, 0) coefficient of the transform of Y_{l,0}.
inline TransformSpectrum spectrum(const CoherentFamily& fam, int L) {
  if (L < 0) throw std::invalid_argument("spectrum: L must be >= 0");
  TransformSpectrum s{fam.n, {}};
  for (int l = 0; l <= L; ++l) {
    const HarmonicField out = transform_via_maps(fam, HarmonicField::single(l, 0)).resized(l);
    s.beta.push_back(out(l, 0).real());
  }
  return s;
}

inline TransformSpectrum spectrum(int n, int L) { return spectrum(coherent_family(n), L); }

/// Largest deviation of transform(Y_{l,m}) from beta[l] Y_{l,m} over all m, l <= L.
inline double spectrum_scalar_defect(const CoherentFamily& fam, const TransformSpectrum& s) {
  double worst = 0.0;
  const int L = static_cast<int>(s.beta.size()) - 1;
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) {
      const HarmonicField out = transform_via_maps(fam, HarmonicField::single(l, m)).resized(L);
      const HarmonicField expect = s.beta[l] * HarmonicField::single(l, m, L);
      worst = std::max(worst, (out.coeffs - expect.coeffs).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

/// Applies a block-scalar spectrum: block l is multiplied by beta[l] (0 past the end).
inline HarmonicField transform_by_spectrum(const TransformSpectrum& s, const HarmonicField& f) {
  HarmonicField out = f;
  for (int l = 0; l <= f.max_degree; ++l) {
    const double b = l < static_cast<int>(s.beta.size()) ? s.beta[l] : 0.0;
    out.block(l) *= b;
  }
  return out;
}

struct MomentCheck {
  double quadrature = 0.0;
  double dimension_ratio = 0.0;
};

/// h_{P^n}(sigma_P) against dim H^n / dim H^{n+1}; sigma_P uses the spin-1/2 P.
inline MomentCheck moment_check(int n) {
  const CoherentFamily fam = coherent_family(n);
  const SpinIrrep& half = cached_irrep(1);
  const QuadratureRule rule = haar_rule(2 * n + 2);
  const double value = rule.integrate([&](const GroupElement& g) {
    const double h = fam.dim() * std::norm(fam.state(g)(0));
    const double sigma = std::norm(coherent_vector(half, g)(0));
    return h * sigma;
  });
  return {value, double(n + 1) / double(n + 2)};
}

struct ConcentrationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double haar_chi_half = 0.0;  // Haar measure of {sigma_P >= 1 - gamma/2}
  double beta_star = 0.0;      // edge of the superlevel set {sigma_P >= 1 - gamma}
  bool holds = false;
};

/// |h_{P^n}((1 - chi_gamma) a)| against sup|a| / h(chi_{gamma/2}) ((1-gamma)/(1-gamma/2))^n.
/// sigma_P = cos^2(theta/2) is zonal, so chi_gamma cuts at cos(theta) = 1 - 2 gamma and
/// each side is integrated with Gauss-Legendre in cos(theta) on its own interval.
inline ConcentrationCheck concentration_check(int n, double gamma, const HarmonicField& a) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("concentration_check: gamma must lie in (0, 1)");
  if (n < 0) throw std::invalid_argument("concentration_check: n must be >= 0");
  const int deg = a.effective_degree();
  const double t_star = 1.0 - 2.0 * gamma;
  const GaussLegendre gl = gauss_legendre((n + deg) / 2 + 1, -1.0, t_star);
  const int n_phi = deg + 1;
  Complex acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double t = gl.nodes[i];
    const double h = (n + 1) * std::pow((1.0 + t) / 2.0, n);
    Complex ring = 0.0;
    for (int p = 0; p < n_phi; ++p) ring += evaluate(a, std::acos(t), 2 * kPi * p / n_phi);
    acc += gl.weights[i] / 2.0 * h * ring / double(n_phi);
  }
  ConcentrationCheck out;
  out.lhs = std::abs(acc);
  const GaussLegendre cap = gauss_legendre(1, 1.0 - gamma, 1.0);
  out.haar_chi_half = cap.weights[0] / 2.0;
  out.beta_star = 2.0 * std::acos(std::sqrt(1.0 - gamma));
  out.rhs = sup_norm(a).value / out.haar_chi_half * std::pow((1.0 - gamma) / (1.0 - gamma / 2.0), n);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-6);
  return out;
}

inline double operator_norm(const Matrix& T) {
  if (T.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(T).singularValues()(0);
}

/// Smallest eigenvalue of the Hermitian part.
inline double min_eigenvalue(const Matrix& T) {
  const Matrix H = (T + T.adjoint()) / 2.0;
  return Eigen::SelfAdjointEigenSolver<Matrix>(H, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

/// Operator norms of sigma-breve^n(f) for n = 1..n_max.
inline std::vector<double> section_norm_profile(const HarmonicField& f, int n_max) {
  std::vector<double> out;
  for (int n = 1; n <= n_max; ++n) out.push_back(operator_norm(adjoint_symbol(n, f)));
  return out;
}

/// <A, B> for the normalized trace d^{-1} tr(A^* B).
inline Complex hs_inner(const Matrix& A, const Matrix& B) {
  return (A.adjoint() * B).trace() / double(A.rows());
}

/// <f, g> for the normalized area measure.
inline Complex l2_inner(const HarmonicField& f, const HarmonicField& g) {
  const int L = std::max(f.max_degree, g.max_degree);
  return f.resized(L).coeffs.dot(g.resized(L).coeffs) / (4 * kPi);
}

/// Count of singular values above rel_tol times the largest.
inline int numerical_rank(const Matrix& M, double rel_tol = 1e-8) {
  if (M.size() == 0) return 0;
  const Eigen::VectorXd s = Eigen::JacobiSVD<Matrix>(M).singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(i) > rel_tol * s(0) ? 1 : 0;
  return rank;
}

/// sigma and sigma-breve as explicit matrices. symbol_matrix maps vec(T)
/// (column-major) to coefficients of degree <= n; adjoint_matrix maps
/// coefficients of degree <= L to vec(sigma-breve(f)).
struct BerezinMaps {
  int n = 0;
  int L = 0;
  Matrix symbol_matrix;
  Matrix adjoint_matrix;

  int symbol_rank(double tol = 1e-8) const { return numerical_rank(symbol_matrix, tol); }
  int adjoint_rank(double tol = 1e-8) const { return numerical_rank(adjoint_matrix, tol); }
};

inline BerezinMaps berezin_maps(int n, int L) {
  if (L < 0) throw std::invalid_argument("berezin_maps: L must be >= 0");
  const CoherentFamily fam = coherent_family(n);
  const int d = fam.dim();
  BerezinMaps maps{n, L, Matrix(harmonic_count(n), d * d), Matrix(d * d, harmonic_count(L))};
  for (int c = 0; c < d * d; ++c) {
    Matrix E = Matrix::Zero(d, d);
    E(c % d, c / d) = 1.0;
    maps.symbol_matrix.col(c) = symbol(fam, E).coeffs;
  }
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) {
      maps.adjoint_matrix.col(harmonic_index(l, m)) = vec(adjoint_symbol(fam, HarmonicField::single(l, m)));
    }
  }
  return maps;
}

/// |symbol(alpha_g T) - translate(symbol T, g)| over coefficients.
inline double symbol_equivariance_defect(const CoherentFamily& fam, const GroupElement& g, const Matrix& T) {
  const HarmonicField lhs = symbol(fam, adjoint_act(fam.rep, g, T));
  const HarmonicField rhs = translate(symbol(fam, T), g);
  return (lhs.coeffs - rhs.coeffs).cwiseAbs().maxCoeff();
}

/// |sigma-breve(translate(f, g)) - alpha_g(sigma-breve f)| over entries.
inline double adjoint_equivariance_defect(const CoherentFamily& fam, const GroupElement& g, const HarmonicField& f) {
  const Matrix lhs = adjoint_symbol(fam, translate(f, g));
  const Matrix rhs = adjoint_act(fam.rep, g, adjoint_symbol(fam, f));
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace fuzzy
