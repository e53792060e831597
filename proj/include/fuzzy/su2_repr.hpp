#pragma once

// SU(2) irreducible representations, group elements in z-y-z Euler angles,
// symmetric tensor powers of the fundamental representation and the isotypic
// decomposition of B(H) under conjugation.
//
// Basis convention: the Jz eigenbasis ordered m = j, j-1, ..., -j, so the
// highest-weight vector is e_0 and its projector is the top-left matrix unit.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fuzzy {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Spin label j stored as the integer 2j.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  explicit HalfInt(int twice_value) : twice_(twice_value) {
    if (twice_value < 0) throw std::invalid_argument("HalfInt: 2j must be >= 0");
  }
  static HalfInt from_twice(int twice_value) { return HalfInt(twice_value); }
  static HalfInt integer(int j) { return HalfInt(2 * j); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr int dim() const { return twice_ + 1; }
  /// Weight m of basis index i (i = 0 is the highest weight).
  constexpr double weight(int i) const { return value() - i; }

  friend constexpr bool operator==(HalfInt, HalfInt) = default;

 private:
  int twice_ = 0;
};

namespace detail {

inline double wrap(double angle, double period) {
  double r = std::fmod(angle, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

}  // namespace detail

/// A point of SU(2) in z-y-z Euler angles: U = exp(-i a Jz) exp(-i b Jy) exp(-i c Jz).
/// alpha and gamma live in [0, 4pi) so that half-integer spins are single valued.
struct GroupElement {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  static GroupElement identity() { return {}; }

  /// Reduces the angles into the canonical ranges. A beta outside [0, pi] is
  /// resolved through the SU(2) matrix.
  static GroupElement from_euler(double a, double b, double c) {
    if (b >= 0.0 && b <= kPi) {
      return {detail::wrap(a, 4 * kPi), b, detail::wrap(c, 4 * kPi)};
    }
    GroupElement raw{a, b, c};
    return from_su2(raw.su2());
  }

  /// The spin-1/2 matrix of this element.
  Matrix2 su2() const {
    const double cb = std::cos(beta / 2), sb = std::sin(beta / 2);
    Matrix2 u;
    u(0, 0) = std::exp(-kI * ((alpha + gamma) / 2)) * cb;
    u(0, 1) = -std::exp(-kI * ((alpha - gamma) / 2)) * sb;
    u(1, 0) = std::exp(kI * ((alpha - gamma) / 2)) * sb;
    u(1, 1) = std::exp(kI * ((alpha + gamma) / 2)) * cb;
    return u;
  }

  /// Inverts su2(). At beta = 0 or pi the free angle gamma is set to 0.
  static GroupElement from_su2(const Matrix2& u) {
    const Complex a = u(0, 0), b = u(1, 0);
    const double beta = 2.0 * std::atan2(std::abs(b), std::abs(a));
    constexpr double kDegenerate = 1e-14;
    double alpha = 0.0, gamma = 0.0;
    if (std::abs(b) < kDegenerate) {
      alpha = -2.0 * std::arg(a);
    } else if (std::abs(a) < kDegenerate) {
      alpha = 2.0 * std::arg(b);
    } else {
      const double sum = -2.0 * std::arg(a);
      const double diff = 2.0 * std::arg(b);
      alpha = (sum + diff) / 2;
      gamma = (sum - diff) / 2;
    }
    GroupElement g{detail::wrap(alpha, 4 * kPi), beta, detail::wrap(gamma, 4 * kPi)};
    // alpha is fixed modulo 2pi only; a shift by 2pi flips the SU(2) sign.
    if ((g.su2() - u).norm() > (g.su2() + u).norm()) {
      g.alpha = detail::wrap(g.alpha + 2 * kPi, 4 * kPi);
    }
    return g;
  }

  GroupElement inverse() const { return from_su2(su2().adjoint()); }

  friend GroupElement operator*(const GroupElement& lhs, const GroupElement& rhs) {
    return from_su2(lhs.su2() * rhs.su2());
  }

  /// SO(3) image of this element acting on R^3.
  Eigen::Matrix3d rotation() const {
    const Eigen::Matrix3d rz1 = Eigen::AngleAxisd(alpha, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    const Eigen::Matrix3d ry = Eigen::AngleAxisd(beta, Eigen::Vector3d::UnitY()).toRotationMatrix();
    const Eigen::Matrix3d rz2 = Eigen::AngleAxisd(gamma, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    return rz1 * ry * rz2;
  }
};

/// Haar-random element from a uniformly distributed unit quaternion.
template <class Rng>
GroupElement random_group_element(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double q[4];
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : q) {
      x = normal(rng);
      norm += x * x;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  Matrix2 u;
  const Complex a(q[0] / norm, q[1] / norm), b(q[2] / norm, q[3] / norm);
  u << a, -std::conj(b), b, std::conj(a);
  return GroupElement::from_su2(u);
}

/// An irreducible representation of su(2) in the Jz eigenbasis (m = j..-j).
struct SpinIrrep {
  HalfInt j;
  int dim = 1;
  Matrix Jz, Jplus, Jminus, Jx, Jy;
  Vector highest_weight;
  // Jy = jy_basis * diag(weights) * jy_basis^*, used for exact exponentials.
  Matrix jy_basis;
  Eigen::VectorXd weights;

  /// Generators (Jx, Jy, Jz) by axis index.
  const Matrix& generator(int axis) const {
    switch (axis) {
      case 0: return Jx;
      case 1: return Jy;
      default: return Jz;
    }
  }
};

inline SpinIrrep build_irrep(HalfInt j) {
  const int d = j.dim();
  SpinIrrep rep;
  rep.j = j;
  rep.dim = d;
  rep.Jz = Matrix::Zero(d, d);
  rep.Jplus = Matrix::Zero(d, d);
  rep.weights.resize(d);
  for (int i = 0; i < d; ++i) {
    const double m = j.weight(i);
    rep.weights(i) = m;
    rep.Jz(i, i) = m;
    // Jplus e_{m} = sqrt((j-m)(j+m+1)) e_{m+1}; e_{m+1} sits one index up.
    if (i > 0) rep.Jplus(i - 1, i) = std::sqrt((j.value() - m) * (j.value() + m + 1));
  }
  rep.Jminus = rep.Jplus.adjoint();
  rep.Jx = (rep.Jplus + rep.Jminus) * 0.5;
  rep.Jy = (rep.Jplus - rep.Jminus) * Complex(0.0, -0.5);
  rep.highest_weight = Vector::Zero(d);
  rep.highest_weight(0) = 1.0;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(rep.Jy);
  // Eigenvalues come out ascending: -j..j. Reverse so column i has weight j - i.
  rep.jy_basis = eig.eigenvectors().rowwise().reverse();
  return rep;
}

inline SpinIrrep build_irrep_twice(int twice_j) { return build_irrep(HalfInt(twice_j)); }

/// Shared immutable irrep for 2j = twice_j, built on first use.
inline const SpinIrrep& cached_irrep(int twice_j) {
  static std::mutex lock;
  static std::deque<SpinIrrep> table;  // deque keeps references stable
  std::lock_guard<std::mutex> guard(lock);
  while (static_cast<int>(table.size()) <= twice_j) table.push_back(build_irrep(HalfInt(static_cast<int>(table.size()))));
  return table[static_cast<std::size_t>(twice_j)];
}

namespace detail {

inline Vector phase_diagonal(const Eigen::VectorXd& weights, double angle) {
  Vector d(weights.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) d(i) = std::exp(-kI * (angle * weights(i)));
  return d;
}

}  // namespace detail

/// exp(-i beta Jy) from the cached eigenbasis.
inline Matrix small_wigner(const SpinIrrep& rep, double beta) {
  return rep.jy_basis * detail::phase_diagonal(rep.weights, beta).asDiagonal() *
         rep.jy_basis.adjoint();
}

/// U(g) = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz).
inline Matrix wigner_matrix(const SpinIrrep& rep, const GroupElement& g) {
  const Vector left = detail::phase_diagonal(rep.weights, g.alpha);
  const Vector right = detail::phase_diagonal(rep.weights, g.gamma);
  return left.asDiagonal() * small_wigner(rep, g.beta) * right.asDiagonal();
}

/// U(g) applied to the highest-weight vector: the coherent vector at g.
inline Vector coherent_vector(const SpinIrrep& rep, const GroupElement& g) {
  Vector col = rep.jy_basis * (detail::phase_diagonal(rep.weights, g.beta).asDiagonal() *
                               rep.jy_basis.row(0).adjoint());
  const Complex gamma_phase = std::exp(-kI * (g.gamma * rep.j.value()));
  for (int i = 0; i < rep.dim; ++i) col(i) *= std::exp(-kI * (g.alpha * rep.weights(i))) * gamma_phase;
  return col;
}

/// alpha_g(T) = U(g) T U(g)^*.
inline Matrix adjoint_act(const SpinIrrep& rep, const GroupElement& g, const Matrix& T) {
  if (T.rows() != rep.dim || T.cols() != rep.dim) {
    throw std::invalid_argument("adjoint_act: expected a " + std::to_string(rep.dim) + "x" +
                                std::to_string(rep.dim) + " matrix");
  }
  const Matrix U = wigner_matrix(rep, g);
  return U * T * U.adjoint();
}

/// Applies U to every tensor factor of a vector in (C^2)^{\otimes n}.
/// Factor 0 is the most significant qubit of the flat index.
inline Vector apply_tensor_power(const Matrix2& U, const Vector& v, int n) {
  Vector out = v;
  const Eigen::Index size = Eigen::Index(1) << n;
  if (v.size() != size) throw std::invalid_argument("apply_tensor_power: size mismatch");
  for (int f = 0; f < n; ++f) {
    const Eigen::Index stride = Eigen::Index(1) << (n - 1 - f);
    for (Eigen::Index base = 0; base < size; ++base) {
      if (base & stride) continue;
      const Complex x0 = out(base), x1 = out(base + stride);
      out(base) = U(0, 0) * x0 + U(0, 1) * x1;
      out(base + stride) = U(1, 0) * x0 + U(1, 1) * x1;
    }
  }
  return out;
}

/// Sum of a single-site operator over all factors, applied to v.
inline Vector apply_collective(const Matrix2& A, const Vector& v, int n) {
  Vector out = Vector::Zero(v.size());
  const Eigen::Index size = v.size();
  for (int f = 0; f < n; ++f) {
    const Eigen::Index stride = Eigen::Index(1) << (n - 1 - f);
    for (Eigen::Index base = 0; base < size; ++base) {
      if (base & stride) continue;
      const Complex x0 = v(base), x1 = v(base + stride);
      out(base) += A(0, 0) * x0 + A(0, 1) * x1;
      out(base + stride) += A(1, 0) * x0 + A(1, 1) * x1;
    }
  }
  return out;
}

/// Sym^n(C^2) inside (C^2)^{\otimes n} together with the spin-n/2 irrep it carries.
struct SymmetricPower {
  int n = 1;
  Matrix isometry;  // 2^n x (n+1), column k = normalized Dicke state with k "down" factors
  SpinIrrep rep;

  /// The restriction isometry^* U^{\otimes n} isometry at g.
  Matrix restricted(const GroupElement& g) const {
    const Matrix2 u = g.su2();
    Matrix out(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) out.col(k) = isometry.adjoint() * apply_tensor_power(u, isometry.col(k), n);
    return out;
  }
};

inline SymmetricPower symmetric_power(int n) {
  if (n < 1) throw std::invalid_argument("symmetric_power: n must be >= 1");
  if (n > 24) throw std::invalid_argument("symmetric_power: n too large for the dense tensor space");
  SymmetricPower sp;
  sp.n = n;
  sp.rep = build_irrep(HalfInt(n));
  const Eigen::Index size = Eigen::Index(1) << n;
  sp.isometry = Matrix::Zero(size, n + 1);
  for (Eigen::Index idx = 0; idx < size; ++idx) {
    const int downs = __builtin_popcountll(static_cast<unsigned long long>(idx));
    sp.isometry(idx, downs) = 1.0;
  }
  for (int k = 0; k <= n; ++k) sp.isometry.col(k).normalize();
  return sp;
}

/// Superoperator of T -> [A, T] on column-major vec(T).
inline Matrix commutator_superop(const Matrix& A) {
  const Eigen::Index d = A.rows();
  const Matrix I = Matrix::Identity(d, d);
  Matrix S = Matrix::Zero(d * d, d * d);
  // vec(A T) = (I kron A) vec T ; vec(T A) = (A^T kron I) vec T
  for (Eigen::Index c = 0; c < d; ++c) {
    S.block(c * d, c * d, d, d) += A;
    for (Eigen::Index r = 0; r < d; ++r) {
      S.block(r * d, c * d, d, d) -= A(c, r) * I;
    }
  }
  return S;
}

/// Orthogonal projectors (superoperators on column-major vec) onto the spin-l
/// components of B(H^n), l = 0..n, where H^n carries spin n/2.
inline std::vector<Matrix> isotypic_projectors(int n) {
  if (n < 1) throw std::invalid_argument("isotypic_projectors: n must be >= 1");
  const SpinIrrep rep = build_irrep(HalfInt(n));
  Matrix casimir = Matrix::Zero(rep.dim * rep.dim, rep.dim * rep.dim);
  for (int a = 0; a < 3; ++a) {
    const Matrix ad = commutator_superop(rep.generator(a));
    casimir += ad * ad;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(casimir);
  std::vector<Matrix> projectors(n + 1, Matrix::Zero(casimir.rows(), casimir.cols()));
  for (Eigen::Index k = 0; k < casimir.rows(); ++k) {
    const double ev = eig.eigenvalues()(k);
    const int l = static_cast<int>(std::lround((-1.0 + std::sqrt(1.0 + 4.0 * std::max(ev, 0.0))) / 2.0));
    if (l < 0 || l > n || std::abs(ev - l * (l + 1.0)) > 1e-6 * (1.0 + ev)) {
      throw std::runtime_error("isotypic_projectors: Casimir eigenvalue off the l(l+1) ladder");
    }
    const auto v = eig.eigenvectors().col(k);
    projectors[l] += v * v.adjoint();
  }
  return projectors;
}

/// Matrix from a column-major vec.
inline Matrix unvec(const Vector& v, Eigen::Index d) { return Eigen::Map<const Matrix>(v.data(), d, d); }
inline Vector vec(const Matrix& T) { return Eigen::Map<const Vector>(T.data(), T.size()); }

}  // namespace fuzzy
