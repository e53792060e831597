#pragma once

// SU_q(2) in the truncated shift representation on C^D:
//   a e_k = sqrt(1 - q^{2k}) e_{k-1},  a e_0 = 0,   c e_k = q^k e_k.
// Basis vectors are 0-based, so the first basis vector e_1 of the usual
// 1-based notation is e_0 here. Truncation breaks aa^* + q^2 cc^* = 1 on the
// last basis vector e_{D-1}; every equality is checked on the interior span
// e_0..e_{D-2} and the boundary residual is reported separately.

#include "fuzzy/berezin.hpp"

#include <string>
#include <vector>

namespace fuzzy {

struct ShiftRep {
  double q = 0.0;
  int D = 0;
  Matrix a, c;

  Matrix identity() const { return Matrix::Identity(D, D); }
};

inline ShiftRep build_shift_rep(double q, int D) {
  if (D < 2) throw std::invalid_argument("build_shift_rep: D must be >= 2, got " + std::to_string(D));
  if (!(std::abs(q) < 1.0)) throw std::invalid_argument("build_shift_rep: |q| must be < 1");
  ShiftRep r{q, D, Matrix::Zero(D, D), Matrix::Zero(D, D)};
  for (int k = 0; k < D; ++k) {
    r.c(k, k) = std::pow(q, k);  // pow(0, 0) = 1: c = projection onto e_0 at q = 0
    if (k > 0) r.a(k - 1, k) = std::sqrt(1.0 - std::pow(q, 2 * k));
  }
  return r;
}

namespace detail {

// Largest entry of M on rows and columns 0..D-2.
inline double interior_max(const Matrix& M) {
  const Eigen::Index m = M.rows() - 1;
  return M.topLeftCorner(m, m).cwiseAbs().maxCoeff();
}

// Largest entry of M touching the last row or column.
inline double boundary_max(const Matrix& M) {
  return std::max(M.row(M.rows() - 1).cwiseAbs().maxCoeff(), M.col(M.cols() - 1).cwiseAbs().maxCoeff());
}

}  // namespace detail

struct RelationResiduals {
  double unitary_left = 0.0;   // a^*a + c^*c - 1
  double normal_c = 0.0;       // c^*c - cc^*
  double ac = 0.0;             // ac - q ca
  double ac_star = 0.0;        // ac^* - q c^*a
  double unitary_right = 0.0;  // aa^* + q^2 cc^* - 1, interior
  double boundary = 0.0;       // aa^* + q^2 cc^* - 1 on e_{D-1}

  double interior_max() const { return std::max({unitary_left, normal_c, ac, ac_star, unitary_right}); }
};

inline RelationResiduals relation_residuals(const ShiftRep& r) {
  const Matrix& a = r.a;
  const Matrix& c = r.c;
  const Matrix I = r.identity();
  RelationResiduals res;
  res.unitary_left = detail::interior_max(a.adjoint() * a + c.adjoint() * c - I);
  res.normal_c = detail::interior_max(c.adjoint() * c - c * c.adjoint());
  res.ac = detail::interior_max(a * c - r.q * c * a);
  res.ac_star = detail::interior_max(a * c.adjoint() - r.q * c.adjoint() * a);
  const Matrix right = a * a.adjoint() + r.q * r.q * c * c.adjoint() - I;
  res.unitary_right = detail::interior_max(right);
  res.boundary = detail::boundary_max(right);
  return res;
}

struct SigmaDLambda {
  Matrix computed;  // aa^* + conj(l)^2 q^2 c^*c + l^2 cc^* + a^*a
  Matrix formula;   // 2 + 2i sin(theta) (l - q^2 conj(l)) c^*c
  double interior_gap = 0.0;
  double boundary_gap = 0.0;
};

inline SigmaDLambda sigma_D_lambda(const ShiftRep& r, Complex lambda) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw std::invalid_argument("sigma_D_lambda: |lambda| must be 1");
  const Matrix& a = r.a;
  const Matrix& c = r.c;
  const Matrix cc = c.adjoint() * c;
  const Complex lb = std::conj(lambda);
  const double q2 = r.q * r.q;
  SigmaDLambda s;
  s.computed = a * a.adjoint() + (lb * lb * q2) * cc + (lambda * lambda) * (c * c.adjoint()) + a.adjoint() * a;
  const double theta = std::arg(lambda);
  s.formula = 2.0 * r.identity() + (2.0 * kI * std::sin(theta) * (lambda - q2 * lb)) * cc;
  const Matrix diff = s.computed - s.formula;
  s.interior_gap = detail::interior_max(diff);
  s.boundary_gap = detail::boundary_max(diff);
  return s;
}

struct VectorState {
  Vector xi;
  Complex x = 1.0;  // fiber parameter: c acts as x c

  VectorState(Vector v, Complex fiber = 1.0) : xi(std::move(v)), x(fiber) {
    if (std::abs(xi.norm() - 1.0) > 1e-12) throw std::invalid_argument("VectorState: xi must be a unit vector");
    if (std::abs(std::abs(x) - 1.0) > 1e-12) throw std::invalid_argument("VectorState: fiber parameter must have modulus 1");
  }
  static VectorState basis(int D, int k) {
    if (k < 0 || k >= D) {
      throw std::invalid_argument("VectorState::basis: index " + std::to_string(k) + " outside 0.." +
                                  std::to_string(D - 1) + " (e_0 is the first basis vector)");
    }
    return VectorState(Vector::Unit(D, k));
  }
};

struct StateStabilizer {
  double phi_cc = 0.0;           // <c^*c xi, xi>
  Complex phi_sigma;             // <sigma_{D_lambda} xi, xi> from the formula
  bool in_stabilizer = false;    // phi_cc < 1e-12
  bool sigma_criterion = false;  // |phi_sigma - 2| < 1e-12
  bool touches_boundary = false; // xi has weight on e_{D-1}
};

/// phi_cc = |<e_0, xi>|^2 at q = 0. The sigma criterion agrees with phi_cc
/// whenever sin(theta) (lambda - q^2 conj(lambda)) != 0.
inline StateStabilizer state_stabilizer_test(const ShiftRep& r, const VectorState& s, Complex lambda) {
  if (s.xi.size() != r.D) {
    throw std::invalid_argument("state_stabilizer_test: state has length " + std::to_string(s.xi.size()) +
                                ", expected " + std::to_string(r.D));
  }
  const Matrix cx = s.x * r.c;
  StateStabilizer out;
  out.phi_cc = s.xi.dot(cx.adjoint() * cx * s.xi).real();
  const SigmaDLambda sig = sigma_D_lambda(r, lambda);
  out.phi_sigma = s.xi.dot(sig.formula * s.xi);
  out.in_stabilizer = out.phi_cc < 1e-12;
  out.sigma_criterion = std::abs(out.phi_sigma - 2.0) < 1e-12;
  out.touches_boundary = std::abs(s.xi(r.D - 1)) > 0.0;
  return out;
}

/// Structural evidence for the quotient c = 0. The truncated model cannot
/// represent the circle quotient, so nothing here asserts it.
struct GroupStabilizerWitness {
  double q = 0.0;
  int D = 0;
  int rank_cc = 0;
  Eigen::VectorXd cc_diagonal;
  double left_residual_c_zero = 0.0;   // a^*a - 1 on the interior
  double right_residual_c_zero = 0.0;  // aa^* - 1 on the interior
};

inline GroupStabilizerWitness group_stabilizer_witness(const ShiftRep& r) {
  GroupStabilizerWitness w;
  w.q = r.q;
  w.D = r.D;
  const Matrix cc = r.c.adjoint() * r.c;
  w.cc_diagonal = cc.diagonal().real();
  w.rank_cc = numerical_rank(cc, 1e-14);
  const Matrix I = r.identity();
  w.left_residual_c_zero = detail::interior_max(r.a.adjoint() * r.a - I);
  w.right_residual_c_zero = detail::interior_max(r.a * r.a.adjoint() - I);
  return w;
}

}  // namespace fuzzy
