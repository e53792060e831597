#pragma once

// Theta-deformation in graded form. An algebra carrying a torus action by
// conjugation splits into weight components x_w; the deformed product of
// homogeneous pieces is x_m y_k with the phase e(hbar theta m . (m + k)),
// where e(t) = exp(2 pi i t).
//
// Torus generators are passed as integer diagonal matrices H_a, the
// infinitesimal generators of D_t = exp(2 pi i sum_a t_a H_a). The weight of
// the matrix unit E_ij is then (H_a(i) - H_a(j))_a.

#include "fuzzy/berezin.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace fuzzy {

using Weight = std::vector<int>;

class SkewForm {
 public:
  SkewForm() = default;
  explicit SkewForm(Eigen::MatrixXd theta) : theta_(std::move(theta)) {
    if (theta_.rows() != theta_.cols()) throw std::invalid_argument("SkewForm: matrix must be square");
    if ((theta_ + theta_.transpose()).cwiseAbs().maxCoeff() > 1e-14) {
      throw std::invalid_argument("SkewForm: matrix is not skew-symmetric");
    }
  }
  /// The d = 2 form with theta(0, 1) = t.
  static SkewForm planar(double t) {
    Eigen::MatrixXd m(2, 2);
    m << 0.0, t, -t, 0.0;
    return SkewForm(m);
  }
  static SkewForm zero(int d) { return SkewForm(Eigen::MatrixXd::Zero(d, d)); }

  int d() const { return static_cast<int>(theta_.rows()); }
  const Eigen::MatrixXd& matrix() const { return theta_; }

  /// (theta m) . n
  double pair(const Weight& m, const Weight& n) const {
    double s = 0.0;
    for (int i = 0; i < d(); ++i)
      for (int j = 0; j < d(); ++j) s += theta_(i, j) * m[j] * n[i];
    return s;
  }

 private:
  Eigen::MatrixXd theta_;
};

template <class Rng>
SkewForm random_skew_form(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      m(i, j) = normal(rng);
      m(j, i) = -m(i, j);
    }
  return SkewForm(m);
}

struct GradedElement {
  int d = 0;
  Eigen::Index rows = 0, cols = 0;
  std::map<Weight, Matrix> components;

  static GradedElement homogeneous(const Weight& w, const Matrix& x) {
    GradedElement g{static_cast<int>(w.size()), x.rows(), x.cols(), {}};
    g.components.emplace(w, x);
    return g;
  }

  void add(const Weight& w, const Matrix& x) {
    if (static_cast<int>(w.size()) != d || x.rows() != rows || x.cols() != cols) {
      throw std::invalid_argument("GradedElement::add: weight length or shape mismatch");
    }
    auto [it, fresh] = components.try_emplace(w, x);
    if (!fresh) it->second += x;
  }

  Matrix reassemble() const {
    Matrix out = Matrix::Zero(rows, cols);
    for (const auto& [w, x] : components) out += x;
    return out;
  }

  /// Weights whose component has an entry above tol.
  std::vector<Weight> support(double tol = 0.0) const {
    std::vector<Weight> out;
    for (const auto& [w, x] : components)
      if (x.size() > 0 && x.cwiseAbs().maxCoeff() > tol) out.push_back(w);
    return out;
  }

  Matrix component(const Weight& w) const {
    auto it = components.find(w);
    return it == components.end() ? Matrix::Zero(rows, cols) : it->second;
  }
};

namespace detail {

inline Weight negate(Weight w) {
  for (int& x : w) x = -x;
  return w;
}

inline Weight add(const Weight& a, const Weight& b) {
  Weight out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline void check_compatible(const GradedElement& x, const GradedElement& y, const char* who) {
  if (x.d != y.d) {
    throw std::invalid_argument(std::string(who) + ": torus ranks differ (" + std::to_string(x.d) + " vs " +
                                std::to_string(y.d) + ")");
  }
  if (x.cols != y.rows) throw std::invalid_argument(std::string(who) + ": shapes do not multiply");
}

inline void check_form(const GradedElement& x, const SkewForm& theta, const char* who) {
  if (theta.d() != x.d) {
    throw std::invalid_argument(std::string(who) + ": skew form has size " + std::to_string(theta.d()) +
                                " but the grading has rank " + std::to_string(x.d));
  }
}

inline Complex e(double t) { return std::exp(Complex(0.0, 2 * kPi * t)); }

inline Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

}  // namespace detail

/// Integer weights of the torus generated by the diagonal matrices H_a.
/// Throws when the generators do not commute or are not diagonal with
/// integer entries.
inline std::vector<Weight> torus_weights(const std::vector<Matrix>& generators) {
  if (generators.empty()) throw std::invalid_argument("torus_weights: need at least one generator");
  const Eigen::Index N = generators.front().rows();
  for (const auto& H : generators) {
    if (H.rows() != N || H.cols() != N) throw std::invalid_argument("torus_weights: generators must be NxN");
  }
  for (std::size_t a = 0; a < generators.size(); ++a)
    for (std::size_t b = a + 1; b < generators.size(); ++b) {
      const Matrix c = generators[a] * generators[b] - generators[b] * generators[a];
      if (c.cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("torus_weights: generators do not commute");
    }
  const int d = static_cast<int>(generators.size());
  std::vector<Weight> h(static_cast<std::size_t>(N), Weight(d));
  for (int a = 0; a < d; ++a) {
    const Matrix& H = generators[a];
    Matrix off = H;
    off.diagonal().setZero();
    if (N > 0 && off.cwiseAbs().maxCoeff() > 1e-12) {
      throw std::invalid_argument("torus_weights: generators must be diagonal in the working basis");
    }
    for (Eigen::Index i = 0; i < N; ++i) {
      const Complex v = H(i, i);
      const double r = std::round(v.real());
      if (std::abs(v - r) > 1e-9) {
        throw std::invalid_argument("torus_weights: diagonal entries must be integers");
      }
      h[static_cast<std::size_t>(i)][a] = static_cast<int>(r);
    }
  }
  return h;
}

/// Splits T into conjugation-weight components; E_ij lands at h(i) - h(j).
inline GradedElement grade_by_torus(const std::vector<Matrix>& generators, const Matrix& T) {
  const std::vector<Weight> h = torus_weights(generators);
  const Eigen::Index N = static_cast<Eigen::Index>(h.size());
  if (T.rows() != N || T.cols() != N) {
    throw std::invalid_argument("grade_by_torus: T must be " + std::to_string(N) + "x" + std::to_string(N));
  }
  GradedElement out{static_cast<int>(generators.size()), N, N, {}};
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) {
      if (T(i, j) == Complex(0.0)) continue;
      const Weight w = detail::add(h[static_cast<std::size_t>(i)], detail::negate(h[static_cast<std::size_t>(j)]));
      auto [it, fresh] = out.components.try_emplace(w, Matrix::Zero(N, N));
      it->second(i, j) = T(i, j);
    }
  return out;
}

/// max over w of ||D_t x_w D_t^* - e(t.w) x_w||, D_t = exp(2 pi i sum t_a H_a).
inline double torus_consistency_defect(const std::vector<Matrix>& generators, const GradedElement& x,
                                       const std::vector<double>& t) {
  const std::vector<Weight> h = torus_weights(generators);
  if (static_cast<int>(t.size()) != x.d) throw std::invalid_argument("torus_consistency_defect: t has wrong length");
  Vector D(static_cast<Eigen::Index>(h.size()));
  for (std::size_t i = 0; i < h.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < x.d; ++a) s += t[a] * h[i][a];
    D(static_cast<Eigen::Index>(i)) = detail::e(s);
  }
  double worst = 0.0;
  for (const auto& [w, c] : x.components) {
    double s = 0.0;
    for (int a = 0; a < x.d; ++a) s += t[a] * w[a];
    const Matrix lhs = D.asDiagonal() * c * D.conjugate().asDiagonal();
    if (c.size() > 0) worst = std::max(worst, (lhs - detail::e(s) * c).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// (x y)_n = sum_m x_m y_{n-m} e(hbar (theta m) . n).
inline GradedElement twisted_product(const GradedElement& x, const GradedElement& y, const SkewForm& theta,
                                     double hbar) {
  detail::check_compatible(x, y, "twisted_product");
  detail::check_form(x, theta, "twisted_product");
  GradedElement out{x.d, x.rows, y.cols, {}};
  for (const auto& [m, xm] : x.components)
    for (const auto& [k, yk] : y.components) {
      const Weight n = detail::add(m, k);
      const Complex phase = detail::e(hbar * theta.pair(m, n));
      out.add(n, phase * (xm * yk));
    }
  return out;
}

/// tr of reassemble(x times y), summed over every output weight without
/// forming the products.
inline Complex twisted_trace(const GradedElement& x, const GradedElement& y, const SkewForm& theta, double hbar) {
  detail::check_compatible(x, y, "twisted_trace");
  detail::check_form(x, theta, "twisted_trace");
  if (x.rows != y.cols) throw std::invalid_argument("twisted_trace: product is not square");
  Complex s = 0.0;
  for (const auto& [m, xm] : x.components)
    for (const auto& [k, yk] : y.components) {
      const Complex t = xm.cwiseProduct(yk.transpose()).sum();
      if (t != Complex(0.0)) s += detail::e(hbar * theta.pair(m, detail::add(m, k))) * t;
    }
  return s;
}

inline GradedElement star(const GradedElement& x) {
  GradedElement out{x.d, x.cols, x.rows, {}};
  for (const auto& [w, c] : x.components) out.components.emplace(detail::negate(w), c.adjoint());
  return out;
}

/// Largest entry of the difference, weight by weight.
inline double graded_distance(const GradedElement& a, const GradedElement& b) {
  if (a.d != b.d || a.rows != b.rows || a.cols != b.cols) {
    throw std::invalid_argument("graded_distance: elements are not comparable");
  }
  double worst = 0.0;
  auto scan = [&](const GradedElement& p, const GradedElement& q) {
    for (const auto& [w, c] : p.components) {
      if (c.size() == 0) continue;
      worst = std::max(worst, (c - q.component(w)).cwiseAbs().maxCoeff());
    }
  };
  scan(a, b);
  scan(b, a);
  return worst;
}

/// ||(x y)^* - y^* x^*|| in the deformed product.
inline double star_compatibility_defect(const GradedElement& x, const GradedElement& y, const SkewForm& theta,
                                        double hbar) {
  return graded_distance(star(twisted_product(x, y, theta, hbar)),
                         twisted_product(star(y), star(x), theta, hbar));
}

struct TraceCheck {
  Complex lhs;  // tr of the deformed product
  Complex rhs;  // tr of the ordinary product
  /// Largest entry of (x y)_0 - (x . y)_0: the torus average of the deformed
  /// and the ordinary product.
  double haar_defect = 0.0;
  double gap() const { return std::abs(lhs - rhs); }
};

inline TraceCheck trace_invariance_check(const GradedElement& x, const GradedElement& y, const SkewForm& theta,
                                         double hbar) {
  if (x.rows != x.cols || y.rows != y.cols) throw std::invalid_argument("trace_invariance_check: square matrices only");
  const GradedElement deformed = twisted_product(x, y, theta, hbar);
  TraceCheck c;
  c.lhs = deformed.reassemble().trace();
  c.rhs = (x.reassemble() * y.reassemble()).trace();
  const GradedElement plain = twisted_product(x, y, SkewForm::zero(x.d), 0.0);
  const Weight origin(static_cast<std::size_t>(x.d), 0);
  const Matrix diff = deformed.component(origin) - plain.component(origin);
  c.haar_defect = diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0;
  return c;
}

struct GaussMetric {
  Eigen::MatrixXd g;

  explicit GaussMetric(Eigen::MatrixXd metric) : g(std::move(metric)) {
    if (g.rows() != g.cols() || g.rows() == 0) throw std::invalid_argument("GaussMetric: g must be square");
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-14) throw std::invalid_argument("GaussMetric: g must be symmetric");
    if (Eigen::LLT<Eigen::MatrixXd>(g).info() != Eigen::Success) {
      throw std::invalid_argument("GaussMetric: g must be positive definite");
    }
  }
  int d() const { return static_cast<int>(g.rows()); }
};

/// Factors F(w) = integral of G(u) e(u.w) du for the normalized kernel
/// G(u) proportional to exp(-g(u,u)/hbar). In the eigenbasis of g the integral
/// splits into 1-D cosine integrals, each done by adaptive Gauss-Kronrod and
/// divided by the matching numerically integrated Gaussian mass.
class GaussianSmoother {
 public:
  GaussianSmoother(GaussMetric metric, double hbar) : metric_(std::move(metric)), hbar_(hbar) {
    if (!(hbar > 0.0)) throw std::invalid_argument("GaussianSmoother: hbar must be > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(metric_.g);
    lambda_ = eig.eigenvalues();
    basis_ = eig.eigenvectors();
  }

  double hbar() const { return hbar_; }

  double factor(const Weight& w) {
    if (static_cast<int>(w.size()) != metric_.d()) throw std::invalid_argument("GaussianSmoother: weight length mismatch");
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    Eigen::VectorXd wv(metric_.d());
    for (int i = 0; i < metric_.d(); ++i) wv(i) = w[i];
    const Eigen::VectorXd s = basis_.transpose() * wv;
    double f = 1.0;
    for (int i = 0; i < metric_.d(); ++i) f *= one_dimensional(lambda_(i), s(i));
    cache_.emplace(w, f);
    return f;
  }

  GradedElement apply(const GradedElement& x) {
    GradedElement out = x;
    for (auto& [w, c] : out.components) c *= factor(w);
    return out;
  }

 private:
  // Ratio of integral exp(-lambda s^2 / hbar) cos(2 pi omega s) to the
  // integral without the cosine, both over s >= 0 after s = sqrt(hbar/lambda) t.
  double one_dimensional(double lambda, double omega) const {
    if (omega == 0.0) return 1.0;
    using boost::math::quadrature::gauss_kronrod;
    const double a = 2 * kPi * omega * std::sqrt(hbar_ / lambda);
    constexpr double cut = 9.0;  // exp(-81) is below double resolution of the mass
    const double mass = gauss_kronrod<double, 61>::integrate([](double t) { return std::exp(-t * t); }, 0.0, cut, 12, 1e-14);
    const double wave =
        gauss_kronrod<double, 61>::integrate([a](double t) { return std::exp(-t * t) * std::cos(a * t); }, 0.0, cut, 15, 1e-14);
    return wave / mass;
  }

  GaussMetric metric_;
  double hbar_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd basis_;
  std::map<Weight, double> cache_;
  std::mutex mutex_;
};

inline GradedElement gaussian_smooth(const GradedElement& x, const GaussMetric& g, double hbar) {
  if (g.d() != x.d) throw std::invalid_argument("gaussian_smooth: metric size differs from the grading rank");
  GaussianSmoother s(g, hbar);
  return s.apply(x);
}

struct DeformInvarianceReport {
  int n = 0;
  double hbar = 0.0;
  Eigen::MatrixXd theta;
  /// Column p = a * H + b holds the transform coefficients of Y_a (x) Y_b,
  /// rows use the same product index; H = (n + 1)^2.
  Matrix undeformed;
  Matrix deformed;
  double max_gap = 0.0;
  /// Largest entry of reassemble(T times P) - T P over the probed pairs; zero
  /// when the deformation is trivial.
  double product_deviation = 0.0;

  bool ok(double tol = 1e-10) const { return max_gap <= tol; }
};

/// Berezin transform on the product orbit S^2 x S^2 for B(H^n) (x) B(H^n),
/// graded by the torus generated by 2Jz (x) 1 and 1 (x) 2Jz. The deformed route
/// evaluates every symbol tr(T alpha_{x,y}(P)) through the twisted product.
inline DeformInvarianceReport berezin_deform_invariance(int n, const SkewForm& theta, double hbar) {
  if (n < 0) throw std::invalid_argument("berezin_deform_invariance: n must be >= 0");
  if (theta.d() != 2) throw std::invalid_argument("berezin_deform_invariance: skew form must be 2x2");
  const CoherentFamily fam = coherent_family(n);
  const int d = fam.dim();
  const int H = harmonic_count(n);
  const Matrix one = Matrix::Identity(d, d);
  const std::vector<Matrix> gens{detail::kron(2.0 * fam.rep.Jz, one), detail::kron(one, 2.0 * fam.rep.Jz)};

  std::vector<Matrix> single(static_cast<std::size_t>(H));
  for (int a = 0; a < H; ++a) {
    HarmonicField f = HarmonicField::zero(n);
    f.coeffs(a) = 1.0;
    single[static_cast<std::size_t>(a)] = adjoint_symbol(fam, f);
  }

  const SphereGrid grid = sphere_grid(2 * n);
  const Eigen::Index K = static_cast<Eigen::Index>(grid.size());
  const Matrix V = coherent_table(fam, grid);
  Matrix A(H, K);  // analysis: 4 pi w_k conj Y_a(x_k)
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    A.col(k) = (4 * kPi * grid.weight(ku)) * ylm_all(n, grid.theta(ku), grid.phi(ku)).conjugate();
  }
  std::vector<GradedElement> graded_points;
  graded_points.reserve(static_cast<std::size_t>(K * K));
  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(K * K));
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index j = 0; j < K; ++j) {
      Vector v(d * d);
      for (int r = 0; r < d; ++r) v.segment(r * d, d) = V(r, i) * V.col(j);
      points.push_back(v);
      graded_points.push_back(grade_by_torus(gens, v * v.adjoint()));
    }

  DeformInvarianceReport rep;
  rep.n = n;
  rep.hbar = hbar;
  rep.theta = theta.matrix();
  rep.undeformed = Matrix(H * H, H * H);
  rep.deformed = Matrix(H * H, H * H);
  Matrix F0(K, K), F1(K, K);
  for (int a = 0; a < H; ++a)
    for (int b = 0; b < H; ++b) {
      const Matrix T = detail::kron(single[static_cast<std::size_t>(a)], single[static_cast<std::size_t>(b)]);
      const GradedElement gT = grade_by_torus(gens, T);
      for (Eigen::Index i = 0; i < K; ++i)
        for (Eigen::Index j = 0; j < K; ++j) {
          const std::size_t p = static_cast<std::size_t>(i * K + j);
          F0(i, j) = points[p].dot(T * points[p]);
          F1(i, j) = twisted_trace(gT, graded_points[p], theta, hbar);
        }
      const Matrix C0 = A * F0 * A.transpose(), C1 = A * F1 * A.transpose();
      const int col = a * H + b;
      for (int r = 0; r < H; ++r)
        for (int s = 0; s < H; ++s) {
          rep.undeformed(r * H + s, col) = C0(r, s);
          rep.deformed(r * H + s, col) = C1(r, s);
        }
      if (a == b && a < 4) {
        const GradedElement& gP = graded_points[static_cast<std::size_t>(std::min(K + 1, K * K - 1))];
        const Matrix diff = twisted_product(gT, gP, theta, hbar).reassemble() - T * gP.reassemble();
        rep.product_deviation = std::max(rep.product_deviation, diff.cwiseAbs().maxCoeff());
      }
    }
  rep.max_gap = (rep.undeformed - rep.deformed).cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace fuzzy
