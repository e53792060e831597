#pragma once

// Invariant subalgebras for a cyclic subgroup of the maximal torus, the fuzzy
// orbifold S^2/Z_k, and state stabilizers p C[G] p for finite group algebras.
//
// Z_k (k odd) is the SU(2) subgroup generated by exp(-i (4pi/k) Jz), Euler
// angles (4pi j/k, 0, 0). It closes in SU(2) and acts on the sphere as the
// rotations by multiples of 2pi/k, since 2 is invertible mod k.

#include "fuzzy/berezin.hpp"

#include <array>
#include <cstdint>
#include <istream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fuzzy {

struct FiniteSubgroup {
  std::string label;
  std::vector<GroupElement> elements;
  std::vector<Matrix> images;  // Wigner matrices in the chosen irrep

  std::size_t order() const { return elements.size(); }

  /// Index of the element equal to u in SU(2), or -1.
  int find(const Matrix2& u, double tol = 1e-10) const {
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if ((elements[i].su2() - u).cwiseAbs().maxCoeff() < tol) return static_cast<int>(i);
    }
    return -1;
  }

  /// Products and inverses of listed elements are listed.
  bool is_closed() const {
    for (const auto& a : elements) {
      if (find(a.inverse().su2()) < 0) return false;
      for (const auto& b : elements) {
        if (find(a.su2() * b.su2()) < 0) return false;
      }
    }
    return true;
  }

  /// max |U(a) U(b) - U(ab)| over listed pairs.
  double representation_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < elements.size(); ++i) {
      for (std::size_t j = 0; j < elements.size(); ++j) {
        const int k = find(elements[i].su2() * elements[j].su2());
        if (k < 0) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, (images[i] * images[j] - images[static_cast<std::size_t>(k)]).cwiseAbs().maxCoeff());
      }
    }
    return worst;
  }
};

namespace detail {

inline void require_odd(int k, const char* who) {
  if (k < 1) throw std::invalid_argument(std::string(who) + ": k must be >= 1");
  if (k % 2 == 0) {
    throw std::invalid_argument(std::string(who) + ": k = " + std::to_string(k) +
                                " is even; only odd k is supported (the even case is not worked out)");
  }
}

}  // namespace detail

/// Z_k inside the torus, represented on spin rep.j.
inline FiniteSubgroup cyclic_subgroup(int k, const SpinIrrep& rep) {
  detail::require_odd(k, "cyclic_subgroup");
  FiniteSubgroup K;
  K.label = "Z_" + std::to_string(k);
  for (int j = 0; j < k; ++j) {
    K.elements.push_back(GroupElement{4 * kPi * j / k, 0.0, 0.0});
    K.images.push_back(wigner_matrix(rep, K.elements.back()));
  }
  return K;
}

/// E_K(T) = |K|^{-1} sum_k U(k) T U(k)^*.
inline Matrix invariant_project(const FiniteSubgroup& K, const Matrix& T) {
  if (K.images.empty()) throw std::invalid_argument("invariant_project: empty subgroup");
  if (T.rows() != K.images[0].rows() || T.cols() != K.images[0].cols()) {
    throw std::invalid_argument("invariant_project: shape mismatch");
  }
  Matrix acc = Matrix::Zero(T.rows(), T.cols());
  for (const auto& U : K.images) acc += U * T * U.adjoint();
  return acc / double(K.images.size());
}

/// Field average |K|^{-1} sum_k translate(f, k).
inline HarmonicField invariant_average(const FiniteSubgroup& K, const HarmonicField& f) {
  HarmonicField acc = HarmonicField::zero(f.max_degree);
  for (const auto& g : K.elements) acc = acc + translate(f, g);
  return (1.0 / double(K.order())) * acc;
}

/// The commutant of Z_k in B(H), H of dimension N (spin (N-1)/2).
struct CommutantBasis {
  int k = 1;
  int N = 1;
  std::vector<int> block_dims;  // r_w for w = (N-1-2i) mod k, w = 0..k-1
  std::vector<Matrix> basis;    // matrix units E_ij with i = j mod k; HS-orthonormal

  int dimension() const { return static_cast<int>(basis.size()); }
  int block_dimension_sum() const {
    int s = 0;
    for (int r : block_dims) s += r * r;
    return s;
  }
};

inline CommutantBasis zn_commutant(int k, int N) {
  detail::require_odd(k, "zn_commutant");
  if (N < 1) throw std::invalid_argument("zn_commutant: N must be >= 1");
  CommutantBasis C;
  C.k = k;
  C.N = N;
  C.block_dims.assign(static_cast<std::size_t>(k), 0);
  // 2m = N-1-2i; for odd k the class of 2m mod k determines the class of i.
  for (int i = 0; i < N; ++i) ++C.block_dims[static_cast<std::size_t>(((N - 1 - 2 * i) % k + k) % k)];
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      if ((i - j) % k != 0) continue;
      Matrix E = Matrix::Zero(N, N);
      E(i, j) = 1.0;
      C.basis.push_back(std::move(E));
    }
  }
  return C;
}

/// Rank of E_K as a linear map on B(H).
inline int invariant_projection_rank(const FiniteSubgroup& K) {
  const auto d = K.images[0].rows();
  Matrix M(d * d, d * d);
  for (Eigen::Index c = 0; c < d * d; ++c) {
    Matrix E = Matrix::Zero(d, d);
    E(c % d, c / d) = 1.0;
    M.col(c) = vec(invariant_project(K, E));
  }
  return numerical_rank(M, 1e-10);
}

struct InvariantHarmonics {
  int k = 1;
  std::vector<int> formula;          // 2 floor(l/k) + 1
  std::vector<int> projector_rank;   // rank of |K|^{-1} sum_j D^l(k_j)
  bool consistent() const { return formula == projector_rank; }
};

inline InvariantHarmonics invariant_harmonics(int k, int L) {
  detail::require_odd(k, "invariant_harmonics");
  if (L < 0) throw std::invalid_argument("invariant_harmonics: L must be >= 0");
  InvariantHarmonics out;
  out.k = k;
  for (int l = 0; l <= L; ++l) {
    out.formula.push_back(2 * (l / k) + 1);
    const FiniteSubgroup K = cyclic_subgroup(k, cached_irrep(2 * l));
    Matrix P = Matrix::Zero(2 * l + 1, 2 * l + 1);
    for (const auto& U : K.images) P += U;
    P /= double(k);
    // P is an orthogonal projector; its trace is its rank.
    out.projector_rank.push_back(static_cast<int>(std::lround(P.trace().real())));
  }
  return out;
}

/// Largest |c_lm| with k not dividing m.
inline double noninvariant_mass(const HarmonicField& f, int k) {
  double worst = 0.0;
  for (int l = 0; l <= f.max_degree; ++l)
    for (int m = -l; m <= l; ++m)
      if (m % k != 0) worst = std::max(worst, std::abs(f(l, m)));
  return worst;
}

struct OrbifoldReport {
  int k = 1;
  int n = 0;
  int commutant_dim = 0;
  int commutant_block_sum = 0;
  int projection_rank = 0;
  double symbol_leak = 0.0;            // non-invariant mass of sigma on the commutant basis
  double adjoint_leak = 0.0;           // |[sigma-breve(f), U(k)]| on invariant harmonics
  double intertwining_defect = 0.0;    // both intertwining identities on random inputs
  double spectrum_defect = 0.0;        // transform on invariant Y_lm against beta_{n,l}
  bool ok(double tol = 1e-9) const {
    return commutant_dim == commutant_block_sum && projection_rank == commutant_dim && symbol_leak <= tol &&
           adjoint_leak <= tol && intertwining_defect <= tol && spectrum_defect <= tol;
  }
};

inline OrbifoldReport orbifold_quantization_check(int k, int n, std::uint64_t seed = 1, int samples = 5) {
  detail::require_odd(k, "orbifold_quantization_check");
  if (k > n) throw std::invalid_argument("orbifold_quantization_check: need k <= n");
  const CoherentFamily fam = coherent_family(n);
  const FiniteSubgroup K = cyclic_subgroup(k, fam.rep);
  const CommutantBasis C = zn_commutant(k, n + 1);
  OrbifoldReport rep;
  rep.k = k;
  rep.n = n;
  rep.commutant_dim = C.dimension();
  rep.commutant_block_sum = C.block_dimension_sum();
  rep.projection_rank = invariant_projection_rank(K);

  for (const auto& E : C.basis) rep.symbol_leak = std::max(rep.symbol_leak, noninvariant_mass(symbol(fam, E), k));

  const TransformSpectrum spec = spectrum(fam, n);
  for (int l = 0; l <= n; ++l) {
    for (int m = -l; m <= l; ++m) {
      if (m % k != 0) continue;
      const HarmonicField Y = HarmonicField::single(l, m);
      const Matrix B = adjoint_symbol(fam, Y);
      for (const auto& U : K.images) rep.adjoint_leak = std::max(rep.adjoint_leak, (U * B - B * U).cwiseAbs().maxCoeff());
      const HarmonicField t = transform_via_maps(fam, Y).resized(n);
      const HarmonicField expect = spec.beta[l] * HarmonicField::single(l, m, n);
      rep.spectrum_defect = std::max(rep.spectrum_defect, (t.coeffs - expect.coeffs).cwiseAbs().maxCoeff());
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = n + 1;
  for (int s = 0; s < samples; ++s) {
    Matrix T(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) T(i, j) = Complex(normal(rng), normal(rng));
    const HarmonicField lhs = symbol(fam, invariant_project(K, T));
    const HarmonicField rhs = invariant_average(K, symbol(fam, T));
    rep.intertwining_defect = std::max(rep.intertwining_defect, (lhs.coeffs - rhs.coeffs).cwiseAbs().maxCoeff());
    const HarmonicField f = random_real_field(n, rng);
    const Matrix a = adjoint_symbol(fam, invariant_average(K, f));
    const Matrix b = invariant_project(K, adjoint_symbol(fam, f));
    rep.intertwining_defect = std::max(rep.intertwining_defect, (a - b).cwiseAbs().maxCoeff());
  }
  return rep;
}

/// A finite group as a multiplication table: row a, column b holds a*b.
struct GroupTable {
  std::vector<std::vector<int>> mul;

  int order() const { return static_cast<int>(mul.size()); }
  int identity() const {
    for (int e = 0; e < order(); ++e) {
      bool ok = true;
      for (int g = 0; g < order() && ok; ++g) ok = mul[e][g] == g && mul[g][e] == g;
      if (ok) return e;
    }
    return -1;
  }
};

/// Checks shape, Latin-square rows and columns, identity and associativity.
inline void validate(const GroupTable& G) {
  const int n = G.order();
  if (n < 1) throw std::invalid_argument("group table: empty");
  for (const auto& row : G.mul) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("group table: row length differs from order");
    std::set<int> seen(row.begin(), row.end());
    if (static_cast<int>(seen.size()) != n || *seen.begin() < 0 || *seen.rbegin() >= n) {
      throw std::invalid_argument("group table: each row must be a permutation of 0..n-1");
    }
  }
  if (G.identity() < 0) throw std::invalid_argument("group table: no identity element");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (G.mul[G.mul[a][b]][c] != G.mul[a][G.mul[b][c]]) throw std::invalid_argument("group table: not associative");
}

/// Text format: first line |G|, then |G| rows of |G| 0-based indices.
inline GroupTable parse_group_table(std::istream& in) {
  int n = 0;
  if (!(in >> n) || n < 1) throw std::invalid_argument("group table: missing or invalid order on the first line");
  GroupTable G;
  G.mul.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (!(in >> G.mul[a][b])) throw std::invalid_argument("group table: expected " + std::to_string(n * n) + " entries");
  validate(G);
  return G;
}

inline GroupTable parse_group_table(const std::string& text) {
  std::istringstream in(text);
  return parse_group_table(in);
}

inline GroupTable cyclic_group_table(int k) {
  GroupTable G;
  G.mul.assign(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k)));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) G.mul[a][b] = (a + b) % k;
  return G;
}

/// S_3 with elements listed as permutations of {0,1,2} in lexicographic order;
/// index 0 is the identity and index 1 is the transposition (1 2).
inline GroupTable symmetric_group_3_table() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  auto index = [&](const std::array<int, 3>& q) {
    return static_cast<int>(std::find(perms.begin(), perms.end(), q) - perms.begin());
  };
  GroupTable G;
  G.mul.assign(6, std::vector<int>(6));
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];  // a after b
      G.mul[a][b] = index(c);
    }
  return G;
}

struct StabilizerResult {
  std::vector<int> subgroup;   // closure of omega, sorted
  Eigen::MatrixXd p;           // |Omega|^{-1} sum lambda(g) in the regular representation
  int compressed_dim = 0;      // dim span{p lambda(g) p}
  double idempotent_defect = 0.0;
  double selfadjoint_defect = 0.0;
};

/// Left-regular permutation matrix: lambda(g) e_h = e_{gh}.
inline Eigen::MatrixXd regular_matrix(const GroupTable& G, int g) {
  const int n = G.order();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int h = 0; h < n; ++h) M(G.mul[g][h], h) = 1.0;
  return M;
}

inline StabilizerResult group_algebra_stabilizer(const GroupTable& G, const std::vector<int>& omega) {
  validate(G);
  const int n = G.order();
  std::set<int> closure{G.identity()};
  for (int g : omega) {
    if (g < 0 || g >= n) throw std::invalid_argument("group_algebra_stabilizer: omega index out of range");
    closure.insert(g);
  }
  for (bool grew = true; grew;) {
    grew = false;
    const std::vector<int> cur(closure.begin(), closure.end());
    for (int a : cur)
      for (int b : cur) grew |= closure.insert(G.mul[a][b]).second;
  }
  StabilizerResult res;
  res.subgroup.assign(closure.begin(), closure.end());
  res.p = Eigen::MatrixXd::Zero(n, n);
  for (int g : res.subgroup) res.p += regular_matrix(G, g);
  res.p /= double(res.subgroup.size());
  res.idempotent_defect = (res.p * res.p - res.p).cwiseAbs().maxCoeff();
  res.selfadjoint_defect = (res.p - res.p.transpose()).cwiseAbs().maxCoeff();
  Matrix span(n * n, n);
  for (int g = 0; g < n; ++g) {
    const Eigen::MatrixXd c = res.p * regular_matrix(G, g) * res.p;
    span.col(g) = vec(c.cast<Complex>());
  }
  res.compressed_dim = numerical_rank(span, 1e-10);
  return res;
}

}  // namespace fuzzy
