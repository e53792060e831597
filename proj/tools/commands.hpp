#pragma once

// Report suites behind the fuzzyq front-end. Every command fills a Report
// ({meta, rows[], assertions[]}) and the writer turns it into JSON or CSV.
// Output contains no clocks or addresses, so equal configs give equal bytes.

#include "fuzzy/orbifold.hpp"
#include "fuzzy/qmetric.hpp"
#include "fuzzy/suq2.hpp"
#include "fuzzy/theta_deform.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fuzzyq {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.3.0";

struct RunConfig {
  std::string subcommand;
  int n = 4;
  std::string n_sweep;  // "a:b:step" or "a:b:*factor"; empty means use n
  int degree = -1;
  std::uint64_t seed = 1;
  int samples = 32;
  double tol = 1e-9;
  double gamma = 0.2;
  std::string theta = "0,1,-1,0";  // row-major skew entries
  double hbar = 1.0 / 3;
  double q = 0.0;
  int trunc = 16;
  int k = 3;
  std::string table;  // group table file, or "s3"; empty uses Z_k with k = --k
  std::string omega;  // comma-separated generator indices
  std::string out;
  std::string format = "json";

  json echo() const {
    return json{{"subcommand", subcommand}, {"n", n},         {"n_sweep", n_sweep}, {"degree", degree},
                {"seed", seed},             {"samples", samples}, {"tol", tol},     {"gamma", gamma},
                {"theta", theta},           {"hbar", hbar},   {"q", q},             {"trunc", trunc},
                {"k", k},                   {"table", table}, {"omega", omega},     {"format", format}};
  }
};

struct Report {
  json meta;
  json rows = json::array();
  json assertions = json::array();

  void check(const std::string& name, bool passed, double value, double tol) {
    assertions.push_back(json{{"name", name}, {"passed", passed}, {"value", value}, {"tol", tol}});
  }
  bool ok() const {
    for (const auto& a : assertions)
      if (!a["passed"].get<bool>()) return false;
    return true;
  }
  json to_json() const { return json{{"meta", meta}, {"rows", rows}, {"assertions", assertions}}; }
};

/// Expands "a:b:step" (additive) or "a:b:*f" (geometric). Throws on an empty
/// or malformed sweep.
inline std::vector<int> parse_sweep(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw std::invalid_argument("--n-sweep: expected a:b:step or a:b:*factor, got '" + text + "'");
  int a = 0, b = 0, step = 0;
  bool geometric = false;
  try {
    a = std::stoi(parts[0]);
    b = std::stoi(parts[1]);
    geometric = !parts[2].empty() && parts[2][0] == '*';
    step = std::stoi(geometric ? parts[2].substr(1) : parts[2]);
  } catch (const std::exception&) {
    throw std::invalid_argument("--n-sweep: non-integer field in '" + text + "'");
  }
  if (geometric ? step < 2 : step < 1) throw std::invalid_argument("--n-sweep: step must move forward");
  if (geometric && a < 1) throw std::invalid_argument("--n-sweep: geometric sweep needs a >= 1");
  if (a < 0) throw std::invalid_argument("--n-sweep: values must be >= 0");
  std::vector<int> out;
  for (int n = a; n <= b; n = geometric ? n * step : n + step) out.push_back(n);
  if (out.empty()) throw std::invalid_argument("--n-sweep: '" + text + "' is empty");
  return out;
}

inline std::vector<int> sweep_or_single(const RunConfig& c) {
  return c.n_sweep.empty() ? std::vector<int>{c.n} : parse_sweep(c.n_sweep);
}

inline std::vector<double> parse_doubles(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(p, &used));
      if (used != p.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(flag) + ": cannot parse '" + p + "'");
    }
  }
  return out;
}

inline std::vector<int> parse_ints(const std::string& text, const char* flag) {
  std::vector<int> out;
  for (double v : parse_doubles(text, flag)) {
    if (v != std::floor(v)) throw std::invalid_argument(std::string(flag) + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

inline fuzzy::SkewForm parse_theta(const std::string& text) {
  const std::vector<double> v = parse_doubles(text, "--theta");
  const int d = static_cast<int>(std::lround(std::sqrt(double(v.size()))));
  if (d * d != static_cast<int>(v.size()) || d == 0) {
    throw std::invalid_argument("--theta: expected d*d row-major entries, got " + std::to_string(v.size()));
  }
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = v[static_cast<std::size_t>(i * d + j)];
  return fuzzy::SkewForm(m);
}

inline Report cmd_spectrum(const RunConfig& c) {
  Report r;
  const std::vector<int> ns = sweep_or_single(c);
  const int Lcap = c.degree >= 0 ? c.degree : *std::max_element(ns.begin(), ns.end()) + 1;
  bool range_ok = true, zero_ok = true;
  double beta0_gap = 0.0;
  for (int n : ns) {
    const fuzzy::TransformSpectrum s = fuzzy::spectrum(n, Lcap);
    for (int l = 0; l <= Lcap; ++l) {
      const double b = s.beta[static_cast<std::size_t>(l)];
      r.rows.push_back(json{{"n", n}, {"l", l}, {"beta", b}, {"one_minus_beta", 1.0 - b}});
      if (l == 0) beta0_gap = std::max(beta0_gap, std::abs(b - 1.0));
      if (l <= n && !(b > 0.0 && b <= 1.0 + c.tol)) range_ok = false;
      if (l > n && std::abs(b) > c.tol) zero_ok = false;
    }
    if (n == 1 && Lcap >= 1) r.check("beta_1_1_is_one_third", std::abs(s.beta[1] - 1.0 / 3) <= c.tol, s.beta[1], c.tol);
  }
  r.check("beta_0_is_one", beta0_gap <= c.tol, beta0_gap, c.tol);
  r.check("beta_in_unit_interval_for_l_le_n", range_ok, range_ok ? 1.0 : 0.0, c.tol);
  r.check("beta_zero_for_l_gt_n", zero_ok, zero_ok ? 1.0 : 0.0, c.tol);
  return r;
}

inline Report cmd_gh(const RunConfig& c) {
  Report r;
  const std::vector<int> ns = sweep_or_single(c);
  fuzzy::SearchOptions opt;
  opt.seed = c.seed;
  opt.samples = c.samples;
  opt.max_degree = c.degree;
  double prev = 0.0;
  bool monotone = true;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const fuzzy::BridgeEstimate b = fuzzy::gh_upper(ns[i], opt);
    r.rows.push_back(json{{"n", b.n},
                          {"delta_n", b.delta_n},
                          {"theta_n", b.theta_n},
                          {"gh_upper", b.gh_upper},
                          {"delta_block_bound", b.delta_block_bound},
                          {"max_degree", b.max_degree},
                          {"seed", b.search_seed}});
    if (i > 0 && !(b.gh_upper < prev)) monotone = false;
    prev = b.gh_upper;
  }
  r.check("gh_upper_strictly_decreasing", monotone, prev, 0.0);
  return r;
}

inline Report cmd_orbifold(const RunConfig& c) {
  // --n is the spin label: the commutant lives in B(C^N) with N = n + 1.
  Report r;
  const int N = c.n + 1;
  const fuzzy::CommutantBasis C = fuzzy::zn_commutant(c.k, N);
  r.rows.push_back(json{{"kind", "commutant"},
                        {"k", c.k},
                        {"N", N},
                        {"block_dims", C.block_dims},
                        {"dimension", C.dimension()},
                        {"block_dimension_sum", C.block_dimension_sum()}});
  r.check("commutant_dim_equals_block_sum", C.dimension() == C.block_dimension_sum(), C.dimension(), 0.0);
  const int L = c.degree >= 0 ? c.degree : c.n;
  const fuzzy::InvariantHarmonics h = fuzzy::invariant_harmonics(c.k, L);
  for (int l = 0; l <= L; ++l) {
    r.rows.push_back(json{{"kind", "invariant_harmonics"},
                          {"l", l},
                          {"formula", h.formula[static_cast<std::size_t>(l)]},
                          {"projector_rank", h.projector_rank[static_cast<std::size_t>(l)]}});
  }
  r.check("invariant_harmonic_dims", h.consistent(), L, 0.0);
  if (c.k <= c.n) {
    const fuzzy::OrbifoldReport o = fuzzy::orbifold_quantization_check(c.k, c.n, c.seed);
    r.rows.push_back(json{{"kind", "quantization"},
                          {"projection_rank", o.projection_rank},
                          {"symbol_leak", o.symbol_leak},
                          {"adjoint_leak", o.adjoint_leak},
                          {"intertwining_defect", o.intertwining_defect},
                          {"spectrum_defect", o.spectrum_defect}});
    r.check("projection_rank_equals_commutant_dim", o.projection_rank == o.commutant_dim, o.projection_rank, 0.0);
    r.check("symbol_preserves_invariance", o.symbol_leak <= c.tol, o.symbol_leak, c.tol);
    r.check("adjoint_preserves_invariance", o.adjoint_leak <= c.tol, o.adjoint_leak, c.tol);
    r.check("intertwining", o.intertwining_defect <= c.tol, o.intertwining_defect, c.tol);
    r.check("transform_spectrum_on_invariants", o.spectrum_defect <= c.tol, o.spectrum_defect, c.tol);
  }
  return r;
}

inline Report cmd_group(const RunConfig& c) {
  Report r;
  fuzzy::GroupTable G;
  if (c.table.empty()) {
    G = fuzzy::cyclic_group_table(c.k);
  } else if (c.table == "s3") {
    G = fuzzy::symmetric_group_3_table();
  } else {
    std::ifstream in(c.table);
    if (!in) throw std::invalid_argument("--table: cannot open '" + c.table + "'");
    G = fuzzy::parse_group_table(in);
  }
  const std::vector<int> omega = c.omega.empty() ? std::vector<int>{} : parse_ints(c.omega, "--omega");
  const fuzzy::StabilizerResult s = fuzzy::group_algebra_stabilizer(G, omega);
  r.rows.push_back(json{{"order", G.order()},
                        {"omega", omega},
                        {"subgroup", s.subgroup},
                        {"compressed_dim", s.compressed_dim},
                        {"idempotent_defect", s.idempotent_defect},
                        {"selfadjoint_defect", s.selfadjoint_defect}});
  r.check("p_idempotent", s.idempotent_defect <= c.tol, s.idempotent_defect, c.tol);
  r.check("p_selfadjoint", s.selfadjoint_defect <= c.tol, s.selfadjoint_defect, c.tol);
  return r;
}

inline Report cmd_deform(const RunConfig& c) {
  Report r;
  const fuzzy::SkewForm th = parse_theta(c.theta);
  const fuzzy::DeformInvarianceReport d = fuzzy::berezin_deform_invariance(c.n, th, c.hbar);
  const double tol = std::min(c.tol, 1e-10);
  r.rows.push_back(json{{"kind", "berezin_transform"},
                        {"n", d.n},
                        {"hbar", d.hbar},
                        {"max_gap", d.max_gap},
                        {"product_deviation", d.product_deviation},
                        {"status", d.max_gap <= tol ? "identical" : "different"}});
  r.check("transform_coefficients_identical", d.ok(tol), d.max_gap, tol);

  // Trace and torus-averaged product on seeded random pairs in the same grading.
  const fuzzy::CoherentFamily fam = fuzzy::coherent_family(c.n);
  const int dim = fam.dim();
  const fuzzy::Matrix one = fuzzy::Matrix::Identity(dim, dim);
  const std::vector<fuzzy::Matrix> gens{fuzzy::detail::kron(2.0 * fam.rep.Jz, one),
                                        fuzzy::detail::kron(one, 2.0 * fam.rep.Jz)};
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random = [&] {
    fuzzy::Matrix A(dim * dim, dim * dim);
    for (int i = 0; i < A.rows(); ++i)
      for (int j = 0; j < A.cols(); ++j) A(i, j) = fuzzy::Complex(normal(rng), normal(rng));
    return fuzzy::grade_by_torus(gens, A);
  };
  double trace_gap = 0.0, haar_gap = 0.0;
  for (int s = 0; s < 5; ++s) {
    const fuzzy::TraceCheck t = fuzzy::trace_invariance_check(random(), random(), th, c.hbar);
    trace_gap = std::max(trace_gap, t.gap());
    haar_gap = std::max(haar_gap, t.haar_defect);
  }
  r.rows.push_back(json{{"kind", "trace_invariance"}, {"trace_gap", trace_gap}, {"haar_defect", haar_gap}});
  r.check("trace_invariance", trace_gap <= 1e-11, trace_gap, 1e-11);
  r.check("haar_multiplication_invariance", haar_gap <= 1e-11, haar_gap, 1e-11);
  return r;
}

inline Report cmd_suq2(const RunConfig& c) {
  Report r;
  const fuzzy::ShiftRep rep = fuzzy::build_shift_rep(c.q, c.trunc);
  const fuzzy::RelationResiduals res = fuzzy::relation_residuals(rep);
  r.rows.push_back(json{{"kind", "relations"}, {"interior_max", res.interior_max()}, {"boundary", res.boundary}});
  r.check("relations_on_interior", res.interior_max() <= 1e-13, res.interior_max(), 1e-13);
  double worst = 0.0;
  for (int t = 0; t < 16; ++t) {
    const double angle = 2 * fuzzy::kPi * t / 16 + 0.1;
    const fuzzy::SigmaDLambda s = fuzzy::sigma_D_lambda(rep, std::polar(1.0, angle));
    r.rows.push_back(json{{"kind", "sigma_D_lambda"}, {"theta", angle}, {"interior_gap", s.interior_gap}, {"boundary_gap", s.boundary_gap}});
    worst = std::max(worst, s.interior_gap);
  }
  r.check("sigma_D_lambda_formula", worst <= 1e-12, worst, 1e-12);
  // e_0 is the first basis vector.
  bool agree = true;
  for (int k = 0; k < std::min(rep.D, 4); ++k) {
    const fuzzy::StateStabilizer s = fuzzy::state_stabilizer_test(rep, fuzzy::VectorState::basis(rep.D, k), std::polar(1.0, 1.1));
    r.rows.push_back(json{{"kind", "state_stabilizer"}, {"basis_index", k}, {"phi_cc", s.phi_cc}, {"in_stabilizer", s.in_stabilizer}});
    agree = agree && s.in_stabilizer == s.sigma_criterion;
    if (c.q == 0.0) agree = agree && s.in_stabilizer == (k != 0);
  }
  r.check("stabilizer_criterion", agree, agree ? 1.0 : 0.0, 0.0);
  const fuzzy::GroupStabilizerWitness w = fuzzy::group_stabilizer_witness(rep);
  r.rows.push_back(json{{"kind", "group_stabilizer"},
                        {"rank_cc", w.rank_cc},
                        {"left_residual_c_zero", w.left_residual_c_zero},
                        {"right_residual_c_zero", w.right_residual_c_zero}});
  return r;
}

inline Report cmd_moment(const RunConfig& c) {
  // --n is n_max; rows run over n = 0..n_max.
  Report r;
  double worst = 0.0;
  for (int n = 0; n <= c.n; ++n) {
    const fuzzy::MomentCheck m = fuzzy::moment_check(n);
    r.rows.push_back(json{{"n", n}, {"value", m.quadrature}, {"ratio", m.dimension_ratio}});
    worst = std::max(worst, std::abs(m.quadrature - m.dimension_ratio));
  }
  const double tol = std::min(c.tol, 1e-11);
  r.check("moment_equals_dimension_ratio", worst <= tol, worst, tol);
  return r;
}

inline Report cmd_concentration(const RunConfig& c) {
  Report r;
  std::mt19937_64 rng(c.seed);
  const std::vector<std::pair<std::string, fuzzy::HarmonicField>> inputs{
      {"one", fuzzy::HarmonicField::constant(1.0)}, {"random_degree_2", fuzzy::random_real_field(2, rng)}};
  bool holds = true;
  for (int n : sweep_or_single(c)) {
    for (const auto& [name, a] : inputs) {
      const fuzzy::ConcentrationCheck k = fuzzy::concentration_check(n, c.gamma, a);
      r.rows.push_back(json{{"n", n}, {"gamma", c.gamma}, {"input", name}, {"lhs", k.lhs}, {"rhs", k.rhs}, {"holds", k.holds}});
      holds = holds && k.holds;
    }
  }
  r.check("concentration_inequality", holds, holds ? 1.0 : 0.0, 1e-6);
  return r;
}

inline Report cmd_decompose(const RunConfig& c) {
  Report r;
  bool exact = true;
  for (int n : sweep_or_single(c)) {
    if (n < 1) throw std::invalid_argument("decompose: n must be >= 1");
    const auto proj = fuzzy::isotypic_projectors(n);
    for (int l = 0; l <= n; ++l) {
      const double tr = proj[static_cast<std::size_t>(l)].trace().real();
      const long rank = std::lround(tr);
      r.rows.push_back(json{{"n", n}, {"l", l}, {"dimension", rank}});
      exact = exact && rank == 2 * l + 1 && std::abs(tr - double(rank)) < 1e-8;
    }
  }
  r.check("isotypic_dims_are_2l_plus_1", exact, exact ? 1.0 : 0.0, 0.0);
  return r;
}

inline Report run(const RunConfig& c) {
  Report r;
  if (c.subcommand == "spectrum") r = cmd_spectrum(c);
  else if (c.subcommand == "gh") r = cmd_gh(c);
  else if (c.subcommand == "orbifold") r = cmd_orbifold(c);
  else if (c.subcommand == "group") r = cmd_group(c);
  else if (c.subcommand == "deform") r = cmd_deform(c);
  else if (c.subcommand == "suq2") r = cmd_suq2(c);
  else if (c.subcommand == "moment") r = cmd_moment(c);
  else if (c.subcommand == "concentration") r = cmd_concentration(c);
  else if (c.subcommand == "decompose") r = cmd_decompose(c);
  else throw std::invalid_argument("unknown subcommand '" + c.subcommand + "'");
  r.meta = json{{"tool", "fuzzyq"}, {"version", kVersion}, {"config", c.echo()}, {"tolerances", {{"tol", c.tol}}}};
  return r;
}

namespace detail {

inline std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  const std::string s = v.dump();
  return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
}

}  // namespace detail

/// CSV: '#'-prefixed meta line, then the rows table (columns in first-seen
/// order, missing cells empty), a blank line and the assertions table.
inline std::string to_csv(const Report& r) {
  std::ostringstream out;
  out << "# " << json{{"meta", r.meta}}.dump() << "\n";
  std::vector<std::string> cols;
  for (const auto& row : r.rows)
    for (const auto& [key, value] : row.items())
      if (std::find(cols.begin(), cols.end(), key) == cols.end()) cols.push_back(key);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out << ",";
      if (row.contains(cols[i])) out << detail::csv_cell(row[cols[i]]);
    }
    out << "\n";
  }
  out << "\nname,passed,value,tol\n";
  for (const auto& a : r.assertions) {
    out << a["name"].get<std::string>() << "," << (a["passed"].get<bool>() ? "true" : "false") << ","
        << a["value"].dump() << "," << a["tol"].dump() << "\n";
  }
  return out.str();
}

inline std::string render(const Report& r, const std::string& format) {
  if (format == "json") return r.to_json().dump(2) + "\n";
  if (format == "csv") return to_csv(r);
  throw std::invalid_argument("--format: expected json or csv, got '" + format + "'");
}

}  // namespace fuzzyq
