#include "commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  fuzzyq::RunConfig c;
  CLI::App app{"fuzzyq: report suites for Berezin quantization of the fuzzy sphere"};
  app.add_option("subcommand", c.subcommand,
                 "spectrum | gh | orbifold | group | deform | suq2 | moment | concentration | decompose")
      ->required()
      ->check(CLI::IsMember({"spectrum", "gh", "orbifold", "group", "deform", "suq2", "moment", "concentration",
                             "decompose"}));
  app.add_option("--n", c.n, "spin label n (H^n has dimension n + 1); n_max for moment");
  app.add_option("--n-sweep", c.n_sweep, "a:b:step or a:b:*factor");
  app.add_option("--degree", c.degree, "degree cap (-1 picks the command default)");
  app.add_option("--seed", c.seed, "search seed");
  app.add_option("--samples", c.samples, "random candidates per search");
  app.add_option("--tol", c.tol, "assertion tolerance");
  app.add_option("--gamma", c.gamma, "concentration cut in (0, 1)");
  app.add_option("--theta", c.theta, "skew form, row-major comma-separated");
  app.add_option("--hbar", c.hbar, "deformation parameter");
  app.add_option("--q", c.q, "SU_q(2) parameter, |q| < 1");
  app.add_option("--trunc", c.trunc, "shift-representation truncation D");
  app.add_option("--k", c.k, "order of the cyclic group");
  app.add_option("--table", c.table, "group multiplication table file, or s3");
  app.add_option("--omega", c.omega, "comma-separated group element indices");
  app.add_option("--out", c.out, "output file (stdout if omitted)");
  app.add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  CLI11_PARSE(app, argc, argv);

  fuzzyq::Report report;
  std::string text;
  try {
    report = fuzzyq::run(c);
    text = fuzzyq::render(report, c.format);
  } catch (const std::exception& e) {
    std::cerr << "fuzzyq: " << e.what() << "\n";
    return 2;
  }
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(c.out, std::ios::binary);
    if (!out) {
      std::cerr << "fuzzyq: cannot write '" << c.out << "'\n";
      return 2;
    }
    out << text;
  }
  if (!report.ok()) {
    for (const auto& a : report.assertions)
      if (!a["passed"].get<bool>()) std::cerr << "fuzzyq: assertion failed: " << a["name"].get<std::string>() << "\n";
    return 1;
  }
  return 0;
}
