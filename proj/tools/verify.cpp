// verify: runs named verification suites and writes a JSON report.
//   verify <suite> [--seed N] [--scalar exact|float64] [--tol X] [--samples N] [--side left|right|mixed]
//                  [--out PATH] [--json | --pretty]
// Exit codes: 0 all checks pass, 1 some check fails, 2 usage error or unknown suite.

#include "fkm/suites.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string join(const std::vector<std::string>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str();
}

void print_summary(std::ostream& os, const fkm::Report& r) {
  for (const auto& c : r.checks)
    os << (c.status == fkm::Status::pass ? "PASS " : "FAIL ") << c.name << "  residual=" << c.residual
       << " tol=" << c.tolerance << '\n';
  os << r.command << ": " << (r.passed() ? "pass" : "fail") << " (" << r.checks.size() << " checks, "
     << r.wall_time << " s)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for the (7,8) isoparametric focal manifolds"};
  std::string suite, scalar = "float64", side = "left", out;
  fkm::SuiteOptions opts;
  int samples = -1;
  bool pretty = false, json_only = false;
  app.add_option("suite", suite, "Suite: " + join(fkm::suite_names()))->required();
  app.add_option("--seed", opts.seed, "Run seed (default 0)");
  app.add_option("--scalar", scalar, "Scalar mode")->check(CLI::IsMember({"exact", "float64"}));
  app.add_option("--tol", opts.tol, "Tolerance (default 1e-9)")->check(CLI::PositiveNumber);
  app.add_option("--samples,--points,--trials", samples, "Sample count; suite default when omitted")
      ->check(CLI::PositiveNumber);
  app.add_option("--side", side, "Clifford family")->check(CLI::IsMember({"left", "right", "mixed"}));
  app.add_option("--out", out, "Write the JSON report to PATH");
  auto* jflag = app.add_flag("--json", json_only, "Compact JSON on standard output, no summary");
  app.add_flag("--pretty", pretty, "Indented JSON")->excludes(jflag);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!fkm::is_suite(suite)) {
    std::cerr << "unknown suite '" << suite << "'; expected one of: " << join(fkm::suite_names()) << '\n';
    return 2;
  }
  opts.mode = fkm::parse_scalar_mode(scalar);
  opts.side = fkm::parse_side(side);
  opts.samples = samples;

  fkm::Report report = fkm::run_suite(suite, opts);
  const std::string text = fkm::to_json(report).dump(pretty ? 2 : -1);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) {
      std::cerr << "cannot write " << out << '\n';
      return 2;
    }
    f << text << '\n';
  }
  if (json_only || pretty || out.empty()) std::cout << text << '\n';
  if (!json_only) print_summary(out.empty() && !pretty ? std::cerr : std::cout, report);
  return report.passed() ? 0 : 1;
}
