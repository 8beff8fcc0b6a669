// Acceptance driver: one PASS/FAIL line per criterion.
// Exit status ignores only the checks listed in kKnownFailures.

#include "fkm/suites.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

using namespace fkm;

namespace {

const std::set<std::string> kKnownFailures = {"nullity.spectral-data"};

struct Run {
  std::string label;
  Report report;
};

std::vector<Run> g_runs;

void run(const std::string& suite, Side side, ScalarMode mode, double tol, int samples = -1) {
  SuiteOptions o;
  o.seed = 0;
  o.side = side;
  o.mode = mode;
  o.tol = tol;
  o.samples = samples;
  std::string label = suite + "/" + to_string(side) + "/" + to_string(mode);
  std::fprintf(stderr, "running %s\n", label.c_str());
  g_runs.push_back({label, run_suite(suite, o)});
  std::fprintf(stderr, "  %.1f s\n", g_runs.back().report.wall_time);
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> suites;    // run label prefixes
  std::vector<std::string> prefixes;  // check name prefixes
};

}  // namespace

int main(int argc, char** argv) {
  const Side L = Side::left, R = Side::right;
  const ScalarMode E = ScalarMode::exact, F = ScalarMode::float64;
  for (Side s : {L, R}) run("clifford", s, E, 0.0);
  for (Side s : {L, R}) run("cartan-munzner", s, E, 0.0);
  for (Side s : {L, R}) run("cartan-munzner", s, F, 1e-9);
  run("ot-identities", L, E, 1e-9);
  for (Side s : {L, R}) run("ot-identities", s, F, 1e-9);
  run("reproduce-example", R, F, 1e-10);
  for (Side s : {L, R}) run("nullity", s, F, 1e-9);
  for (Side s : {L, R}) run("kernels", s, F, 1e-9);
  for (Side s : {L, R}) run("mirror", s, F, 1e-10);
  for (Side s : {L, R}) run("pencil", s, F, 1e-10);
  run("appendix", L, F, 1e-9);

  const std::vector<Criterion> criteria = {
      {1, "Clifford relations (exact)", {"clifford/"}, {"clifford."}},
      {2, "Cartan-Munzner equations", {"cartan-munzner/"}, {"cartan-munzner.gradient", "cartan-munzner.laplacian"}},
      {3, "Cube identity and multiplicities", {"cartan-munzner/"}, {"cartan-munzner.cube", "cartan-munzner.multiplicities"}},
      {4, "Block identities and negative controls", {"ot-identities/"}, {"ot-identities."}},
      {5, "Worked example reproduction", {"reproduce-example/"}, {"reproduce-example."}},
      {6, "r-nullity, r_lambda and spectral data", {"nullity/"}, {"nullity."}},
      {7, "Joint kernels of B_a and C_a", {"kernels/"}, {"kernels."}},
      {8, "Mirror transports", {"mirror/"}, {"mirror.sharp", "mirror.star"}},
      {9, "Block patterns and pencils", {"mirror/", "pencil/"}, {"mirror.mtx", "mirror.good", "mirror.hurwitz", "pencil."}},
      {10, "Third form and restriction to V", {"ot-identities/", "mirror/"}, {"third-form.", "mirror.v-restriction", "mirror.quaternion"}},
      {11, "Appendix kernel dimensions", {"appendix/", "nullity/"}, {"appendix.", "nullity.singular-locus"}},
      {12, "Frame symmetries", {"mirror/"}, {"frame-symmetry."}},
  };

  bool ok = true;
  json out = json::object();
  for (const auto& c : criteria) {
    int total = 0;
    double worst = 0.0;
    std::vector<std::string> failed;
    bool unexpected = false;
    for (const auto& r : g_runs) {
      bool suite_match = false;
      for (const auto& s : c.suites) suite_match |= starts_with(r.label, s);
      if (!suite_match) continue;
      for (const auto& ch : r.report.checks) {
        bool match = false;
        for (const auto& p : c.prefixes) match |= starts_with(ch.name, p);
        if (!match) continue;
        ++total;
        if (std::isfinite(ch.residual) && ch.tolerance > 0.0) worst = std::max(worst, ch.residual);
        if (ch.status != Status::pass) {
          failed.push_back(r.label + ":" + ch.name);
          if (!kKnownFailures.count(ch.name)) unexpected = true;
        }
      }
    }
    if (total == 0) {
      failed.push_back("no checks ran");
      unexpected = true;
    }
    const bool pass = failed.empty();
    ok = ok && !unexpected;
    std::printf("criterion %2d: %s  %s  [%d checks, max residual %.2e]\n", c.id, pass ? "PASS" : "FAIL",
                c.title.c_str(), total, worst);
    for (const auto& f : failed)
      std::printf("    failed: %s%s\n", f.c_str(),
                  kKnownFailures.count(f.substr(f.find(':') + 1)) ? " (known, see README)" : "");
    out[std::to_string(c.id)] = {{"title", c.title}, {"status", pass ? "pass" : "fail"}, {"checks", total},
                                 {"failed", failed}};
  }

  if (argc > 1) {
    json full{{"criteria", out}, {"runs", json::array()}};
    for (const auto& r : g_runs) full["runs"].push_back({{"label", r.label}, {"report", to_json(r.report)}});
    std::ofstream(argv[1]) << full.dump(2) << "\n";
  }
  return ok ? 0 : 1;
}
