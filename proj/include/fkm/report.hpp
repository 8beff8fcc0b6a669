#ifndef FKM_REPORT_HPP
#define FKM_REPORT_HPP

#include "fkm/scalar.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace fkm {

using json = nlohmann::ordered_json;

enum class Status { pass, fail, warn };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    default: return "warn";
  }
}

struct Check {
  std::string name;
  std::string anchor;
  Status status = Status::fail;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string mode = "float64";
  json details = json::object();
};

// Residual check; NaN residuals fail.
inline Check residual_check(std::string name, std::string anchor, double residual, double tol,
                            ScalarMode mode = ScalarMode::float64, json details = json::object()) {
  Check c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.residual = residual;
  c.tolerance = tol;
  c.mode = to_string(mode);
  c.status = (residual <= tol) ? Status::pass : Status::fail;
  c.details = std::move(details);
  return c;
}

inline Check bool_check(std::string name, std::string anchor, bool ok,
                        ScalarMode mode = ScalarMode::float64, json details = json::object(),
                        double residual = 0.0, double tol = 0.0) {
  Check c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.residual = residual;
  c.tolerance = tol;
  c.mode = to_string(mode);
  c.status = ok ? Status::pass : Status::fail;
  c.details = std::move(details);
  return c;
}

inline json to_json(const Check& c) {
  json j;
  j["name"] = c.name;
  j["anchor"] = c.anchor;
  j["status"] = to_string(c.status);
  if (std::isfinite(c.residual))
    j["residual"] = c.residual;
  else
    j["residual"] = nullptr;
  j["tolerance"] = c.tolerance;
  j["mode"] = c.mode;
  j["details"] = c.details;
  return j;
}

struct Report {
  std::string command;
  std::uint64_t seed = 0;
  ScalarMode mode = ScalarMode::float64;
  double tolerance = kDefaultTol;
  std::vector<Check> checks;
  double wall_time = 0.0;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.status == Status::pass; });
  }

  void add(Check c) { checks.push_back(std::move(c)); }
  void add(const std::vector<Check>& cs) { checks.insert(checks.end(), cs.begin(), cs.end()); }

  void sort_checks() {
    std::stable_sort(checks.begin(), checks.end(),
                     [](const Check& a, const Check& b) { return a.name < b.name; });
  }
};

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

inline json to_json(const Report& r, bool include_time = true) {
  json j;
  j["schema"] = kSchemaVersion;
  j["version"] = kToolVersion;
  j["command"] = r.command;
  j["seed"] = r.seed;
  j["scalar"] = to_string(r.mode);
  j["tolerance"] = r.tolerance;
  j["status"] = r.passed() ? "pass" : "fail";
  json cs = json::array();
  for (const auto& c : r.checks) cs.push_back(to_json(c));
  j["checks"] = cs;
  if (include_time) j["wall_time"] = r.wall_time;
  return j;
}

template <class T>
json matrix_to_json(const Mat<T>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if constexpr (is_exact_v<T>)
        row.push_back(ScalarTraits<T>::str(m(i, j)));
      else
        row.push_back(m(i, j));
    }
    rows.push_back(row);
  }
  return rows;
}

// Plain-text dump: header "rows cols mode", then one row per line.
template <class T>
std::string matrix_dump(const Mat<T>& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + " " +
                    to_string(ScalarTraits<T>::mode) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += ScalarTraits<T>::str(m(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace fkm

#endif  // FKM_REPORT_HPP
