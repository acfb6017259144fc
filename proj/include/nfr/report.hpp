// report.hpp
// Suite configuration (flat `key = value` text, JSON dump for provenance),
// verification report rows and JSON/CSV emission.  Every row names a paper
// anchor; the admissible anchors live in a fixed registry mirrored in
// docs/anchors.md.

#ifndef NFR_REPORT_HPP_
#define NFR_REPORT_HPP_

#include <chrono>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace nfr {

// ---------------------------------------------------------------------------
// Anchor registry.
// ---------------------------------------------------------------------------
inline const std::set<std::string>& anchor_registry() {
  static const std::set<std::string> reg = {
      "#T(J) = prod_{j<=J} (2j-1)",
      "phi = 2 xi13 xi23",
      "phitilde_J closed form",
      "omega(xi) = e^{it xi^2} w-hat(xi)",
      "e^{it phi} = d_t (e^{it phi} / (i phi))",
      "Table 1 case classification",
      "Lemma N_R",
      "Lemma N_0",
      "Lemma W0",
      "Lemma NFR-weak",
      "Lemma combi (divisor bound)",
      "localized multiplier certificate",
      "L^2 conservation law",
      "u(t) = S(t-t0)u(t0) + lambda int S(t-t') dx(|u|^2 u) dt'",
      "w^2 dx w-bar - 2 P_c(w dx w-bar) w",
      "N^{-1/2+} + T^{1/4} N^{-1/4+}",
      "unique in L^inf(-T,T; H^{1/2})",
  };
  return reg;
}

// ---------------------------------------------------------------------------
// SuiteConfig: flat key = value text; `#` starts a comment; unknown keys are
// rejected.  dump() followed by parse() reproduces the config exactly.
// ---------------------------------------------------------------------------
struct SuiteConfig {
  int xi_max = 16;        // light suites
  int xi_max_heavy = 32;  // simulate / strichartz lattices
  double dt = 0.0;        // 0 = solver picks the 0.5/xi_max^2 cap
  double T = 0.05;
  double lambda = -1.0;
  double M = 1000.0;
  std::vector<double> M_sweep{100.0, 1000.0, 10000.0};
  int g = 3;
  double eps = 0.01;
  uint64_t seed = 1;
  int n_seeds = 5;
  int max_n = 256;  // classification-audit bound
  std::vector<std::string> suites{"all"};
  std::string out_dir = "report";

  bool operator==(const SuiteConfig&) const = default;

  std::string dump() const {
    std::ostringstream os;
    os.precision(17);
    os << "xi_max = " << xi_max << "\n";
    os << "xi_max_heavy = " << xi_max_heavy << "\n";
    os << "dt = " << dt << "\n";
    os << "T = " << T << "\n";
    os << "lambda = " << lambda << "\n";
    os << "M = " << M << "\n";
    os << "M_sweep = " << join(M_sweep) << "\n";
    os << "g = " << g << "\n";
    os << "eps = " << eps << "\n";
    os << "seed = " << seed << "\n";
    os << "n_seeds = " << n_seeds << "\n";
    os << "max_n = " << max_n << "\n";
    os << "suites = " << join(suites) << "\n";
    os << "out_dir = " << out_dir << "\n";
    return os.str();
  }

  static SuiteConfig parse(const std::string& text) {
    SuiteConfig c;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") != std::string::npos)
          throw std::invalid_argument("SuiteConfig: bad line: " + line);
        continue;
      }
      std::string key = trim(line.substr(0, eq));
      std::string val = trim(line.substr(eq + 1));
      if (key == "xi_max") c.xi_max = std::stoi(val);
      else if (key == "xi_max_heavy") c.xi_max_heavy = std::stoi(val);
      else if (key == "dt") c.dt = std::stod(val);
      else if (key == "T") c.T = std::stod(val);
      else if (key == "lambda") c.lambda = std::stod(val);
      else if (key == "M") c.M = std::stod(val);
      else if (key == "M_sweep") c.M_sweep = split_doubles(val);
      else if (key == "g") c.g = std::stoi(val);
      else if (key == "eps") c.eps = std::stod(val);
      else if (key == "seed") c.seed = std::stoull(val);
      else if (key == "n_seeds") c.n_seeds = std::stoi(val);
      else if (key == "max_n") c.max_n = std::stoi(val);
      else if (key == "suites") c.suites = split_strings(val);
      else if (key == "out_dir") c.out_dir = val;
      else throw std::invalid_argument("SuiteConfig: unknown key: " + key);
    }
    return c;
  }

  static SuiteConfig from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("SuiteConfig: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse(buf.str());
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["xi_max"] = xi_max;
    j["xi_max_heavy"] = xi_max_heavy;
    j["dt"] = dt;
    j["T"] = T;
    j["lambda"] = lambda;
    j["M"] = M;
    j["M_sweep"] = M_sweep;
    j["g"] = g;
    j["eps"] = eps;
    j["seed"] = seed;
    j["n_seeds"] = n_seeds;
    j["max_n"] = max_n;
    j["suites"] = suites;
    j["out_dir"] = out_dir;
    return j;
  }

 private:
  static std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }
  template <class T_>
  static std::string join(const std::vector<T_>& v) {
    std::ostringstream os;
    os.precision(17);
    for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
  }
  static std::vector<double> split_doubles(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stod(trim(tok)));
    return out;
  }
  static std::vector<std::string> split_strings(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(trim(tok));
    return out;
  }
};

// ---------------------------------------------------------------------------
// VerificationReport: append-only rows; every anchor must be registered.
// JSON is the machine format, CSV the table format; runtime_ms is the only
// field excluded from the determinism contract.
// ---------------------------------------------------------------------------
struct CheckRow {
  std::string name;
  std::string paper_anchor;
  double measured = 0.0;
  double bound_or_expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double runtime_ms = 0.0;
  uint64_t seed = 0;
};

struct VerificationReport {
  nlohmann::json config_json;
  std::vector<CheckRow> rows;

  void add(CheckRow row) {
    if (!anchor_registry().count(row.paper_anchor))
      throw std::invalid_argument("VerificationReport: unregistered anchor: " +
                                  row.paper_anchor);
    rows.push_back(std::move(row));
  }

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["config"] = config_json;
    j["all_pass"] = all_pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json row;
      row["name"] = r.name;
      row["paper_anchor"] = r.paper_anchor;
      row["measured"] = r.measured;
      row["bound_or_expected"] = r.bound_or_expected;
      row["tolerance"] = r.tolerance;
      row["pass"] = r.pass;
      row["runtime_ms"] = r.runtime_ms;
      row["seed"] = r.seed;
      j["checks"].push_back(std::move(row));
    }
    return j;
  }

  void write_json(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("report: cannot open " + path);
    os << to_json().dump(2) << "\n";
  }

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("report: cannot open " + path);
    os.precision(12);
    os << "name,paper_anchor,measured,bound_or_expected,tolerance,pass,"
          "runtime_ms,seed\n";
    for (const auto& r : rows)
      os << '"' << r.name << "\",\"" << r.paper_anchor << "\"," << r.measured
         << ',' << r.bound_or_expected << ',' << r.tolerance << ','
         << (r.pass ? 1 : 0) << ',' << r.runtime_ms << ',' << r.seed << "\n";
  }
};

// Generic CSV table writer for scan outputs.
inline void write_csv_table(const std::string& path, const std::string& header,
                            const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("csv: cannot open " + path);
  os.precision(12);
  os << header << "\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
}

// Wall-clock helper for runtime_ms fields.
class StopWatch {
 public:
  StopWatch() : t0_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace nfr

#endif  // NFR_REPORT_HPP_
