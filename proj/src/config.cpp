#include "pmeta/config.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

#include "pmeta/error.hpp"

namespace pmeta {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& s, long line, const std::string& key) {
  const char* p = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(p, &end);
  if (end != p + s.size()) {
    throw ParseError(line, "key '" + key + "': cannot parse number '" + s + "'");
  }
  return v;
}

long to_long(const std::string& s, long line, const std::string& key) {
  const char* p = s.c_str();
  char* end = nullptr;
  const long v = std::strtol(p, &end, 10);
  if (end != p + s.size()) {
    throw ParseError(line, "key '" + key + "': cannot parse integer '" + s + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& s, long line, const std::string& key) {
  const char* p = s.c_str();
  char* end = nullptr;
  const unsigned long long v = std::strtoull(p, &end, 10);
  if (end != p + s.size()) {
    throw ParseError(line, "key '" + key + "': cannot parse seed '" + s + "'");
  }
  return v;
}

void expect_count(const std::vector<std::string>& vals, std::size_t n, long line,
                  const std::string& key) {
  if (vals.size() != n) {
    throw ParseError(line, "key '" + key + "': expected " + std::to_string(n) +
                               " values, got " + std::to_string(vals.size()));
  }
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::istream& in) {
  ExperimentSpec spec;
  bool have_kind = false;

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::vector<std::string> vals = split_ws(trim(stripped.substr(eq + 1)));
    if (key.empty()) throw ParseError(line_no, "missing key before '='");
    if (vals.empty()) throw ParseError(line_no, "key '" + key + "': missing value");

    if (key == "kind") {
      expect_count(vals, 1, line_no, key);
      if (vals[0] == "logit-normal") {
        spec.scenario.kind = ScenarioKind::logit_normal;
      } else if (vals[0] == "bivariate-beta") {
        spec.scenario.kind = ScenarioKind::bivariate_beta;
      } else if (vals[0] == "fixed") {
        spec.scenario.kind = ScenarioKind::fixed;
      } else {
        throw ParseError(line_no, "unknown scenario kind '" + vals[0] +
                                      "' (expected logit-normal, bivariate-beta, or fixed)");
      }
      have_kind = true;
    } else if (key == "eta") {
      expect_count(vals, 2, line_no, key);
      spec.scenario.eta = {to_double(vals[0], line_no, key), to_double(vals[1], line_no, key)};
    } else if (key == "cov") {
      expect_count(vals, 4, line_no, key);
      for (int i = 0; i < 4; ++i) {
        spec.scenario.sigma[i] = to_double(vals[i], line_no, key);
      }
    } else if (key == "shapes") {
      expect_count(vals, 3, line_no, key);
      for (int i = 0; i < 3; ++i) {
        spec.scenario.shapes[i] = to_double(vals[i], line_no, key);
      }
    } else if (key == "rates") {
      expect_count(vals, 2, line_no, key);
      spec.scenario.rate_ctl = to_double(vals[0], line_no, key);
      spec.scenario.rate_trt = to_double(vals[1], line_no, key);
    } else if (key == "measure") {
      expect_count(vals, 1, line_no, key);
      try {
        spec.scenario.measure = EffectMeasure::from_flag(vals[0]);
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
      }
    } else if (key == "n_per_arm") {
      spec.scenario.sample_sizes.clear();
      for (const auto& v : vals) {
        spec.scenario.sample_sizes.push_back(to_long(v, line_no, key));
      }
    } else if (key == "K") {
      expect_count(vals, 1, line_no, key);
      spec.k_studies = to_long(vals[0], line_no, key);
    } else if (key == "reps") {
      expect_count(vals, 1, line_no, key);
      spec.reps = to_long(vals[0], line_no, key);
    } else if (key == "level") {
      expect_count(vals, 1, line_no, key);
      spec.level = to_double(vals[0], line_no, key);
    } else if (key == "percentiles") {
      spec.percentiles.clear();
      for (const auto& v : vals) spec.percentiles.push_back(to_double(v, line_no, key));
    } else if (key == "methods") {
      spec.methods.clear();
      for (const auto& v : vals) {
        try {
          spec.methods.push_back(method_from_flag(v));
        } catch (const std::invalid_argument& e) {
          throw ParseError(line_no, e.what());
        }
      }
    } else if (key == "seed") {
      expect_count(vals, 1, line_no, key);
      spec.base_seed = to_u64(vals[0], line_no, key);
    } else if (key == "resamples") {
      expect_count(vals, 1, line_no, key);
      spec.n_resamples = to_long(vals[0], line_no, key);
    } else if (key == "exact_threshold") {
      expect_count(vals, 1, line_no, key);
      spec.exact_threshold = static_cast<int>(to_long(vals[0], line_no, key));
    } else if (key == "grid") {
      expect_count(vals, 1, line_no, key);
      spec.grid_points = to_long(vals[0], line_no, key);
    } else if (key == "refine_tol") {
      expect_count(vals, 1, line_no, key);
      spec.refine_tol = to_double(vals[0], line_no, key);
    } else if (key == "oracle_draws") {
      expect_count(vals, 1, line_no, key);
      spec.oracle_draws = to_long(vals[0], line_no, key);
    } else if (key == "oracle_seed") {
      expect_count(vals, 1, line_no, key);
      spec.oracle_seed = to_u64(vals[0], line_no, key);
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }

  if (!have_kind) throw ParseError(0, "spec file must set 'kind'");
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
  return spec;
}

ExperimentSpec parse_experiment_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open spec file: " + path);
  return parse_experiment_spec(in);
}

}  // namespace pmeta
