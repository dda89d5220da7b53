#include "pmeta/effects.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace pmeta {

EffectMeasure EffectMeasure::from_flag(std::string_view flag) {
  if (flag == "log-rr") return {MeasureKind::log_relative_risk};
  if (flag == "rd") return {MeasureKind::risk_difference};
  if (flag == "log-hr") return {MeasureKind::log_hazard_ratio};
  throw std::invalid_argument("unknown measure: " + std::string(flag) +
                              " (expected log-rr, rd, or log-hr)");
}

const char* EffectMeasure::flag() const {
  switch (kind) {
    case MeasureKind::log_relative_risk:
      return "log-rr";
    case MeasureKind::risk_difference:
      return "rd";
    case MeasureKind::log_hazard_ratio:
      return "log-hr";
  }
  return "log-rr";
}

double back_transform_value(const EffectMeasure& measure, double value) {
  return measure.back_transform() == BackTransform::exp ? std::exp(value) : value;
}

std::optional<StudySummary> summarize_table(const TwoByTwoTable& table,
                                            const EffectMeasure& measure,
                                            std::string* excluded_reason) {
  if (measure.kind == MeasureKind::log_hazard_ratio) {
    throw std::invalid_argument("summarize_table: log-hr cannot be computed from a 2x2 table");
  }
  if (table.n_trt < 1 || table.n_ctl < 1) {
    throw std::invalid_argument("summarize_table: arm sizes must be at least 1");
  }
  if (table.events_trt < 0 || table.events_ctl < 0 || table.events_trt > table.n_trt ||
      table.events_ctl > table.n_ctl) {
    throw std::invalid_argument("summarize_table: event counts must lie in [0, n]");
  }
  if (table.events_trt == 0 && table.events_ctl == 0) {
    if (excluded_reason != nullptr) *excluded_reason = "double-zero";
    return std::nullopt;
  }

  double x1 = static_cast<double>(table.events_trt);
  double n1 = static_cast<double>(table.n_trt);
  double x0 = static_cast<double>(table.events_ctl);
  double n0 = static_cast<double>(table.n_ctl);
  if (table.events_trt == 0 || table.events_ctl == 0) {
    x1 += 0.5;
    n1 += 0.5;
    x0 += 0.5;
    n0 += 0.5;
  }

  StudySummary out;
  out.study_id = table.study_id;
  out.source = SummarySource::raw_table;
  const double p1 = x1 / n1;
  const double p0 = x0 / n0;
  if (measure.kind == MeasureKind::log_relative_risk) {
    out.theta_hat = std::log(p1 / p0);
    out.sigma_hat = std::sqrt(1.0 / x1 - 1.0 / n1 + 1.0 / x0 - 1.0 / n0);
  } else {
    out.theta_hat = p1 - p0;
    out.sigma_hat = std::sqrt(p1 * (1.0 - p1) / n1 + p0 * (1.0 - p0) / n0);
  }
  return out;
}

StudySummary summarize_reported(std::string study_id, double estimate, double ci_lower,
                                double ci_upper, ReportedScale scale,
                                const EffectMeasure& measure, double divisor) {
  if (!(divisor > 0.0)) throw std::invalid_argument("summarize_reported: divisor must be positive");
  if (!(ci_lower < estimate && estimate < ci_upper)) {
    throw std::invalid_argument(
        "summarize_reported: require ci_lower < estimate < ci_upper");
  }
  StudySummary out;
  out.study_id = std::move(study_id);
  out.source = SummarySource::reported_ci;
  if (scale == ReportedScale::ratio) {
    if (!measure.is_ratio()) {
      throw std::invalid_argument(
          "summarize_reported: ratio-scale rows need a ratio measure (log-rr or log-hr)");
    }
    if (!(ci_lower > 0.0)) {
      throw std::invalid_argument("summarize_reported: ratio-scale values must be positive");
    }
    out.theta_hat = std::log(estimate);
    out.sigma_hat = (std::log(ci_upper) - std::log(ci_lower)) / divisor;
  } else {
    out.theta_hat = estimate;
    out.sigma_hat = (ci_upper - ci_lower) / divisor;
  }
  if (!std::isfinite(out.theta_hat) || !std::isfinite(out.sigma_hat)) {
    throw std::invalid_argument("summarize_reported: summary is not finite");
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

double parse_double_field(const std::string& s, long line, const char* name) {
  if (s.empty()) throw ParseError(line, std::string("empty field: ") + name);
  const char* p = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(p, &end);
  if (end != p + s.size()) {
    throw ParseError(line, std::string("cannot parse number for ") + name + ": '" + s + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line, std::string(name) + " must be finite");
  return v;
}

long parse_long_field(const std::string& s, long line, const char* name) {
  if (s.empty()) throw ParseError(line, std::string("empty field: ") + name);
  const char* p = s.c_str();
  char* end = nullptr;
  const long v = std::strtol(p, &end, 10);
  if (end != p + s.size()) {
    throw ParseError(line, std::string("cannot parse integer for ") + name + ": '" + s + "'");
  }
  return v;
}

constexpr const char* kHeaderReported = "study_id,estimate,ci_lower,ci_upper,scale";
constexpr const char* kHeaderTables = "study_id,events_trt,n_trt,events_ctl,n_ctl";

}  // namespace

Dataset parse_dataset(std::istream& in, const EffectMeasure& measure, double ci_divisor) {
  Dataset out;
  out.measure = measure;

  std::string line;
  long line_no = 0;
  bool reported_schema = false;
  bool have_header = false;
  std::unordered_set<std::string> seen_ids;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    if (!have_header) {
      std::string normalized;
      for (const auto& f : split_csv_line(stripped)) {
        if (!normalized.empty()) normalized += ',';
        normalized += f;
      }
      if (normalized == kHeaderReported) {
        reported_schema = true;
      } else if (normalized == kHeaderTables) {
        reported_schema = false;
      } else {
        throw ParseError(line_no, "unrecognized header: '" + stripped + "'");
      }
      have_header = true;
      continue;
    }

    const auto fields = split_csv_line(stripped);
    if (fields.size() != 5) {
      throw ParseError(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
    }
    const std::string& id = fields[0];
    if (id.empty()) throw ParseError(line_no, "empty study_id");
    if (!seen_ids.insert(id).second) {
      throw ParseError(line_no, "duplicate study_id: '" + id + "'");
    }

    try {
      if (reported_schema) {
        const double est = parse_double_field(fields[1], line_no, "estimate");
        const double lo = parse_double_field(fields[2], line_no, "ci_lower");
        const double hi = parse_double_field(fields[3], line_no, "ci_upper");
        ReportedScale scale;
        if (fields[4] == "ratio") {
          scale = ReportedScale::ratio;
        } else if (fields[4] == "analysis") {
          scale = ReportedScale::analysis;
        } else {
          throw ParseError(line_no, "scale must be 'ratio' or 'analysis', got '" + fields[4] + "'");
        }
        out.studies.push_back(
            summarize_reported(id, est, lo, hi, scale, measure, ci_divisor));
      } else {
        TwoByTwoTable t;
        t.study_id = id;
        t.events_trt = parse_long_field(fields[1], line_no, "events_trt");
        t.n_trt = parse_long_field(fields[2], line_no, "n_trt");
        t.events_ctl = parse_long_field(fields[3], line_no, "events_ctl");
        t.n_ctl = parse_long_field(fields[4], line_no, "n_ctl");
        std::string reason;
        if (auto s = summarize_table(t, measure, &reason)) {
          out.studies.push_back(std::move(*s));
        } else {
          out.exclusions.push_back({id, reason});
        }
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }

  if (!have_header) throw ParseError(0, "empty input: missing CSV header");
  if (out.studies.empty()) {
    std::ostringstream msg;
    msg << "no usable studies in dataset";
    if (!out.exclusions.empty()) {
      msg << " (" << out.exclusions.size() << " excluded)";
    }
    throw ParseError(0, msg.str());
  }
  return out;
}

Dataset parse_dataset_file(const std::string& path, const EffectMeasure& measure,
                           double ci_divisor) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open input file: " + path);
  return parse_dataset(in, measure, ci_divisor);
}

}  // namespace pmeta
