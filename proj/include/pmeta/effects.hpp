#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmeta/error.hpp"

// Effect measures and per-study summaries.  A study enters the analysis as a
// point estimate theta_hat on the analysis scale together with a standard
// error sigma_hat; this module produces those pairs from raw 2x2 tables or
// from reported confidence intervals, and parses whole CSV datasets.

namespace pmeta {

enum class MeasureKind { log_relative_risk, risk_difference, log_hazard_ratio };

enum class BackTransform { exp, identity };

struct EffectMeasure {
  MeasureKind kind = MeasureKind::log_relative_risk;

  BackTransform back_transform() const {
    return kind == MeasureKind::risk_difference ? BackTransform::identity
                                                : BackTransform::exp;
  }
  bool is_ratio() const { return back_transform() == BackTransform::exp; }

  // Flag spelling used by the CLI and config files: log-rr, rd, log-hr.
  static EffectMeasure from_flag(std::string_view flag);
  const char* flag() const;
};

// Maps an analysis-scale value to the reporting scale of the measure.
double back_transform_value(const EffectMeasure& measure, double value);

enum class SummarySource { raw_table, reported_ci, direct };

struct StudySummary {
  std::string study_id;
  double theta_hat = 0.0;
  double sigma_hat = 0.0;
  SummarySource source = SummarySource::direct;
};

struct TwoByTwoTable {
  std::string study_id;
  long events_trt = 0;
  long n_trt = 0;
  long events_ctl = 0;
  long n_ctl = 0;
};

struct Exclusion {
  std::string study_id;
  std::string reason;
};

struct Dataset {
  std::vector<StudySummary> studies;
  EffectMeasure measure;
  std::vector<Exclusion> exclusions;

  long size() const { return static_cast<long>(studies.size()); }
};

// Summarizes one 2x2 table.  When exactly one of the two event counts is
// zero, 0.5 is added to all four entries before computing; when both are
// zero the study carries no information about the measure and nullopt is
// returned with reason "double-zero".  Only log-rr and rd can be computed
// from a table.
std::optional<StudySummary> summarize_table(const TwoByTwoTable& table,
                                            const EffectMeasure& measure,
                                            std::string* excluded_reason = nullptr);

enum class ReportedScale { ratio, analysis };

// Summarizes a reported estimate with a confidence interval.  For ratio-scale
// input the triple is log-transformed first; the standard error is the CI
// width on the analysis scale divided by `divisor` (4 corresponds to a
// symmetric 95% normal interval).
StudySummary summarize_reported(std::string study_id, double estimate, double ci_lower,
                                double ci_upper, ReportedScale scale,
                                const EffectMeasure& measure, double divisor = 4.0);

// Parses a CSV dataset.  Two schemas are recognized by their exact header:
//   study_id,estimate,ci_lower,ci_upper,scale        (reported summaries)
//   study_id,events_trt,n_trt,events_ctl,n_ctl       (raw 2x2 tables)
// Throws ParseError (with a line number) on malformed input, unknown headers,
// duplicate study ids, or when no usable study remains after exclusions.
Dataset parse_dataset(std::istream& in, const EffectMeasure& measure,
                      double ci_divisor = 4.0);
Dataset parse_dataset_file(const std::string& path, const EffectMeasure& measure,
                           double ci_divisor = 4.0);

}  // namespace pmeta
