#include "pmeta/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "pmeta/comparators.hpp"
#include "pmeta/rng.hpp"

namespace pmeta {

void ExperimentSpec::validate() const {
  scenario.validate(k_studies);
  if (k_studies < 1) throw std::invalid_argument("experiment: K must be at least 1");
  if (reps < 1) throw std::invalid_argument("experiment: reps must be at least 1");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("experiment: level must lie strictly in (0,1)");
  }
  if (percentiles.empty()) throw std::invalid_argument("experiment: no percentiles");
  for (double p : percentiles) {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::invalid_argument("experiment: percentiles must lie strictly in (0,1)");
    }
  }
  if (methods.empty()) throw std::invalid_argument("experiment: no methods");
  for (const Method m : methods) {
    if ((m == Method::dl || m == Method::sj) && k_studies < 2) {
      throw std::invalid_argument("experiment: dl and sj need K >= 2");
    }
  }
  if (n_resamples < 1) throw std::invalid_argument("experiment: resamples must be positive");
  if (grid_points < 2) throw std::invalid_argument("experiment: grid must be at least 2");
  if (!rep_seeds.empty() && static_cast<long>(rep_seeds.size()) != reps) {
    throw std::invalid_argument("experiment: rep_seeds must have one seed per rep");
  }
}

namespace {

// Salt separating the per-(method, percentile) interval seeds derived from a
// replication seed.
constexpr std::uint64_t kCiSeedSalt = 1000;

struct RepCell {
  unsigned char used = 0;
  unsigned char covered = 0;
  double length = 0.0;
  bool finite = false;
};

std::vector<CoverageRow> run_impl(const ExperimentSpec& spec, bool parallel) {
  spec.validate();
  const long n_methods = static_cast<long>(spec.methods.size());
  const long n_pcts = static_cast<long>(spec.percentiles.size());
  const double alpha = 1.0 - spec.level;

  std::vector<double> truths(n_pcts);
  for (long q = 0; q < n_pcts; ++q) {
    truths[q] = true_percentile(spec.scenario, spec.percentiles[q], spec.oracle_draws,
                                spec.oracle_seed);
  }

  const long cells_per_rep = n_methods * n_pcts;
  std::vector<RepCell> cells(static_cast<std::size_t>(spec.reps) * cells_per_rep);

  const auto run_rep = [&](long r) {
    const std::uint64_t rep_seed = spec.rep_seeds.empty()
                                       ? rng::derive_seed(spec.base_seed, r)
                                       : spec.rep_seeds[static_cast<std::size_t>(r)];
    const SimulatedMeta meta = draw_meta(spec.scenario, spec.k_studies, rep_seed);
    Dataset data;
    data.measure = spec.scenario.measure;
    for (const auto& t : meta.tables) {
      std::string reason;
      if (auto s = summarize_table(t, spec.scenario.measure, &reason)) {
        data.studies.push_back(std::move(*s));
      } else {
        data.exclusions.push_back({t.study_id, reason});
      }
    }
    const long k_eff = data.size();
    bool all_positive_se = k_eff > 0;
    for (const auto& s : data.studies) {
      all_positive_se = all_positive_se && s.sigma_hat > 0.0;
    }

    RepCell* rep_cells = cells.data() + static_cast<std::size_t>(r) * cells_per_rep;
    for (long m = 0; m < n_methods; ++m) {
      const Method method = spec.methods[m];
      if (method == Method::dl || method == Method::sj) {
        if (k_eff < 2 || (method == Method::dl && !all_positive_se)) continue;
        const MeanInterval mi = method == Method::dl ? dersimonian_laird(data, alpha)
                                                     : sidik_jonkman(data, alpha);
        for (long q = 0; q < n_pcts; ++q) {
          RepCell& cell = rep_cells[m * n_pcts + q];
          cell.used = 1;
          cell.covered = mi.lower <= truths[q] && truths[q] <= mi.upper ? 1 : 0;
          cell.length = mi.upper - mi.lower;
          cell.finite = std::isfinite(cell.length);
        }
        continue;
      }
      if (k_eff < 1) continue;
      for (long q = 0; q < n_pcts; ++q) {
        InversionConfig cfg;
        cfg.grid_points = spec.grid_points;
        cfg.refine_tol = spec.refine_tol;
        cfg.exact_threshold = spec.exact_threshold;
        cfg.n_resamples = spec.n_resamples;
        cfg.seed = rng::derive_seed(rep_seed, kCiSeedSalt + m * 64 + q);
        const IntervalResult res =
            invert_ci(data, spec.percentiles[q], alpha, method, cfg);
        RepCell& cell = rep_cells[m * n_pcts + q];
        cell.used = 1;
        cell.covered = res.lower <= truths[q] && truths[q] <= res.upper ? 1 : 0;
        cell.length = res.upper - res.lower;
        cell.finite = std::isfinite(cell.length);
      }
    }
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long r = 0; r < spec.reps; ++r) run_rep(r);
  } else {
    for (long r = 0; r < spec.reps; ++r) run_rep(r);
  }

  std::vector<CoverageRow> rows;
  rows.reserve(static_cast<std::size_t>(cells_per_rep));
  std::vector<double> lengths;
  for (long m = 0; m < n_methods; ++m) {
    for (long q = 0; q < n_pcts; ++q) {
      CoverageRow row;
      row.method = spec.methods[m];
      row.p = spec.percentiles[q];
      row.k_studies = spec.k_studies;
      row.truth = truths[q];
      long used = 0;
      long covered = 0;
      lengths.clear();
      for (long r = 0; r < spec.reps; ++r) {
        const RepCell& cell = cells[static_cast<std::size_t>(r) * cells_per_rep + m * n_pcts + q];
        if (!cell.used) continue;
        ++used;
        covered += cell.covered;
        if (cell.finite) lengths.push_back(cell.length);
      }
      row.reps_used = used;
      row.ecl = used > 0 ? static_cast<double>(covered) / static_cast<double>(used) : 0.0;
      if (lengths.empty()) {
        row.ml = std::numeric_limits<double>::quiet_NaN();
      } else {
        std::sort(lengths.begin(), lengths.end());
        const std::size_t n = lengths.size();
        row.ml = n % 2 == 1 ? lengths[n / 2]
                            : 0.5 * (lengths[n / 2 - 1] + lengths[n / 2]);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string fmt_stat(double v, const char* spec_finite) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec_finite, v);
  return buf;
}

}  // namespace

std::vector<CoverageRow> run_experiment(const ExperimentSpec& spec) {
  return run_impl(spec, true);
}

std::vector<CoverageRow> run_experiment_serial(const ExperimentSpec& spec) {
  return run_impl(spec, false);
}

std::string write_report(std::span<const CoverageRow> rows, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::csv) {
    out += "method,p,K,ECL,ML,reps\n";
    for (const auto& row : rows) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s,%.12g,%ld,%.6f,", method_flag(row.method), row.p,
                    row.k_studies, row.ecl);
      out += buf;
      out += fmt_stat(row.ml, "%.6f");
      std::snprintf(buf, sizeof(buf), ",%ld\n", row.reps_used);
      out += buf;
    }
    return out;
  }
  out += "| method | p | K | ECL | ML | reps |\n";
  out += "|---|---|---|---|---|---|\n";
  for (const auto& row : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "| %s | %.12g | %ld | %.0f%% | ", method_flag(row.method),
                  row.p, row.k_studies, 100.0 * row.ecl);
    out += buf;
    out += fmt_stat(row.ml, "%.2f");
    std::snprintf(buf, sizeof(buf), " | %ld |\n", row.reps_used);
    out += buf;
  }
  return out;
}

}  // namespace pmeta
