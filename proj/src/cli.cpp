#include "pmeta/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmeta/comparators.hpp"
#include "pmeta/config.hpp"
#include "pmeta/effects.hpp"
#include "pmeta/error.hpp"
#include "pmeta/forest.hpp"
#include "pmeta/harness.hpp"
#include "pmeta/inversion.hpp"
#include "pmeta/rng.hpp"

namespace pmeta::cli {

namespace {

std::string fmt_g(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(0, "cannot open output file: " + path);
  out << content;
  out.flush();
  if (!out) throw ParseError(0, "cannot write output file: " + path);
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

struct AnalyzeOpts {
  std::string input;
  std::string out = "-";
  std::string measure;
  std::vector<double> percentiles{0.5};
  double level = 0.95;
  std::vector<std::string> methods{"weighted"};
  std::uint64_t seed = 1;
  long resamples = kDefaultResamples;
  int exact_threshold = kDefaultExactThreshold;
  long grid = 512;
  double refine_tol = 1e-6;
  double ci_divisor = 4.0;
};

struct SimulateOpts {
  std::string spec_path;
  std::string out = "-";
  std::string format = "csv";
};

struct ForestOpts {
  std::string input;
  std::string out;
  std::string measure;
  std::string method = "weighted";
  std::vector<double> percentiles{0.5};
  double level = 0.95;
  std::uint64_t seed = 1;
  long resamples = kDefaultResamples;
  int exact_threshold = kDefaultExactThreshold;
  long grid = 512;
  double refine_tol = 1e-6;
  double ci_divisor = 4.0;
};

// Seed for the (method index, percentile index) cell of an analyze run.
std::uint64_t cell_seed(std::uint64_t base, long mi, long qi) {
  return rng::derive_seed(base, static_cast<std::uint64_t>(mi) * 64 + qi);
}

std::string dataset_provenance(const Dataset& data) {
  std::string out = "# studies: " + std::to_string(data.size());
  if (!data.exclusions.empty()) {
    out += " (excluded: " + std::to_string(data.exclusions.size()) + ")";
  }
  out += "\n";
  for (const auto& ex : data.exclusions) {
    out += "# excluded: " + ex.study_id + " (" + ex.reason + ")\n";
  }
  return out;
}

void cmd_analyze(const AnalyzeOpts& opts) {
  const EffectMeasure measure = EffectMeasure::from_flag(opts.measure);
  std::vector<Method> methods;
  for (const auto& flag : opts.methods) methods.push_back(method_from_flag(flag));
  if (methods.empty()) throw std::invalid_argument("no methods requested");
  if (opts.percentiles.empty()) throw std::invalid_argument("no percentiles requested");

  const Dataset data = parse_dataset_file(opts.input, measure, opts.ci_divisor);
  const double alpha = 1.0 - opts.level;

  std::ostringstream text;
  text << "# pmeta analyze\n";
  text << "# input: " << opts.input << "\n";
  text << "# measure: " << measure.flag() << "\n";
  text << "# level: " << fmt_g(opts.level) << "\n";
  std::vector<std::string> pct_text;
  for (double p : opts.percentiles) pct_text.push_back(fmt_g(p));
  text << "# percentiles: " << join(pct_text, ',') << "\n";
  text << "# methods: " << join(opts.methods, ',') << "\n";
  text << "# seed: " << opts.seed << "\n";
  text << "# resamples: " << opts.resamples << "\n";
  text << "# exact-threshold: " << opts.exact_threshold << "\n";
  text << "# grid: " << opts.grid << "\n";
  text << "# refine-tol: " << fmt_g(opts.refine_tol) << "\n";
  text << "# ci-divisor: " << fmt_g(opts.ci_divisor) << "\n";
  text << dataset_provenance(data);
  text << "method,percentile,level,point,lower,upper,point_bt,lower_bt,upper_bt,"
          "non_interval,grid_points,refinement_evals,seed\n";

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const Method method = methods[mi];
    if (method == Method::dl || method == Method::sj) {
      const MeanInterval iv = method == Method::dl ? dersimonian_laird(data, alpha)
                                                   : sidik_jonkman(data, alpha);
      for (double p : opts.percentiles) {
        text << method_flag(method) << ',' << fmt_g(p) << ',' << fmt_g(opts.level) << ','
             << fmt_g(iv.mean) << ',' << fmt_g(iv.lower) << ',' << fmt_g(iv.upper) << ','
             << fmt_g(back_transform_value(measure, iv.mean)) << ','
             << fmt_g(back_transform_value(measure, iv.lower)) << ','
             << fmt_g(back_transform_value(measure, iv.upper)) << ",0,0,0,0\n";
      }
      continue;
    }
    for (std::size_t qi = 0; qi < opts.percentiles.size(); ++qi) {
      InversionConfig cfg;
      cfg.grid_points = opts.grid;
      cfg.refine_tol = opts.refine_tol;
      cfg.exact_threshold = opts.exact_threshold;
      cfg.n_resamples = opts.resamples;
      cfg.seed = cell_seed(opts.seed, static_cast<long>(mi), static_cast<long>(qi));
      const IntervalResult r =
          invert_ci(data, opts.percentiles[qi], alpha, method, cfg);
      text << method_flag(method) << ',' << fmt_g(r.p) << ',' << fmt_g(r.level) << ','
           << fmt_g(r.point) << ',' << fmt_g(r.lower) << ',' << fmt_g(r.upper) << ','
           << fmt_g(r.point_bt) << ',' << fmt_g(r.lower_bt) << ',' << fmt_g(r.upper_bt)
           << ',' << (r.diagnostics.non_interval ? 1 : 0) << ','
           << r.diagnostics.grid_points << ',' << r.diagnostics.refinement_evals << ','
           << r.diagnostics.seed << "\n";
    }
  }
  write_output(opts.out, text.str());
}

void cmd_simulate(const SimulateOpts& opts) {
  ReportFormat format;
  if (opts.format == "csv") {
    format = ReportFormat::csv;
  } else if (opts.format == "markdown") {
    format = ReportFormat::markdown;
  } else {
    throw std::invalid_argument("unknown format: " + opts.format +
                                " (expected csv or markdown)");
  }
  const ExperimentSpec spec = parse_experiment_spec_file(opts.spec_path);
  const std::vector<CoverageRow> rows = run_experiment(spec);

  std::ostringstream text;
  text << "# pmeta simulate\n";
  text << "# spec: " << opts.spec_path << "\n";
  text << "# scenario: " << spec.scenario.describe() << "\n";
  text << "# K: " << spec.k_studies << "\n";
  text << "# reps: " << spec.reps << "\n";
  text << "# level: " << fmt_g(spec.level) << "\n";
  std::vector<std::string> pct_text;
  for (double p : spec.percentiles) pct_text.push_back(fmt_g(p));
  text << "# percentiles: " << join(pct_text, ',') << "\n";
  std::vector<std::string> method_text;
  for (Method m : spec.methods) method_text.push_back(method_flag(m));
  text << "# methods: " << join(method_text, ',') << "\n";
  text << "# seed: " << spec.base_seed << "\n";
  text << "# resamples: " << spec.n_resamples << "\n";
  text << "# exact-threshold: " << spec.exact_threshold << "\n";
  text << "# grid: " << spec.grid_points << "\n";
  text << "# refine-tol: " << fmt_g(spec.refine_tol) << "\n";
  text << "# oracle-draws: " << spec.oracle_draws << "\n";
  text << "# oracle-seed: " << spec.oracle_seed << "\n";
  for (std::size_t q = 0; q < spec.percentiles.size(); ++q) {
    text << "# truth p=" << fmt_g(spec.percentiles[q]) << ": " << fmt_g(rows[q].truth)
         << "\n";
  }
  text << write_report(rows, format);
  write_output(opts.out, text.str());
}

void cmd_forest(const ForestOpts& opts) {
  const EffectMeasure measure = EffectMeasure::from_flag(opts.measure);
  const Method method = method_from_flag(opts.method);
  if (method != Method::weighted && method != Method::unweighted) {
    throw std::invalid_argument("forest draws percentile intervals: use weighted or unweighted");
  }
  const Dataset data = parse_dataset_file(opts.input, measure, opts.ci_divisor);
  const double alpha = 1.0 - opts.level;

  std::vector<IntervalResult> intervals;
  for (std::size_t qi = 0; qi < opts.percentiles.size(); ++qi) {
    InversionConfig cfg;
    cfg.grid_points = opts.grid;
    cfg.refine_tol = opts.refine_tol;
    cfg.exact_threshold = opts.exact_threshold;
    cfg.n_resamples = opts.resamples;
    cfg.seed = cell_seed(opts.seed, 0, static_cast<long>(qi));
    intervals.push_back(invert_ci(data, opts.percentiles[qi], alpha, method, cfg));
  }
  write_output(opts.out, render_forest(data, intervals));
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Percentile confidence intervals for the random-effects distribution"};
  app.require_subcommand(1);

  AnalyzeOpts analyze;
  CLI::App* cmd_a = app.add_subcommand(
      "analyze", "Percentile confidence intervals for a CSV dataset");
  cmd_a->add_option("--input", analyze.input, "Dataset CSV")->required();
  cmd_a->add_option("--measure", analyze.measure, "Effect measure: log-rr, rd, log-hr")
      ->required();
  cmd_a->add_option("--percentile", analyze.percentiles, "Percentile levels in (0,1)")
      ->delimiter(',')
      ->capture_default_str();
  cmd_a->add_option("--level", analyze.level, "Confidence level")->capture_default_str();
  cmd_a->add_option("--method", analyze.methods,
                    "Methods: weighted, unweighted, dl, sj")
      ->delimiter(',')
      ->capture_default_str();
  cmd_a->add_option("--seed", analyze.seed, "Base seed")->capture_default_str();
  cmd_a->add_option("--resamples", analyze.resamples, "Monte Carlo resamples")
      ->capture_default_str();
  cmd_a->add_option("--exact-threshold", analyze.exact_threshold,
                    "Largest study count for exact enumeration")
      ->capture_default_str();
  cmd_a->add_option("--grid", analyze.grid, "Scan grid points")->capture_default_str();
  cmd_a->add_option("--refine-tol", analyze.refine_tol, "Endpoint bisection tolerance")
      ->capture_default_str();
  cmd_a->add_option("--ci-divisor", analyze.ci_divisor,
                    "CI width to standard error divisor for reported intervals")
      ->capture_default_str();
  cmd_a->add_option("--out", analyze.out, "Results CSV path ('-' for stdout)")
      ->capture_default_str();
  cmd_a->callback([&analyze] { cmd_analyze(analyze); });

  SimulateOpts simulate;
  CLI::App* cmd_s =
      app.add_subcommand("simulate", "Coverage experiment from a spec file");
  cmd_s->add_option("--spec", simulate.spec_path, "Experiment spec file")->required();
  cmd_s->add_option("--out", simulate.out, "Report path ('-' for stdout)")
      ->capture_default_str();
  cmd_s->add_option("--format", simulate.format, "Report format: csv or markdown")
      ->capture_default_str();
  cmd_s->callback([&simulate] { cmd_simulate(simulate); });

  ForestOpts forest;
  CLI::App* cmd_f = app.add_subcommand("forest", "SVG forest plot for a CSV dataset");
  cmd_f->add_option("--input", forest.input, "Dataset CSV")->required();
  cmd_f->add_option("--measure", forest.measure, "Effect measure: log-rr, rd, log-hr")
      ->required();
  cmd_f->add_option("--out", forest.out, "SVG output path")->required();
  cmd_f->add_option("--percentile", forest.percentiles, "Percentile levels in (0,1)")
      ->delimiter(',')
      ->capture_default_str();
  cmd_f->add_option("--level", forest.level, "Confidence level")->capture_default_str();
  cmd_f->add_option("--method", forest.method, "weighted or unweighted")
      ->capture_default_str();
  cmd_f->add_option("--seed", forest.seed, "Base seed")->capture_default_str();
  cmd_f->add_option("--resamples", forest.resamples, "Monte Carlo resamples")
      ->capture_default_str();
  cmd_f->add_option("--exact-threshold", forest.exact_threshold,
                    "Largest study count for exact enumeration")
      ->capture_default_str();
  cmd_f->add_option("--grid", forest.grid, "Scan grid points")->capture_default_str();
  cmd_f->add_option("--refine-tol", forest.refine_tol, "Endpoint bisection tolerance")
      ->capture_default_str();
  cmd_f->add_option("--ci-divisor", forest.ci_divisor,
                    "CI width to standard error divisor for reported intervals")
      ->capture_default_str();
  cmd_f->callback([&forest] { cmd_forest(forest); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const pmeta::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace pmeta::cli
