#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pmeta/harness.hpp"

using namespace pmeta;

namespace {

ExperimentSpec small_fixed_spec() {
  ExperimentSpec spec;
  spec.scenario.kind = ScenarioKind::fixed;
  spec.scenario.rate_ctl = 0.1;
  spec.scenario.rate_trt = 0.2;
  spec.scenario.measure = EffectMeasure{MeasureKind::log_relative_risk};
  spec.scenario.sample_sizes = {200};
  spec.k_studies = 8;
  spec.reps = 12;
  spec.percentiles = {0.5};
  spec.methods = {Method::weighted, Method::unweighted, Method::dl, Method::sj};
  spec.base_seed = 101;
  spec.n_resamples = 4000;
  spec.exact_threshold = 12;
  return spec;
}

bool rows_equal(const std::vector<CoverageRow>& a, const std::vector<CoverageRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool ml_same = (std::isnan(a[i].ml) && std::isnan(b[i].ml)) || a[i].ml == b[i].ml;
    if (a[i].method != b[i].method || a[i].p != b[i].p || a[i].k_studies != b[i].k_studies ||
        a[i].ecl != b[i].ecl || !ml_same || a[i].reps_used != b[i].reps_used ||
        a[i].truth != b[i].truth) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("a single replication yields a 0/1 coverage indicator") {
  auto spec = small_fixed_spec();
  spec.reps = 1;
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK((row.ecl == 0.0 || row.ecl == 1.0));
    CHECK(row.reps_used == 1);
    CHECK(row.truth == std::log(2.0));
  }
}

TEST_CASE("parallel and serial experiment runs agree exactly") {
  const auto spec = small_fixed_spec();
  const auto par = run_experiment(spec);
  const auto ser = run_experiment_serial(spec);
  CHECK(rows_equal(par, ser));
}

TEST_CASE("runs are repeatable and seed-sensitive") {
  const auto spec = small_fixed_spec();
  const auto a = run_experiment(spec);
  const auto b = run_experiment(spec);
  CHECK(rows_equal(a, b));

  auto other = spec;
  other.base_seed = 102;
  const auto c = run_experiment(other);
  CHECK_FALSE(rows_equal(a, c));
}

TEST_CASE("permuting the replication seeds leaves the aggregates unchanged") {
  auto spec = small_fixed_spec();
  spec.reps = 6;
  spec.rep_seeds = {11, 12, 13, 14, 15, 16};
  const auto base = run_experiment(spec);

  auto permuted = spec;
  permuted.rep_seeds = {14, 11, 16, 12, 15, 13};
  const auto shuffled = run_experiment(permuted);
  CHECK(rows_equal(base, shuffled));
}

TEST_CASE("rows come out grouped by method, percentiles in spec order") {
  auto spec = small_fixed_spec();
  spec.reps = 2;
  spec.percentiles = {0.25, 0.75};
  spec.methods = {Method::unweighted, Method::weighted};
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].method == Method::unweighted);
  CHECK(rows[0].p == 0.25);
  CHECK(rows[1].method == Method::unweighted);
  CHECK(rows[1].p == 0.75);
  CHECK(rows[2].method == Method::weighted);
  CHECK(rows[2].p == 0.25);
  CHECK(rows[3].method == Method::weighted);
  CHECK(rows[3].p == 0.75);
  for (const auto& row : rows) CHECK(row.k_studies == 8);
}

TEST_CASE("fixed-scenario coverage looks like the nominal level on a short run") {
  auto spec = small_fixed_spec();
  spec.reps = 40;
  const auto rows = run_experiment(spec);
  for (const auto& row : rows) {
    CHECK(row.reps_used == 40);
    CHECK(row.ecl >= 0.0);
    CHECK(row.ecl <= 1.0);
    if (row.method == Method::weighted) CHECK(row.ecl >= 0.75);
    if (!std::isnan(row.ml)) CHECK(row.ml >= 0.0);
  }
  const auto find_ml = [&](Method m) {
    for (const auto& row : rows) {
      if (row.method == m) return row.ml;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK(find_ml(Method::weighted) < find_ml(Method::unweighted));
}

TEST_CASE("spec validation rejects inconsistent settings") {
  auto bad_pct = small_fixed_spec();
  bad_pct.percentiles = {1.5};
  CHECK_THROWS_AS(run_experiment(bad_pct), std::invalid_argument);

  auto no_methods = small_fixed_spec();
  no_methods.methods = {};
  CHECK_THROWS_AS(run_experiment(no_methods), std::invalid_argument);

  auto bad_seeds = small_fixed_spec();
  bad_seeds.rep_seeds = {1, 2};
  CHECK_THROWS_AS(run_experiment(bad_seeds), std::invalid_argument);

  auto tiny_k = small_fixed_spec();
  tiny_k.k_studies = 1;
  CHECK_THROWS_AS(run_experiment(tiny_k), std::invalid_argument);
  tiny_k.methods = {Method::weighted, Method::unweighted};
  CHECK_NOTHROW(run_experiment_serial([&] {
    auto ok = tiny_k;
    ok.reps = 2;
    return ok;
  }()));

  auto bad_grid = small_fixed_spec();
  bad_grid.grid_points = 1;
  CHECK_THROWS_AS(run_experiment(bad_grid), std::invalid_argument);
}

TEST_CASE("reports render both formats with the fixed column order") {
  CoverageRow row;
  row.method = Method::weighted;
  row.p = 0.5;
  row.k_studies = 10;
  row.ecl = 0.9625;
  row.ml = 1.23456789;
  row.reps_used = 40;
  CoverageRow nan_row = row;
  nan_row.method = Method::dl;
  nan_row.ml = std::numeric_limits<double>::quiet_NaN();
  nan_row.ecl = 0.0;
  const std::vector<CoverageRow> rows{row, nan_row};

  const std::string csv = write_report(rows, ReportFormat::csv);
  CHECK(csv ==
        "method,p,K,ECL,ML,reps\n"
        "weighted,0.5,10,0.962500,1.234568,40\n"
        "dl,0.5,10,0.000000,nan,40\n");

  const std::string md = write_report(rows, ReportFormat::markdown);
  CHECK(md ==
        "| method | p | K | ECL | ML | reps |\n"
        "|---|---|---|---|---|---|\n"
        "| weighted | 0.5 | 10 | 96% | 1.23 | 40 |\n"
        "| dl | 0.5 | 10 | 0% | nan | 40 |\n");
}

TEST_CASE("infinite median lengths are spelled out in reports") {
  CoverageRow row;
  row.method = Method::unweighted;
  row.p = 0.5;
  row.k_studies = 5;
  row.ecl = 1.0;
  row.ml = std::numeric_limits<double>::infinity();
  row.reps_used = 3;
  const std::vector<CoverageRow> rows{row};
  const std::string csv = write_report(rows, ReportFormat::csv);
  CHECK(csv.find("unweighted,0.5,5,1.000000,inf,3") != std::string::npos);
}
