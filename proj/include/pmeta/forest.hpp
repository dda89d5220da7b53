#pragma once

#include <string>
#include <vector>

#include "pmeta/effects.hpp"
#include "pmeta/inversion.hpp"

namespace pmeta {

// Renders a self-contained SVG forest plot: one row per study showing the
// point estimate with a 95% Wald whisker, then one diamond row per percentile
// interval.  Ratio measures are drawn on a log axis with back-transformed
// tick labels; infinite interval endpoints are clamped to the plotted range.
// Output is a pure function of the inputs (no timestamps, no randomness).
std::string render_forest(const Dataset& data, const std::vector<IntervalResult>& intervals);

}  // namespace pmeta
