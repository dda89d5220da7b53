#include "pmeta/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace pmeta {

namespace {

constexpr double kWidth = 800.0;
constexpr double kRowHeight = 40.0;
constexpr double kPlotLeft = 210.0;
constexpr double kPlotRight = 770.0;
constexpr double kTopPad = 60.0;
constexpr double kWaldZ = 1.959963984540054;  // 97.5% normal quantile

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string gnum(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

const char* axis_label(const EffectMeasure& m) {
  switch (m.kind) {
    case MeasureKind::log_relative_risk:
      return "relative risk (log scale)";
    case MeasureKind::log_hazard_ratio:
      return "hazard ratio (log scale)";
    case MeasureKind::risk_difference:
      return "risk difference";
  }
  return "";
}

// Tick positions on the analysis scale.  Ratio measures get 1-2-5 decade
// ticks of the back-transformed value; the risk difference gets plain linear
// ticks.
std::vector<double> make_ticks(const EffectMeasure& m, double lo, double hi) {
  std::vector<double> ticks;
  if (m.is_ratio()) {
    static constexpr double kMant[] = {1.0, 2.0, 5.0};
    for (int e = -8; e <= 8; ++e) {
      for (double mant : kMant) {
        const double v = mant * std::pow(10.0, e);
        const double x = std::log(v);
        if (x >= lo && x <= hi) ticks.push_back(x);
      }
    }
  } else {
    const double span = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(span / 6.0)));
    if (span / (2.0 * step) >= 6.0) {
      step *= 5.0;
    } else if (span / step >= 6.0) {
      step *= 2.0;
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
      ticks.push_back(v);
    }
  }
  return ticks;
}

}  // namespace

std::string render_forest(const Dataset& data, const std::vector<IntervalResult>& intervals) {
  if (data.size() < 1) throw std::invalid_argument("render_forest: dataset is empty");

  // Analysis-scale extent of everything drawn.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : data.studies) {
    lo = std::min(lo, s.theta_hat - kWaldZ * s.sigma_hat);
    hi = std::max(hi, s.theta_hat + kWaldZ * s.sigma_hat);
  }
  for (const auto& ci : intervals) {
    if (std::isfinite(ci.lower)) lo = std::min(lo, ci.lower);
    if (std::isfinite(ci.upper)) hi = std::max(hi, ci.upper);
    lo = std::min(lo, ci.point);
    hi = std::max(hi, ci.point);
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const auto xpos = [&](double v) {
    const double clamped = std::clamp(v, lo, hi);
    return kPlotLeft + (clamped - lo) / (hi - lo) * (kPlotRight - kPlotLeft);
  };

  const long n_rows = data.size() + static_cast<long>(intervals.size());
  const double height = kRowHeight * static_cast<double>(n_rows) + 120.0;
  const double axis_y = kTopPad + kRowHeight * static_cast<double>(n_rows) + 10.0;

  std::string svg;
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                "viewBox=\"0 0 %g %g\">\n",
                kWidth, height, kWidth, height);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"20\" y=\"30\" font-family=\"sans-serif\" font-size=\"18\" "
         "fill=\"black\">Forest plot</text>\n";

  // Reference line at no effect (ratio 1 or difference 0).
  if (lo < 0.0 && hi > 0.0) {
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%s\" y1=\"%s\" x2=\"%s\" y2=\"%s\" stroke=\"#999999\" "
                  "stroke-dasharray=\"4 3\"/>\n",
                  num(xpos(0.0)).c_str(), num(kTopPad - 10.0).c_str(),
                  num(xpos(0.0)).c_str(), num(axis_y).c_str());
    svg += buf;
  }

  double y = kTopPad;
  for (const auto& s : data.studies) {
    const double cy = y + 0.5 * kRowHeight;
    const double wl = xpos(s.theta_hat - kWaldZ * s.sigma_hat);
    const double wr = xpos(s.theta_hat + kWaldZ * s.sigma_hat);
    const double cx = xpos(s.theta_hat);
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"20\" y=\"%s\" font-family=\"sans-serif\" font-size=\"13\" "
                  "fill=\"black\" dominant-baseline=\"middle\">%s</text>\n",
                  num(cy).c_str(), xml_escape(s.study_id).c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%s\" y1=\"%s\" x2=\"%s\" y2=\"%s\" stroke=\"black\" "
                  "stroke-width=\"1.5\"/>\n",
                  num(wl).c_str(), num(cy).c_str(), num(wr).c_str(), num(cy).c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%s\" y=\"%s\" width=\"9\" height=\"9\" fill=\"black\"/>\n",
                  num(cx - 4.5).c_str(), num(cy - 4.5).c_str());
    svg += buf;
    y += kRowHeight;
  }

  for (const auto& ci : intervals) {
    const double cy = y + 0.5 * kRowHeight;
    const double xl = xpos(std::isfinite(ci.lower) ? ci.lower : lo);
    const double xr = xpos(std::isfinite(ci.upper) ? ci.upper : hi);
    const double xc = xpos(ci.point);
    std::string label = "p=" + gnum(ci.p) + " (" + method_flag(ci.method) + ")";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"20\" y=\"%s\" font-family=\"sans-serif\" font-size=\"13\" "
                  "fill=\"#1f4e8c\" dominant-baseline=\"middle\">%s</text>\n",
                  num(cy).c_str(), xml_escape(label).c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<polygon points=\"%s,%s %s,%s %s,%s %s,%s\" fill=\"#1f4e8c\"/>\n",
                  num(xl).c_str(), num(cy).c_str(), num(xc).c_str(), num(cy - 9.0).c_str(),
                  num(xr).c_str(), num(cy).c_str(), num(xc).c_str(), num(cy + 9.0).c_str());
    svg += buf;
    y += kRowHeight;
  }

  // Axis with back-transformed tick labels.
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%s\" y1=\"%s\" x2=\"%s\" y2=\"%s\" stroke=\"black\"/>\n",
                num(kPlotLeft).c_str(), num(axis_y).c_str(), num(kPlotRight).c_str(),
                num(axis_y).c_str());
  svg += buf;
  for (double t : make_ticks(data.measure, lo, hi)) {
    const double x = xpos(t);
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%s\" y1=\"%s\" x2=\"%s\" y2=\"%s\" stroke=\"black\"/>\n",
                  num(x).c_str(), num(axis_y).c_str(), num(x).c_str(), num(axis_y + 6.0).c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%s\" y=\"%s\" font-family=\"sans-serif\" font-size=\"12\" "
                  "fill=\"black\" text-anchor=\"middle\">%s</text>\n",
                  num(x).c_str(), num(axis_y + 20.0).c_str(),
                  gnum(back_transform_value(data.measure, t)).c_str());
    svg += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%s\" y=\"%s\" font-family=\"sans-serif\" font-size=\"13\" "
                "fill=\"black\" text-anchor=\"middle\">%s</text>\n",
                num(0.5 * (kPlotLeft + kPlotRight)).c_str(), num(axis_y + 42.0).c_str(),
                axis_label(data.measure));
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

}  // namespace pmeta
