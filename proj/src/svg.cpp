#include "sagnac/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace sagnac {

namespace {

std::string fmt(double v, int precision = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// "Nice" tick positions covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return ticks;
}

class Canvas {
 public:
  static constexpr double kWidth = 720.0;
  static constexpr double kHeight = 460.0;
  static constexpr double kLeft = 80.0, kRight = 20.0, kTop = 40.0, kBottom = 60.0;

  Canvas(double x0, double x1, double y0, double y1, bool log_x = false)
      : log_x_(log_x), x0_(tx(x0)), x1_(tx(x1)), y0_(y0), y1_(y1) {
    if (x1_ == x0_) x1_ = x0_ + 1.0;
    if (y1_ == y0_) y1_ = y0_ + 1.0;
  }

  double px(double x) const { return kLeft + (tx(x) - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }

  void axes(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
    const double bottom = kHeight - kBottom;
    const double right = kWidth - kRight;
    body_ << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(right - kLeft)
          << "\" height=\"" << fmt(bottom - kTop) << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (log_x_) {
      for (double e = std::ceil(x0_); e <= x1_ + 1e-9; e += 1.0) {
        const double x = std::pow(10.0, e);
        xtick(x, "1e" + tick_label(e));
      }
    } else {
      for (double t : nice_ticks(x0_, x1_)) xtick(t, tick_label(t));
    }
    for (double t : nice_ticks(y0_, y1_)) {
      const double y = py(t);
      body_ << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft)
            << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
      text(kLeft - 8, y + 4, tick_label(t), "end", 11);
    }
    text(kWidth / 2, 24, title, "middle", 15);
    text(kWidth / 2, kHeight - 18, xlabel, "middle", 13);
    body_ << "<text x=\"18\" y=\"" << fmt(kHeight / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
          << "transform=\"rotate(-90 18 " << fmt(kHeight / 2) << ")\">" << ylabel << "</text>\n";
  }

  void polyline(std::span<const double> xs, std::span<const double> ys, const std::string& color) {
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < xs.size(); ++k) {
      body_ << (k ? " " : "") << fmt(px(xs[k])) << ',' << fmt(py(ys[k]));
    }
    body_ << "\"/>\n";
  }

  void marker(double x, double y, double err, const std::string& color) {
    if (err > 0.0) {
      body_ << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << fmt(py(y - err)) << "\" x2=\"" << fmt(px(x))
            << "\" y2=\"" << fmt(py(y + err)) << "\" stroke=\"" << color << "\"/>\n";
    }
    body_ << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"2.5\" fill=\"" << color
          << "\"/>\n";
  }

  void box(double xa, double ya, double xb, double yb, const std::string& fill, const std::string& stroke) {
    const double left = std::min(px(xa), px(xb));
    const double top = std::min(py(ya), py(yb));
    body_ << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\""
          << fmt(std::abs(px(xb) - px(xa))) << "\" height=\"" << fmt(std::abs(py(yb) - py(ya)))
          << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, const char* anchor = "start", int size = 12) {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" text-anchor=\"" << anchor
          << "\" font-size=\"" << size << "\">" << s << "</text>\n";
  }

  std::string str() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth, 0) << "\" height=\""
        << fmt(kHeight, 0) << "\" viewBox=\"0 0 " << fmt(kWidth, 0) << ' ' << fmt(kHeight, 0)
        << "\" font-family=\"sans-serif\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  double tx(double x) const { return log_x_ ? std::log10(x) : x; }

  void xtick(double x, const std::string& label) {
    const double bottom = kHeight - kBottom;
    body_ << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << fmt(bottom) << "\" x2=\"" << fmt(px(x))
          << "\" y2=\"" << fmt(bottom + 5) << "\" stroke=\"black\"/>\n";
    text(px(x), bottom + 18, label, "middle", 11);
  }

  bool log_x_;
  double x0_, x1_, y0_, y1_;
  std::ostringstream body_;
};

std::pair<double, double> padded(double lo, double hi, double frac = 0.05) {
  const double pad = (hi > lo ? hi - lo : std::max(std::abs(lo), 1.0)) * frac;
  return {lo - pad, hi + pad};
}

}  // namespace

std::string plot_fringe(const NormalizedFringe& fringe, const FitResult& fit) {
  if (fringe.points.empty()) throw std::invalid_argument("plot_fringe: no points");
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_hi = 0.0;
  for (const auto& p : fringe.points) {
    x_lo = std::min(x_lo, p.signal_wavelength * 1e9);
    x_hi = std::max(x_hi, p.signal_wavelength * 1e9);
    y_hi = std::max(y_hi, p.value + p.sigma);
  }
  const auto [xa, xb] = padded(x_lo, x_hi, 0.02);
  Canvas c(xa, xb, 0.0, std::max(y_hi, fit.amplitude) * 1.08);
  c.axes("Normalized coincidences", "signal wavelength (nm)", "normalized rate");

  const SpectralPoint pump = SpectralPoint::from_wavelength(fringe.pump_wavelength);
  std::vector<double> xs, ys;
  constexpr int kSamples = 600;
  for (int k = 0; k <= kSamples; ++k) {
    const double lambda_nm = x_lo + (x_hi - x_lo) * k / kSamples;
    const double dw = detuning(SpectralPoint::from_wavelength(lambda_nm * 1e-9), pump);
    xs.push_back(lambda_nm);
    ys.push_back(fringe_model({fit.beta2, fit.phi_off, fit.visibility, fit.amplitude}, dw, fit.length));
  }
  for (const auto& p : fringe.points) c.marker(p.signal_wavelength * 1e9, p.value, p.sigma, "#1f77b4");
  c.polyline(xs, ys, "#d62728");
  char label[160];
  std::snprintf(label, sizeof label, "D = %.5f +/- %.5f ps/(nm km), V = %.3f", fit.d_value, fit.d_sigma(),
                fit.visibility);
  c.text(Canvas::kLeft + 10, Canvas::kTop + 18, label);
  return c.str();
}

std::string plot_histogram(const Histogram& hist, double mean, double std_dev, std::size_t n) {
  if (hist.counts.empty()) throw std::invalid_argument("plot_histogram: no bins");
  const std::size_t peak = *std::max_element(hist.counts.begin(), hist.counts.end());
  const double width = hist.edges[1] - hist.edges[0];
  const double pdf_peak =
      std_dev > 0.0 ? static_cast<double>(n) * width / (std_dev * std::sqrt(2.0 * std::numbers::pi)) : 0.0;
  const auto [xa, xb] = padded(hist.edges.front(), hist.edges.back());
  Canvas c(xa, xb, 0.0, std::max<double>(static_cast<double>(peak), pdf_peak) * 1.1);
  c.axes("Distribution of fitted D", "D (ps/(nm km))", "runs");
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    c.box(hist.edges[k], 0.0, hist.edges[k + 1], static_cast<double>(hist.counts[k]), "#9ecae1", "#3182bd");
  }
  if (std_dev > 0.0) {
    std::vector<double> xs, ys;
    constexpr int kSamples = 300;
    for (int k = 0; k <= kSamples; ++k) {
      const double x = xa + (xb - xa) * k / kSamples;
      const double z = (x - mean) / std_dev;
      xs.push_back(x);
      ys.push_back(pdf_peak * std::exp(-0.5 * z * z));
    }
    c.polyline(xs, ys, "#d62728");
  }
  char label[160];
  std::snprintf(label, sizeof label, "mean = %.5f, std = %.2e, n = %zu", mean, std_dev, n);
  c.text(Canvas::kLeft + 10, Canvas::kTop + 18, label);
  return c.str();
}

std::string plot_sweep(const TodResult& tod) {
  if (tod.per_point.empty()) throw std::invalid_argument("plot_sweep: no points");
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& [pump, fit] : tod.per_point) {
    const double s = std::isfinite(fit.d_sigma()) ? fit.d_sigma() : 0.0;
    x_lo = std::min(x_lo, pump * 1e9);
    x_hi = std::max(x_hi, pump * 1e9);
    y_lo = std::min(y_lo, fit.d_value - s);
    y_hi = std::max(y_hi, fit.d_value + s);
  }
  const auto [xa, xb] = padded(x_lo, x_hi, 0.1);
  const auto [ya, yb] = padded(y_lo, y_hi, 0.15);
  Canvas c(xa, xb, ya, yb);
  c.axes("Dispersion versus pump wavelength", "pump wavelength (nm)", "D (ps/(nm km))");
  const double ref_nm = tod.reference_wavelength * 1e9;
  const std::vector<double> xs = {xa, xb};
  const std::vector<double> ys = {tod.intercept_d + tod.slope * (xa - ref_nm),
                                  tod.intercept_d + tod.slope * (xb - ref_nm)};
  c.polyline(xs, ys, "#d62728");
  for (const auto& [pump, fit] : tod.per_point) {
    c.marker(pump * 1e9, fit.d_value, std::isfinite(fit.d_sigma()) ? fit.d_sigma() : 0.0, "#1f77b4");
  }
  char label[160];
  std::snprintf(label, sizeof label, "slope = %.4f +/- %.4f ps/(nm^2 km)", tod.slope, tod.slope_uncertainty);
  c.text(Canvas::kLeft + 10, Canvas::kTop + 18, label);
  return c.str();
}

std::string plot_range_map(const RangeMapGrid& grid) {
  if (grid.lengths.size() < 2 || grid.cd_values.size() < 2) {
    throw std::invalid_argument("plot_range_map: grid must be at least 2x2");
  }
  auto edges = [](const std::vector<double>& v, bool log) {
    std::vector<double> e(v.size() + 1);
    for (std::size_t k = 1; k < v.size(); ++k) {
      e[k] = log ? std::sqrt(v[k - 1] * v[k]) : 0.5 * (v[k - 1] + v[k]);
    }
    e.front() = log ? v.front() * v.front() / e[1] : 2.0 * v.front() - e[1];
    e.back() = log ? v.back() * v.back() / e[v.size() - 1] : 2.0 * v.back() - e[v.size() - 1];
    return e;
  };
  const auto le = edges(grid.lengths, true);
  const auto de = edges(grid.cd_values, false);
  Canvas c(le.front(), le.back(), de.front(), de.back(), true);
  auto color = [](Zone z) {
    switch (z) {
      case Zone::too_narrow: return "#fdd835";
      case Zone::accessible: return "#fb8c00";
      case Zone::wide: return "#f4a582";
      case Zone::too_wide: return "#c62828";
    }
    return "#000000";
  };
  for (std::size_t i = 0; i < grid.lengths.size(); ++i) {
    for (std::size_t j = 0; j < grid.cd_values.size(); ++j) {
      c.box(le[i], de[j], le[i + 1], de[j + 1], color(grid.zone(i, j)), "none");
    }
  }
  c.axes("First-fringe width zones", "sample length (m)", "D (ps/(nm km))");
  double y = Canvas::kTop + 16;
  for (Zone z : {Zone::too_narrow, Zone::accessible, Zone::wide, Zone::too_wide}) {
    c.text(Canvas::kWidth - Canvas::kRight - 110, y, "<tspan fill=\"" + std::string(color(z)) +
                                                         "\">&#9632;</tspan> " + to_string(z));
    y += 16;
  }
  return c.str();
}

}  // namespace sagnac
