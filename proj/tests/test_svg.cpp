#include <string>

#include <doctest.h>

#include "sagnac/config.hpp"
#include "sagnac/estimator.hpp"
#include "sagnac/io.hpp"
#include "sagnac/rangemap.hpp"
#include "sagnac/svg.hpp"

using namespace sagnac;

namespace {
std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}
}  // namespace

TEST_SUITE("svg") {
  TEST_CASE("fringe plot") {
    RunConfig cfg;
    const auto fringe = normalize(run_scan(cfg.dispersion(), cfg.model(), cfg.plan()));
    const auto fit = fit_cd(fringe, cfg.sut.length_m, cfg.pump());
    const std::string a = plot_fringe(fringe, fit);
    CHECK(a.rfind("<?xml", 0) == 0);
    CHECK(a.find("<svg") != std::string::npos);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(count(a, "<circle") == fringe.points.size());
    CHECK(count(a, "<polyline") >= 1);
    CHECK(a == plot_fringe(fringe, fit));
  }

  TEST_CASE("histogram, sweep and range map plots are deterministic") {
    const std::vector<double> v{-81.7, -81.66, -81.65, -81.64, -81.6, -81.65, -81.63};
    const auto h = make_histogram(v);
    const std::string hist = plot_histogram(h, -81.65, 0.03, v.size());
    CHECK(count(hist, "<rect") >= h.counts.size());
    CHECK(hist.find("<polyline") != std::string::npos);
    CHECK(hist == plot_histogram(h, -81.65, 0.03, v.size()));

    TodResult tod;
    tod.slope = -0.26;
    tod.intercept_d = -81.654;
    tod.reference_wavelength = 1560.6e-9;
    tod.slope_uncertainty = 0.01;
    for (int k = 0; k < 5; ++k) {
      FitResult f;
      f.converged = true;
      f.d_value = -81.654 - 0.26 * (k - 2) * 0.1;
      f.covariance(0, 0) = 1e-60;
      f.pump_wavelength = 1560.4e-9 + k * 0.1e-9;
      tod.per_point.emplace_back(f.pump_wavelength, f);
    }
    const std::string sweep = plot_sweep(tod);
    CHECK(count(sweep, "<circle") == 5);
    CHECK(sweep == plot_sweep(tod));

    const auto grid = make_range_map(SpectralPoint::from_wavelength(1560.6e-9), 0.01, 1000.0, 8, -200.0, 200.0, 9);
    const std::string map = plot_range_map(grid);
    CHECK(count(map, "<rect") >= grid.zones.size());
    CHECK(map == plot_range_map(grid));
  }
}
