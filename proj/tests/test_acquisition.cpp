#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <numeric>
#include <set>
#include <vector>

#include <doctest.h>

#include "sagnac/acquisition.hpp"

using namespace sagnac;

namespace {
const SpectralPoint kPump = SpectralPoint::from_wavelength(1560.6e-9);

TaylorDispersion truth() { return make_dispersion(kPump, 1.0557475890700804e-25, 0.9); }

ScanPlan default_plan() {
  ScanPlan plan;
  plan.pump = kPump;
  plan.signal_wavelengths = linear_scan(kPump, 100, 24e-9);
  return plan;
}

bool same_points(const Interferogram& a, const Interferogram& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    const auto& p = a.points[k];
    const auto& q = b.points[k];
    if (p.signal_wavelength != q.signal_wavelength || p.idler_wavelength != q.idler_wavelength ||
        p.coincidences != q.coincidences || p.singles_s != q.singles_s || p.singles_i != q.singles_i) {
      return false;
    }
  }
  return true;
}
}  // namespace

TEST_SUITE("acquisition") {
  TEST_CASE("linear scan") {
    const auto w = linear_scan(kPump, 100, 24e-9);
    REQUIRE(w.size() == 100);
    CHECK(w.front() == doctest::Approx(1548.6e-9).epsilon(1e-14));
    CHECK(w.back() == doctest::Approx(1572.6e-9).epsilon(1e-14));
    CHECK(std::is_sorted(w.begin(), w.end()));
    CHECK_THROWS_AS(linear_scan(kPump, 1, 24e-9), std::invalid_argument);
    CHECK_THROWS_AS(linear_scan(kPump, 10, 0.0), std::invalid_argument);
  }

  TEST_CASE("plan validation") {
    ScanPlan plan = default_plan();
    CHECK_NOTHROW(plan.validate());
    plan.dwell = 0.0;
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
    plan = default_plan();
    plan.signal_wavelengths.resize(7);
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
    plan = default_plan();
    std::swap(plan.signal_wavelengths[3], plan.signal_wavelengths[4]);
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
    plan = default_plan();
    plan.peak_singles_rate = 0.0;
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  }

  TEST_CASE("derived seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t run = 0; run < 50; ++run) {
      const auto s = derive_run_seed(1, run);
      seen.insert(s);
      for (std::uint64_t pt = 0; pt < 20; ++pt) {
        for (auto ch : {Channel::coincidences, Channel::singles_signal, Channel::singles_idler}) {
          seen.insert(derive_draw_seed(s, pt, ch));
        }
      }
    }
    CHECK(seen.size() == 50 + 50 * 20 * 3);
    CHECK(derive_run_seed(1, 0) != derive_run_seed(2, 0));
  }

  TEST_CASE("poisson sampler moments") {
    const int n = 10000;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = static_cast<double>(poisson_draw(5000.0, derive_draw_seed(3, i, Channel::coincidences)));
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= n - 1;
    CHECK(mean == doctest::Approx(5000.0).epsilon(2e-3));
    CHECK(std::sqrt(var) == doctest::Approx(70.71).epsilon(0.03));
    CHECK(mean / var > 0.95);
    CHECK(mean / var < 1.05);
    CHECK(poisson_draw(0.0, 1) == 0);
    CHECK(poisson_draw(5.0, 42) == poisson_draw(5.0, 42));
  }

  TEST_CASE("scan is reproducible and seed-dependent") {
    const SimulationModel model;
    ScanPlan plan = default_plan();
    const auto a = run_scan(truth(), model, plan);
    const auto b = run_scan(truth(), model, plan);
    CHECK(same_points(a, b));
    plan.seed = 2;
    const auto c = run_scan(truth(), model, plan);
    CHECK_FALSE(same_points(a, c));
    for (std::size_t k = 0; k < a.points.size(); ++k) {
      CHECK(a.points[k].signal_wavelength == c.points[k].signal_wavelength);
    }
  }

  TEST_CASE("scan metadata and peak counts") {
    const auto data = run_scan(truth(), SimulationModel{}, default_plan());
    CHECK(data.points.size() == 100);
    CHECK(data.pump_wavelength == 1560.6e-9);
    CHECK(data.dwell == 1.0);
    REQUIRE(data.truth.has_value());
    CHECK(data.truth->length == 0.9);
    CHECK(data.truth->visibility == 0.95);
    double peak = 0.0;
    for (const auto& p : data.points) {
      peak = std::max(peak, p.coincidences);
      CHECK(p.coincidences == std::floor(p.coincidences));
      CHECK(1.0 / p.idler_wavelength == doctest::Approx(2.0 / 1560.6e-9 - 1.0 / p.signal_wavelength).epsilon(1e-13));
    }
    CHECK(peak > 4600.0);
    CHECK(peak < 5400.0);
  }

  TEST_CASE("noiseless mode writes expected counts") {
    SimulationModel model;
    model.noiseless = true;
    const auto data = run_scan(truth(), model, default_plan());
    const auto& mid = data.points[50];
    const FilterPair f(mid.signal_wavelength, kPump, model.filter_bandwidth);
    CHECK(mid.coincidences == coincidence_rate(truth(), model.envelope, f, 0.95, 5000.0, model.noise));
  }

  TEST_CASE("long dwell converges to the rate") {
    SimulationModel model;
    ScanPlan plan = default_plan();
    plan.signal_wavelengths = linear_scan(kPump, 10000, 24e-9);
    plan.dwell = 1e4;
    model.noiseless = true;
    const auto expected = run_scan(truth(), model, plan);
    model.noiseless = false;
    const auto drawn = run_scan(truth(), model, plan);
    int outside = 0;
    for (std::size_t k = 0; k < drawn.points.size(); ++k) {
      const double mean = expected.points[k].coincidences;
      if (std::abs(drawn.points[k].coincidences - mean) / mean >= 3.0 / std::sqrt(mean)) ++outside;
    }
    // nominal 0.27% outside 3 sigma; allow three binomial standard deviations over 1e4 points
    CHECK(outside <= 43);
  }

  TEST_CASE("points beyond the pole are skipped with a warning") {
    ScanPlan plan = default_plan();
    plan.signal_wavelengths = {700e-9, 760e-9, 1550e-9, 1552e-9, 1554e-9, 1556e-9, 1558e-9, 1560e-9, 1562e-9, 1564e-9};
    const auto data = run_scan(truth(), SimulationModel{}, plan);
    CHECK(data.points.size() == 8);
    CHECK(data.warnings.size() == 2);
    CHECK(data.points.front().signal_wavelength == 1550e-9);
  }

  TEST_CASE("ensemble") {
    const SimulationModel model;
    const ScanPlan plan = default_plan();
    const auto runs = mc_ensemble(truth(), model, plan, 100);
    REQUIRE(runs.size() == 100);
    std::set<double> first_counts;
    for (const auto& r : runs) {
      CHECK(r.truth == runs.front().truth);
      first_counts.insert(r.points[40].coincidences + 1e6 * r.points[41].coincidences);
    }
    CHECK(first_counts.size() == 100);

    ScanPlan base = plan;
    base.seed = derive_run_seed(plan.seed, 0);
    CHECK(same_points(mc_ensemble(truth(), model, plan, 1).front(), run_scan(truth(), model, base)));

    const auto serial = mc_ensemble(truth(), model, plan, 16, 1);
    const auto threaded = mc_ensemble(truth(), model, plan, 16, 4);
    for (std::size_t k = 0; k < serial.size(); ++k) CHECK(same_points(serial[k], threaded[k]));
  }
}
