#include <cmath>
#include <limits>
#include <sstream>

#include <doctest.h>

#include "sagnac/rangemap.hpp"

using namespace sagnac;

namespace {
const SpectralPoint kPump = SpectralPoint::from_wavelength(1560.6e-9);
}

TEST_SUITE("rangemap") {
  TEST_CASE("zones") {
    const ZoneThresholds t;
    CHECK(classify(1.0e-9, t) == Zone::too_narrow);
    CHECK(classify(10.5e-9, t) == Zone::accessible);
    CHECK(classify(45e-9, t) == Zone::wide);
    CHECK(classify(80e-9, t) == Zone::too_wide);
    CHECK(classify(std::numeric_limits<double>::infinity(), t) == Zone::too_wide);
    for (Zone z : {Zone::too_narrow, Zone::accessible, Zone::wide, Zone::too_wide}) {
      CHECK(zone_from_string(to_string(z)) == z);
    }
    CHECK_THROWS_AS(zone_from_string("middling"), std::invalid_argument);
  }

  TEST_CASE("grid values and scaling") {
    const auto g = make_range_map(kPump, 0.009, 90.0, 3, -81.654, 81.654, 3);
    REQUIRE(g.lengths.size() == 3);
    CHECK(g.lengths[1] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(g.cd_values[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.width(1, 0) == doctest::Approx(1.0514079685074834e-8).epsilon(1e-9));
    CHECK(g.zone(1, 0) == Zone::accessible);
    CHECK(g.width(1, 2) == doctest::Approx(g.width(1, 0)).epsilon(1e-12));
    // 100x longer sample, 10x narrower fringe
    CHECK(g.width(2, 0) == doctest::Approx(g.width(1, 0) / 10.0).epsilon(1e-12));
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::isinf(g.width(i, 1)));
      CHECK(g.zone(i, 1) == Zone::too_wide);
    }
    CHECK(g.zone(0, 0) == Zone::too_wide);
    CHECK(g.zone(2, 0) == Zone::too_narrow);
  }

  TEST_CASE("CSV round trip with the infinite sentinel") {
    const auto g = make_range_map(kPump, 0.01, 1000.0, 6, -200.0, 200.0, 5);
    std::stringstream buf;
    write_range_map_csv(buf, g);
    CHECK(buf.str().rfind(std::string(kRangeMapHeader) + "\n", 0) == 0);
    CHECK(buf.str().find(",inf,too_wide") != std::string::npos);
    const auto back = read_range_map_csv(buf);
    REQUIRE(back.widths.size() == g.widths.size());
    for (std::size_t k = 0; k < g.widths.size(); ++k) {
      CHECK(back.zones[k] == g.zones[k]);
      if (std::isinf(g.widths[k])) {
        CHECK(std::isinf(back.widths[k]));
      } else {
        CHECK(back.widths[k] == g.widths[k]);
      }
    }
    CHECK(back.lengths == g.lengths);
    CHECK(back.cd_values == g.cd_values);
  }

  TEST_CASE("argument checks") {
    CHECK_THROWS_AS(make_range_map(kPump, 1.0, 1.0, 3, -1.0, 1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_range_map(kPump, 0.0, 1.0, 3, -1.0, 1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_range_map(kPump, 0.1, 1.0, 1, -1.0, 1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_range_map(kPump, 0.1, 1.0, 3, 1.0, -1.0, 3), std::invalid_argument);
    std::stringstream bad("length_m,d\n");
    CHECK_THROWS(read_range_map_csv(bad));
  }
}
