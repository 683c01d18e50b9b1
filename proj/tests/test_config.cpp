#include <string>

#include <doctest.h>

#include "sagnac/config.hpp"
#include "temp_dir.hpp"
#include "sagnac/io.hpp"

using namespace sagnac;

TEST_SUITE("config") {
  TEST_CASE("empty document gives the defaults") {
    const RunConfig c = parse_config("{}");
    CHECK(c == RunConfig{});
    CHECK(c.pump_m == 1560.6e-9);
    CHECK(c.sut.length_m == 0.9);
    CHECK(*c.sut.d_ps_nm_km == -81.654);
    CHECK(c.scan.n_points == 100);
    CHECK(c.scan.span_m == 24e-9);
    CHECK(c.scan.dwell_s == 1.0);
    CHECK(c.visibility == 0.95);
    CHECK(c.branch() == DispersionBranch::normal);
  }

  TEST_CASE("round trip through JSON") {
    RunConfig c;
    c.pump_m = 1560.4e-9;
    c.sut.d_ps_nm_km.reset();
    c.sut.beta2_si = -2.1e-26;
    c.sut.phi_off_rad = 1.25;
    c.envelope.shape = EnvelopeShape::gaussian;
    c.filter.shape = FilterShape::gaussian;
    c.filter.bandwidth_m = 200e-12;
    c.noise.sbrs_fraction = 0.01;
    c.noise.sbrs_singles_cps = 40.0;
    c.scan.n_points = 64;
    c.scan.dwell_s = 8.0;
    c.seed = 123456789012345ULL;
    const RunConfig back = parse_config(to_json(c).dump(2));
    CHECK(back == c);
    CHECK(back.branch() == DispersionBranch::anomalous);
  }

  TEST_CASE("derived quantities") {
    RunConfig c;
    CHECK(c.dispersion().beta2() == doctest::Approx(1.0557475890700804e-25).epsilon(1e-13));
    CHECK(c.plan().signal_wavelengths.size() == 100);
    CHECK(c.model(true).noiseless);
    CHECK(c.model().envelope.center.wavelength() == c.pump_m);
  }

  TEST_CASE("validation names the field and line") {
    const std::string text = "{\n  \"sut\": {\n    \"length_m\": 0\n  }\n}";
    try {
      parse_config(text);
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "sut.length_m");
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("sut.length_m") != std::string::npos);
    }
  }

  TEST_CASE("rejections") {
    CHECK_THROWS_AS(parse_config("{\"sut\": {\"lenght_m\": 1}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"visibility\": 1.5}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"scan\": {\"n_points\": 4}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"scan\": {\"n_points\": 10.5}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"sut\": {\"d_ps_nm_km\": -80, \"beta2_si\": 1e-25}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"envelope\": {\"shape\": \"lorentzian\"}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"seed\": -3}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"pump_m\": \"1560\"}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("[]"), ConfigError);
  }

  TEST_CASE("loading from disk") {
    TempDir dir;
    write_text_file(dir / "c.json", "{\"seed\": 9}");
    CHECK(load_config((dir / "c.json").string()).seed == 9);
    CHECK_THROWS_AS(load_config((dir / "missing.json").string()), std::ios_base::failure);
  }
}
