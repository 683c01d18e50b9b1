#include <cmath>
#include <cstdlib>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "sagnac/commands.hpp"
#include "sagnac/io.hpp"
#include "sagnac/rangemap.hpp"
#include "temp_dir.hpp"

using namespace sagnac;
using nlohmann::json;

namespace {
struct Run {
  int status;
  std::string out;
  std::string err;
};

template <class Args, class F>
Run run(F command, const Args& args) {
  std::ostringstream out, err;
  const int status = command(args, out, err);
  return {status, out.str(), err.str()};
}

json load(const std::filesystem::path& p) { return json::parse(read_text_file(p)); }

std::size_t line_count(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

int shell(const std::string& args) {
  const std::string cmd = std::string(SAGNAC_CD_PATH) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}
}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate then fit") {
    TempDir dir;
    write_text_file(dir / "cfg.json", "{}");
    const auto sim = run(cmd_simulate, SimulateArgs{dir / "cfg.json", dir / "a.csv", std::nullopt, false});
    REQUIRE(sim.status == exit_code::ok);
    CHECK(line_count(dir / "a.csv") == 101);
    CHECK(std::filesystem::exists(dir / "a.json"));
    std::ifstream csv(dir / "a.csv");
    const auto data = read_interferogram_csv(csv);
    double peak = 0.0;
    for (const auto& p : data.points) peak = std::max(peak, p.coincidences);
    CHECK(peak == doctest::Approx(5000.0).epsilon(0.08));

    FitArgs fa;
    fa.in = dir / "a.csv";
    fa.out = dir / "fit.json";
    const auto fit = run(cmd_fit, fa);
    REQUIRE(fit.status == exit_code::ok);
    CHECK(fit.out.rfind("D = ", 0) == 0);
    CHECK(fit.out.find("ps/(nm.km)") != std::string::npos);
    const json j = load(dir / "fit.json");
    CHECK(std::abs(j["d_ps_nm_km"].get<double>() + 81.654) < 3.0 * j["d_sigma_ps_nm_km"].get<double>());
    CHECK(j["fringe"]["detuning_rad_s"].size() == 100);
  }

  TEST_CASE("seed override changes counts only") {
    TempDir dir;
    write_text_file(dir / "cfg.json", "{}");
    REQUIRE(run(cmd_simulate, SimulateArgs{dir / "cfg.json", dir / "a.csv", std::nullopt, false}).status == 0);
    REQUIRE(run(cmd_simulate, SimulateArgs{dir / "cfg.json", dir / "b.csv", 99u, false}).status == 0);
    REQUIRE(run(cmd_simulate, SimulateArgs{dir / "cfg.json", dir / "c.csv", std::nullopt, false}).status == 0);
    CHECK(read_text_file(dir / "a.csv") == read_text_file(dir / "c.csv"));
    std::ifstream fa(dir / "a.csv"), fb(dir / "b.csv");
    const auto a = read_interferogram_csv(fa);
    const auto b = read_interferogram_csv(fb);
    bool differs = false;
    for (std::size_t k = 0; k < a.points.size(); ++k) {
      CHECK(a.points[k].signal_wavelength == b.points[k].signal_wavelength);
      differs = differs || a.points[k].coincidences != b.points[k].coincidences;
    }
    CHECK(differs);
    CHECK(load(dir / "b.json")["seed"] == 99);
  }

  TEST_CASE("noiseless simulate is recovered exactly") {
    TempDir dir;
    write_text_file(dir / "cfg.json", R"({"noise": {"sbrs_fraction": 0}})");
    REQUIRE(run(cmd_simulate, SimulateArgs{dir / "cfg.json", dir / "n.csv", std::nullopt, true}).status == 0);
    FitArgs fa;
    fa.in = dir / "n.csv";
    fa.out = dir / "n_fit.json";
    REQUIRE(run(cmd_fit, fa).status == 0);
    CHECK(std::abs(load(dir / "n_fit.json")["d_ps_nm_km"].get<double>() / -81.654 - 1.0) < 1e-6);
  }

  TEST_CASE("simulate errors") {
    TempDir dir;
    write_text_file(dir / "bad.json", "{\n  \"sut\": {\"length_m\": 0}\n}");
    const auto bad = run(cmd_simulate, SimulateArgs{dir / "bad.json", dir / "x.csv", std::nullopt, false});
    CHECK(bad.status == exit_code::usage);
    CHECK(bad.err.find("sut.length_m") != std::string::npos);
    CHECK(run(cmd_simulate, SimulateArgs{dir / "missing.json", dir / "x.csv", std::nullopt, false}).status ==
          exit_code::io);
    write_text_file(dir / "cfg.json", "{}");
    CHECK(run(cmd_simulate, SimulateArgs{dir / "cfg.json", dir / "no" / "dir" / "x.csv", std::nullopt, false}).status ==
          exit_code::io);
  }

  TEST_CASE("fit errors") {
    TempDir dir;
    write_text_file(dir / "t.csv", std::string(kInterferogramHeader) +
                                       "\n1.55e-06,1.57e-06,10,100,100\n1.551e-06,1.569e-06\n");
    FitArgs fa;
    fa.in = dir / "t.csv";
    fa.out = dir / "t.json";
    const auto truncated = run(cmd_fit, fa);
    CHECK(truncated.status == exit_code::usage);
    CHECK(truncated.err.find("row 3") != std::string::npos);

    fa.in = dir / "absent.csv";
    CHECK(run(cmd_fit, fa).status == exit_code::io);

    // no sidecar: the length has to come from the command line
    write_text_file(dir / "cfg.json", "{}");
    REQUIRE(run(cmd_simulate, SimulateArgs{dir / "cfg.json", dir / "a.csv", std::nullopt, false}).status == 0);
    std::filesystem::remove(dir / "a.json");
    fa.in = dir / "a.csv";
    CHECK(run(cmd_fit, fa).status == exit_code::usage);
    fa.length_m = 0.9;
    CHECK(run(cmd_fit, fa).status == exit_code::ok);
    fa.convention = "single";
    CHECK(run(cmd_fit, fa).status == exit_code::ok);
    fa.convention = "median";
    CHECK(run(cmd_fit, fa).status == exit_code::usage);
  }

  TEST_CASE("flat interferogram exits with the non-convergence status") {
    TempDir dir;
    write_text_file(dir / "cfg.json", R"({"visibility": 0})");
    REQUIRE(run(cmd_simulate, SimulateArgs{dir / "cfg.json", dir / "f.csv", std::nullopt, false}).status == 0);
    FitArgs fa;
    fa.in = dir / "f.csv";
    fa.out = dir / "f_fit.json";
    CHECK(run(cmd_fit, fa).status == exit_code::no_convergence);
    CHECK(std::filesystem::exists(dir / "f_fit.json"));
  }

  TEST_CASE("monte carlo") {
    TempDir dir;
    write_text_file(dir / "cfg.json", "{}");
    const auto mc = run(cmd_mc, McArgs{dir / "cfg.json", 100, dir / "mc.json", 0});
    REQUIRE(mc.status == exit_code::ok);
    const json j = load(dir / "mc.json");
    CHECK(j["kind"] == "ensemble_stats");
    CHECK(j["n"] == 100);
    CHECK(j["truth_d_ps_nm_km"].get<double>() == doctest::Approx(-81.654).epsilon(1e-12));
    CHECK(j["histogram"]["counts"].size() + 1 == j["histogram"]["edges_ps_nm_km"].size());
    CHECK(line_count(dir / "mc_runs.csv") == 101);
    CHECK(run(cmd_mc, McArgs{dir / "cfg.json", 1, dir / "x.json", 0}).status == exit_code::usage);
  }

  TEST_CASE("doubling the dwell shrinks the spread by root two") {
    TempDir dir;
    write_text_file(dir / "one.json", R"({"seed": 31})");
    write_text_file(dir / "two.json", R"({"seed": 32, "scan": {"dwell_s": 2}})");
    REQUIRE(run(cmd_mc, McArgs{dir / "one.json", 400, dir / "one_mc.json", 0}).status == 0);
    REQUIRE(run(cmd_mc, McArgs{dir / "two.json", 400, dir / "two_mc.json", 0}).status == 0);
    const double ratio = load(dir / "two_mc.json")["relative_error"].get<double>() /
                         load(dir / "one_mc.json")["relative_error"].get<double>();
    CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
  }

  TEST_CASE("sweep") {
    TempDir dir;
    write_text_file(dir / "cfg.json", R"({"scan": {"dwell_s": 10000}})");
    SweepArgs sa;
    sa.config = dir / "cfg.json";
    sa.start_m = 1560.4e-9;
    sa.stop_m = 1560.8e-9;
    sa.step_m = 100e-12;
    sa.slope_ps_nm2_km = -0.26;
    sa.out = dir / "sw.json";
    const auto sweep = run(cmd_sweep, sa);
    REQUIRE(sweep.status == exit_code::ok);
    const json j = load(dir / "sw.json");
    CHECK(j["kind"] == "tod_result");
    CHECK(std::abs(j["slope_ps_nm2_km"].get<double>() / -0.26 - 1.0) < 0.05);
    CHECK(line_count(dir / "sw_points.csv") == 6);

    std::swap(sa.start_m, sa.stop_m);
    sa.out = dir / "rev.json";
    REQUIRE(run(cmd_sweep, sa).status == exit_code::ok);
    CHECK(read_text_file(dir / "rev.json") == read_text_file(dir / "sw.json"));

    sa.slope_ps_nm2_km = 0.0;
    sa.out = dir / "flat.json";
    REQUIRE(run(cmd_sweep, sa).status == exit_code::ok);
    const json flat = load(dir / "flat.json");
    CHECK(std::abs(flat["slope_ps_nm2_km"].get<double>()) < 3.0 * flat["slope_uncertainty_ps_nm2_km"].get<double>());

    sa.step_m = 0.0;
    CHECK(run(cmd_sweep, sa).status == exit_code::usage);
    sa.step_m = 1e-9;
    CHECK(run(cmd_sweep, sa).status == exit_code::usage);  // only one pump
  }

  TEST_CASE("range map") {
    TempDir dir;
    RangeMapArgs ra;
    ra.lmin_m = 0.009;
    ra.lmax_m = 90.0;
    ra.n_lengths = 3;
    ra.dmin = -81.654;
    ra.dmax = 81.654;
    ra.n_cd = 3;
    ra.out = dir / "map.csv";
    REQUIRE(run(cmd_rangemap, ra).status == exit_code::ok);
    std::ifstream in(dir / "map.csv");
    const auto g = read_range_map_csv(in);
    CHECK(g.width(1, 0) == doctest::Approx(10.514e-9).epsilon(1e-4));
    CHECK(g.zone(1, 0) == Zone::accessible);
    CHECK(g.width(2, 0) == doctest::Approx(g.width(1, 0) / 10.0).epsilon(1e-12));
    CHECK(std::isinf(g.width(1, 1)));
    CHECK(g.zone(1, 1) == Zone::too_wide);
    ra.lmin_m = -1.0;
    CHECK(run(cmd_rangemap, ra).status == exit_code::usage);
  }

  TEST_CASE("plots") {
    TempDir dir;
    write_text_file(dir / "cfg.json", R"({"scan": {"dwell_s": 100}})");
    REQUIRE(run(cmd_simulate, SimulateArgs{dir / "cfg.json", dir / "a.csv", std::nullopt, false}).status == 0);
    FitArgs fa;
    fa.in = dir / "a.csv";
    fa.out = dir / "fit.json";
    REQUIRE(run(cmd_fit, fa).status == 0);
    REQUIRE(run(cmd_mc, McArgs{dir / "cfg.json", 20, dir / "mc.json", 0}).status == 0);
    SweepArgs sa;
    sa.config = dir / "cfg.json";
    sa.start_m = 1560.4e-9;
    sa.stop_m = 1560.8e-9;
    sa.step_m = 100e-12;
    sa.slope_ps_nm2_km = -0.26;
    sa.out = dir / "sw.json";
    REQUIRE(run(cmd_sweep, sa).status == 0);
    RangeMapArgs ra;
    ra.n_lengths = 9;
    ra.n_cd = 9;
    ra.out = dir / "map.csv";
    REQUIRE(run(cmd_rangemap, ra).status == 0);

    const std::pair<const char*, const char*> ok[] = {
        {"fit.json", "fringe"}, {"mc.json", "histogram"}, {"sw.json", "sweep"}, {"map.csv", "rangemap"}};
    for (const auto& [file, kind] : ok) {
      CAPTURE(kind);
      REQUIRE(run(cmd_plot, PlotArgs{dir / file, kind, dir / "one.svg"}).status == exit_code::ok);
      REQUIRE(run(cmd_plot, PlotArgs{dir / file, kind, dir / "two.svg"}).status == exit_code::ok);
      CHECK(read_text_file(dir / "one.svg") == read_text_file(dir / "two.svg"));
    }
    CHECK(read_text_file(dir / "one.svg").find("<svg") != std::string::npos);

    const std::pair<const char*, const char*> mismatched[] = {
        {"fit.json", "histogram"}, {"mc.json", "sweep"}, {"sw.json", "fringe"}, {"map.csv", "fringe"},
        {"fit.json", "rangemap"}, {"fit.json", "contour"}};
    for (const auto& [file, kind] : mismatched) {
      CAPTURE(kind);
      CHECK(run(cmd_plot, PlotArgs{dir / file, kind, dir / "bad.svg"}).status == exit_code::usage);
    }
    CHECK(run(cmd_plot, PlotArgs{dir / "gone.json", "fringe", dir / "bad.svg"}).status == exit_code::io);
  }

  TEST_CASE("executable argument handling") {
    CHECK(shell("--help") == 0);
    CHECK(shell("fit --help") == 0);
    CHECK(shell("") == exit_code::usage);
    CHECK(shell("simulate") == exit_code::usage);
    CHECK(shell("simulate --config x.json --out y.csv --bogus") == exit_code::usage);
    CHECK(shell("mc --config x.json --runs many --out y.json") == exit_code::usage);
    CHECK(shell("teleport") == exit_code::usage);
  }
}
