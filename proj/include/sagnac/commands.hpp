#pragma once

// Command implementations behind the `sagnac-cd` executable. Each returns a
// process exit status and reports progress and errors on the given streams.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sagnac/config.hpp"
#include "sagnac/estimator.hpp"

namespace sagnac {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int io = 3;
inline constexpr int no_convergence = 4;
}  // namespace exit_code

struct SimulateArgs {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  bool noiseless = false;
};

struct FitArgs {
  std::filesystem::path in;
  std::filesystem::path out;
  std::string convention = "geometric";  // geometric | single
  std::string branch = "normal";         // normal | anomalous
  std::optional<double> length_m;
  std::optional<double> pump_m;
};

struct McArgs {
  std::filesystem::path config;
  int runs = 100;
  std::filesystem::path out;
  unsigned threads = 0;
};

struct SweepArgs {
  std::filesystem::path config;
  double start_m = 0.0;
  double stop_m = 0.0;
  double step_m = 0.0;
  double slope_ps_nm2_km = 0.0;
  std::filesystem::path out;
  bool noiseless = false;
  unsigned threads = 0;
};

struct RangeMapArgs {
  double lmin_m = 0.01;
  double lmax_m = 1000.0;
  double dmin = -200.0;
  double dmax = 200.0;
  std::size_t n_lengths = 61;
  std::size_t n_cd = 81;
  double pump_m = 1560.6e-9;
  double filter_bandwidth_m = 500e-12;
  double source_bandwidth_m = 60e-9;
  double narrow_factor = 4.0;
  std::filesystem::path out;
};

struct PlotArgs {
  std::filesystem::path in;
  std::string kind;  // fringe | histogram | sweep | rangemap
  std::filesystem::path out;
};

/// Pump wavelengths from `start` to `stop` (either order) in steps of |step|.
std::vector<double> sweep_pumps(double start_m, double stop_m, double step_m);

/// Simulates and fits one interferogram per pump wavelength. D follows
/// D0 + slope * (lambda_p - config pump) while phase matching stays at the
/// configured pump; point k draws from derive_run_seed(cfg.seed, k).
std::vector<std::pair<SpectralPoint, FitResult>> simulate_sweep(const RunConfig& cfg,
                                                                std::span<const double> pumps_m,
                                                                double slope_ps_nm2_km, bool noiseless,
                                                                unsigned threads = 0);

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err);
int cmd_mc(const McArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_rangemap(const RangeMapArgs& args, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotArgs& args, std::ostream& out, std::ostream& err);

}  // namespace sagnac
