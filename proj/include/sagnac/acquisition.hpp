#pragma once

// Synthetic filter-scan acquisitions with Poisson counting noise.
//
// Every random draw is keyed by (seed, run, point, channel) so a dataset is
// reproducible bit for bit regardless of how runs are scheduled across
// threads.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sagnac/optics.hpp"
#include "sagnac/signal_model.hpp"

namespace sagnac {

/// Everything the rate model needs besides the dispersion under test.
struct SimulationModel {
  PhaseMatchingEnvelope envelope;
  double filter_bandwidth = 500e-12;  // m
  FilterShape filter_shape = FilterShape::rectangular;
  double visibility = 0.95;
  NoiseSpec noise{0.005, 0.0};
  RateOptions rate;
  /// Record expected counts instead of Poisson draws.
  bool noiseless = false;
};

struct ScanPlan {
  SpectralPoint pump = SpectralPoint::from_wavelength(1560.6e-9);
  std::vector<double> signal_wavelengths;  // m, strictly increasing
  double dwell = 1.0;                      // s per point
  double peak_coincidence_rate = 5000.0;   // counts/s
  double peak_singles_rate = 100000.0;     // counts/s
  std::uint64_t seed = 1;

  void validate() const;
};

/// `n_points` signal wavelengths evenly spaced over `span` centered on the pump.
std::vector<double> linear_scan(const SpectralPoint& pump, int n_points, double span);

enum class Channel : std::uint64_t { coincidences = 0, singles_signal = 1, singles_idler = 2 };

/// Seed of run `run` in an ensemble started from `seed`.
std::uint64_t derive_run_seed(std::uint64_t seed, std::uint64_t run);
/// Seed of one Poisson draw inside a scan.
std::uint64_t derive_draw_seed(std::uint64_t scan_seed, std::uint64_t point, Channel channel);

/// One Poisson sample of the given mean from a generator keyed by `key`.
std::int64_t poisson_draw(double mean, std::uint64_t key);

struct InterferogramPoint {
  double signal_wavelength = 0.0;  // m
  double idler_wavelength = 0.0;   // m
  // Integer-valued for Poisson data; expected (fractional) values when noiseless.
  double coincidences = 0.0;
  double singles_s = 0.0;
  double singles_i = 0.0;
};

struct SyntheticTruth {
  double beta2 = 0.0;  // s^2/m
  double length = 0.0;  // m
  double phi_off = 0.0;
  double visibility = 0.0;

  friend bool operator==(const SyntheticTruth&, const SyntheticTruth&) = default;
};

struct Interferogram {
  std::vector<InterferogramPoint> points;
  double pump_wavelength = 0.0;  // m
  double dwell = 0.0;            // s
  std::uint64_t seed = 0;
  std::optional<SyntheticTruth> truth;
  /// Scan points that could not be acquired (e.g. beyond the idler pole).
  std::vector<std::string> warnings;
};

Interferogram run_scan(const TaylorDispersion& truth, const SimulationModel& model,
                       const ScanPlan& plan);

/// `runs` replicas; replica k is run_scan with seed derive_run_seed(plan.seed, k).
/// `threads` = 0 picks the hardware concurrency.
std::vector<Interferogram> mc_ensemble(const TaylorDispersion& truth, const SimulationModel& model,
                                       const ScanPlan& plan, int runs, unsigned threads = 0);

}  // namespace sagnac
