#pragma once

// JSON run configuration. Units are carried in the field names
// (`*_m`, `*_s`, `*_cps`, `*_rad`); D is in ps/(nm km).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sagnac/acquisition.hpp"
#include "sagnac/estimator.hpp"
#include "sagnac/optics.hpp"
#include "sagnac/signal_model.hpp"

namespace sagnac {

/// Invalid configuration; `field` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message, int line = 0);
  const std::string& field() const noexcept { return field_; }
  const std::string& detail() const noexcept { return detail_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  std::string detail_;
  int line_;
};

struct RunConfig {
  double pump_m = 1560.6e-9;

  struct Sut {
    double length_m = 0.9;
    std::optional<double> d_ps_nm_km = -81.654;
    std::optional<double> beta2_si;
    double phi_off_rad = 0.0;
    friend bool operator==(const Sut&, const Sut&) = default;
  } sut;

  struct Envelope {
    double fwhm_m = 60e-9;
    EnvelopeShape shape = EnvelopeShape::sinc2;
    friend bool operator==(const Envelope&, const Envelope&) = default;
  } envelope;

  struct Filter {
    double bandwidth_m = 500e-12;
    FilterShape shape = FilterShape::rectangular;
    friend bool operator==(const Filter&, const Filter&) = default;
  } filter;

  struct Noise {
    double sbrs_fraction = 0.005;
    double sbrs_singles_cps = 0.0;
    friend bool operator==(const Noise&, const Noise&) = default;
  } noise;

  struct Scan {
    int n_points = 100;
    double span_m = 24e-9;
    double dwell_s = 1.0;
    double peak_coinc_cps = 5000.0;
    double peak_singles_cps = 100000.0;
    friend bool operator==(const Scan&, const Scan&) = default;
  } scan;

  double visibility = 0.95;
  std::uint64_t seed = 1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// beta2 of the sample at `wavelength`, from whichever of D / beta2 is set.
  double beta2_at(double wavelength) const;
  /// Prior on the sign of beta2, used to pick the fit branch.
  DispersionBranch branch() const;

  SpectralPoint pump() const { return SpectralPoint::from_wavelength(pump_m); }
  TaylorDispersion dispersion() const;
  SimulationModel model(bool noiseless = false) const;
  ScanPlan plan() const;
};

/// Parses and validates; throws ConfigError with field path and line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Throws ConfigError on any invariant violation.
void validate(const RunConfig& cfg);

}  // namespace sagnac
