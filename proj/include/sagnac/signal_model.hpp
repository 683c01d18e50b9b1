#pragma once

// Measurable rates behind a pair of energy-matched bandpass filters:
// coincidences carry the phase-matching envelope times the two-photon fringe,
// singles carry the envelope alone, and Raman back-scattering adds a flat
// accidental floor.

#include <utility>

#include "sagnac/optics.hpp"

namespace sagnac {

enum class EnvelopeShape { sinc2, gaussian };
enum class FilterShape { rectangular, gaussian };

/// Single-photon spectrum of the down-converted pairs, described by its
/// full width at half maximum in wavelength about the degenerate point.
struct PhaseMatchingEnvelope {
  SpectralPoint center = SpectralPoint::from_wavelength(1560.6e-9);
  double fwhm = 60e-9;  // m
  EnvelopeShape shape = EnvelopeShape::sinc2;
};

/// Signal filter plus its energy-conserving idler partner.
class FilterPair {
 public:
  FilterPair(double signal_center, const SpectralPoint& pump, double bandwidth,
             FilterShape shape = FilterShape::rectangular);

  double signal_center() const noexcept { return signal_center_; }
  double idler_center() const noexcept { return idler_center_; }
  double bandwidth() const noexcept { return bandwidth_; }
  FilterShape shape() const noexcept { return shape_; }
  const SpectralPoint& pump() const noexcept { return pump_; }

 private:
  double signal_center_;
  double idler_center_;
  double bandwidth_;
  FilterShape shape_;
  SpectralPoint pump_;
};

struct NoiseSpec {
  /// Accidental coincidences as a fraction of the peak pair coincidence rate.
  double sbrs_coincidence_fraction = 0.0;
  /// Uncorrelated counts/s added to each singles channel (dark counts included).
  double sbrs_singles_rate = 0.0;

  void validate() const;
};

/// How the pair phase is evaluated for each filter position.
enum class PhaseEvaluation {
  symmetric,   // signal and idler detunings taken as +dw and -dw
  per_branch,  // idler detuning computed from the idler filter wavelength
};

struct RateOptions {
  PhaseEvaluation phase = PhaseEvaluation::symmetric;
  /// Average the rate over the filter passband with a 9-point rule instead
  /// of evaluating it at the filter center.
  bool integrate_passband = false;
};

/// lambda_i = 1 / (2/lambda_p - 1/lambda_s).
double idler_partner(double signal, double pump);

/// Envelope value in [0, 1] at angular detuning `dw`, 1 at dw = 0. The
/// wavelength FWHM maps to frequency through the linear dispersion at the
/// envelope center.
double envelope_value(const PhaseMatchingEnvelope& env, double dw);

/// sinc^2(x) = 1/2 at this argument.
inline constexpr double kSinc2HalfMaxArgument = 1.3915573782515103;

double coincidence_rate(const TaylorDispersion& disp, const PhaseMatchingEnvelope& env,
                        const FilterPair& filt, double visibility, double peak_rate,
                        const NoiseSpec& noise, const RateOptions& options = {});

/// Per-channel singles (signal, idler).
std::pair<double, double> singles_rate(const PhaseMatchingEnvelope& env, const FilterPair& filt,
                                       double peak_singles, const NoiseSpec& noise,
                                       const RateOptions& options = {});

}  // namespace sagnac
