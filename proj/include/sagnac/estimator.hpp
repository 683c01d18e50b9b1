#pragma once

// Recovery of chromatic dispersion from coincidence interferograms.
//
// The interferogram is normalized by the singles rate, which removes the
// phase-matching envelope, and the quadratic-phase fringe
//
//     y(dw) = A/2 * [1 + V cos(beta2 * L * dw^2 + phi_off)]
//
// is fitted by weighted least squares. Repeated acquisitions give ensemble
// statistics, and a pump-wavelength sweep gives the dispersion slope.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sagnac/acquisition.hpp"
#include "sagnac/optics.hpp"

namespace sagnac {

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankDeficiencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PumpMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NormalizationConvention {
  geometric_mean,  // divide by sqrt(S_s * S_i)
  single_channel,  // divide by S_s
};

struct NormalizedFringe {
  struct Point {
    double detuning = 0.0;           // rad/s
    double signal_wavelength = 0.0;  // m
    double value = 0.0;
    double sigma = 0.0;
  };
  std::vector<Point> points;
  double pump_wavelength = 0.0;
  /// Factor applied to C/N so that the largest value is 1.
  double scale = 1.0;
  std::size_t dropped = 0;
};

/// Minimum number of usable points for normalization and fitting.
inline constexpr std::size_t kMinFringePoints = 8;

NormalizedFringe normalize(const Interferogram& raw,
                           NormalizationConvention convention = NormalizationConvention::geometric_mean);

/// Fit parameters in SI order (beta2 [s^2/m], phi_off [rad], V, A).
using FringeParams = std::array<double, 4>;

/// A/2 [1 + V cos(beta2 L dw^2 + phi_off)]
double fringe_model(const FringeParams& p, double dw, double length);
/// Analytic partial derivatives of fringe_model with respect to each parameter.
FringeParams fringe_jacobian(const FringeParams& p, double dw, double length);

/// Which sign of beta2 to report. cos is even, so (beta2, phi) and
/// (-beta2, -phi) fit the data equally well; the branch is prior knowledge.
enum class DispersionBranch {
  normal,     // beta2 > 0, D < 0 (dispersion-shifted fiber below zero-dispersion)
  anomalous,  // beta2 < 0, D > 0
};

struct FitInit {
  /// Grid search when unset; otherwise start from the given values.
  std::optional<std::pair<double, double>> explicit_beta2_phi;

  static FitInit automatic() { return {}; }
  static FitInit from(double beta2, double phi_off) { return {std::make_pair(beta2, phi_off)}; }
};

struct FitOptions {
  DispersionBranch branch = DispersionBranch::normal;
  /// |D| bound of the initialization grid, ps/(nm km).
  double grid_d_max = 200.0;
  /// Grid spacing expressed as phase at the outermost scan point, rad.
  double grid_phase_step = 0.2;
  int max_grid_points = 20000;
  int max_iterations = 200;
  double gradient_tolerance = 1e-10;
};

struct FitResult {
  double d_value = 0.0;  // ps/(nm km) at pump_wavelength
  double beta2 = 0.0;    // s^2/m
  double phi_off = 0.0;  // rad, in [0, 2 pi)
  double visibility = 0.0;
  double amplitude = 0.0;
  /// Covariance of (beta2, phi_off, V, A) in SI units.
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
  double chi2_reduced = 0.0;
  bool converged = false;
  int n_iterations = 0;

  double pump_wavelength = 0.0;  // m
  double length = 0.0;           // m
  std::size_t n_points = 0;
  double gradient_norm = 0.0;
  bool boundary_warning = false;
  bool visibility_warning = false;  // V beyond 1.05
  bool unidentifiable = false;      // fringe contrast not resolved from noise
  std::string message;

  double beta2_sigma() const;
  double d_sigma() const;
};

FitResult fit_cd(const NormalizedFringe& fringe, double sut_length, const SpectralPoint& pump,
                 const FitInit& init = FitInit::automatic(), const FitOptions& options = {});

/// Normalizes and fits every dataset; results are ordered like the input.
std::vector<FitResult> fit_ensemble(std::span<const Interferogram> data, double sut_length,
                                    const FitOptions& options = {},
                                    NormalizationConvention convention = NormalizationConvention::geometric_mean,
                                    unsigned threads = 0);

struct EnsembleStats {
  double mean_d = 0.0;  // ps/(nm km)
  double std_d = 0.0;   // ps/(nm km)
  double relative_error = 0.0;
  std::size_t n = 0;
  double normality_pvalue = 1.0;
  std::size_t n_excluded = 0;

  /// p below this only warns; a qualitative normality check.
  static constexpr double kNormalityWarning = 0.01;
  /// More excluded runs than this fraction fails the ensemble.
  static constexpr double kMaxExcludedFraction = 0.05;

  bool normality_warning() const { return normality_pvalue < kNormalityWarning; }
  double excluded_fraction() const;
  bool failed() const { return excluded_fraction() > kMaxExcludedFraction; }
};

EnsembleStats ensemble_stats(std::span<const FitResult> fits);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;  // value at x_ref
  double x_ref = 0.0;      // weighted mean abscissa
  double slope_sigma = 0.0;
  double intercept_sigma = 0.0;
};

/// Inverse-variance weighted straight line. Needs two distinct abscissae.
LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma);

struct TodResult {
  double slope = 0.0;                // ps/(nm^2 km)
  double intercept_d = 0.0;          // ps/(nm km) at reference_wavelength
  double reference_wavelength = 0.0;  // m
  double slope_uncertainty = 0.0;    // ps/(nm^2 km)
  std::vector<std::pair<double, FitResult>> per_point;  // (pump wavelength m, fit)
};

TodResult fit_tod(std::span<const std::pair<SpectralPoint, FitResult>> sweep);

/// Sample minus reference; beta2 and D differences with variances summed.
FitResult subtract_reference(const FitResult& sample_fit, const FitResult& reference_fit);

}  // namespace sagnac
