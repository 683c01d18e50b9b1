#pragma once

// Spectral units, the Taylor-series dispersion phase of a photon pair, and
// the conversions between the SI group-velocity dispersion beta2 and the
// engineering dispersion parameter D in ps/(nm km).

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sagnac {

/// Speed of light in vacuum, m/s (exact).
inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One ps/(nm km) expressed in s/m^2.
inline constexpr double kPsPerNmKm = 1e-12 / (1e-9 * 1e3);
/// One ps/(nm^2 km) expressed in s/m^3.
inline constexpr double kPsPerNm2Km = 1e-12 / (1e-9 * 1e-9 * 1e3);

/// Raised when an argument lies outside the domain of a physical formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A vacuum wavelength together with its angular frequency.
class SpectralPoint {
 public:
  static SpectralPoint from_wavelength(double wavelength_m);
  static SpectralPoint from_angular_frequency(double omega_rad_s);

  double wavelength() const noexcept { return wavelength_; }
  double angular_frequency() const noexcept { return kTwoPi * kSpeedOfLight / wavelength_; }

  friend bool operator==(const SpectralPoint&, const SpectralPoint&) = default;

 private:
  explicit SpectralPoint(double wavelength_m) : wavelength_(wavelength_m) {}
  double wavelength_;
};

/// How the constant phase offset of the pair state arises.
///   bulk:      pump at 2*omega_0 crosses the sample, phi_off = (2 beta0 - k_p) L
///   cascaded:  SHG then SPDC, pump at omega_0,        phi_off = (2 beta0 - 2 k_0) L
enum class OffsetMode { bulk, cascaded };

/// Wavevector Taylor series about the degenerate frequency plus sample length.
///
/// `beta[n]` is d^n k / d omega^n at `reference_frequency`, in s^n/m.
/// `phi_off` is the detuning-independent pair phase; it is carried as a free
/// scalar (see offset_phase() to build it from beta0 and the pump wavevector).
struct TaylorDispersion {
  double reference_frequency = 0.0;
  std::vector<double> beta = {0.0, 0.0, 0.0};
  double length = 0.0;
  double phi_off = 0.0;
  OffsetMode offset_mode = OffsetMode::cascaded;
  /// Orders above three are ignored unless this is set.
  bool include_fourth_order = false;

  double beta2() const { return beta.at(2); }

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  /// Highest order that takes part in phase sums.
  int max_order() const noexcept;
};

/// Builds a series with beta0..beta2 (and optionally beta3) set.
TaylorDispersion make_dispersion(const SpectralPoint& reference, double beta2, double length,
                                 double phi_off = 0.0, double beta3 = 0.0);

/// Engineering dispersion parameter at a wavelength.
struct DispersionParameter {
  double d_value = 0.0;        // ps/(nm km)
  double at_wavelength = 0.0;  // m
};

struct FringeWidth {
  double delta_lambda = 0.0;  // m
};

/// Delta omega = 2 pi c (1/lambda_s - 1/lambda_p).
double detuning(const SpectralPoint& signal, const SpectralPoint& pump);

/// Builds phi_off from the zeroth-order wavevector and the pump or
/// degenerate wavevector, per offset mode.
double offset_phase(double beta0, double k_reference, double length, OffsetMode mode);

/// Relative phase of the |HH> and |VV> terms for a pair detuned by +dw / -dw.
/// Signal and idler branches are summed symmetrically so odd orders vanish.
double pair_phase(const TaylorDispersion& disp, double dw);

/// Same sum with independently supplied signal and idler detunings; used by
/// the generator to evaluate each branch without assuming dw_i == -dw_s.
double branch_phase(const TaylorDispersion& disp, double dw_signal, double dw_idler);

double d_to_beta2(const DispersionParameter& d);
DispersionParameter beta2_to_d(double beta2, double at_wavelength);

/// Width of the first quadratic two-photon fringe:
/// sqrt(lambda_p^4 / (2 pi c^2 |beta2| L)). Phase reaches 2 pi at this offset.
FringeWidth fringe_width(const SpectralPoint& pump, double beta2, double length);

/// Wavelength offset from pump to angular detuning, to first order.
double wavelength_offset_to_detuning(double delta_lambda, const SpectralPoint& pump);

}  // namespace sagnac
