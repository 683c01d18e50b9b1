#include "sagnac/optics.hpp"

#include <algorithm>
#include <cmath>

namespace sagnac {

namespace {

// Integer power by repeated multiplication; keeps (-x)^n == -(x^n) exact for odd n.
double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void require_positive_wavelength(double wavelength_m, const char* what) {
  if (!(wavelength_m > 0.0) || !std::isfinite(wavelength_m)) {
    throw DomainError(std::string(what) + " wavelength must be positive and finite");
  }
}

}  // namespace

SpectralPoint SpectralPoint::from_wavelength(double wavelength_m) {
  require_positive_wavelength(wavelength_m, "spectral point");
  return SpectralPoint(wavelength_m);
}

SpectralPoint SpectralPoint::from_angular_frequency(double omega_rad_s) {
  if (!(omega_rad_s > 0.0) || !std::isfinite(omega_rad_s)) {
    throw DomainError("angular frequency must be positive and finite");
  }
  return SpectralPoint(kTwoPi * kSpeedOfLight / omega_rad_s);
}

void TaylorDispersion::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("dispersion: length must be > 0");
  }
  if (beta.size() < 3) {
    throw std::invalid_argument("dispersion: series must hold orders 0..2");
  }
  if (!std::all_of(beta.begin(), beta.end(), [](double b) { return std::isfinite(b); })) {
    throw std::invalid_argument("dispersion: coefficients must be finite");
  }
  if (!std::isfinite(phi_off)) {
    throw std::invalid_argument("dispersion: phi_off must be finite");
  }
}

int TaylorDispersion::max_order() const noexcept {
  const int stored = static_cast<int>(beta.size()) - 1;
  return std::min(stored, include_fourth_order ? 4 : 3);
}

TaylorDispersion make_dispersion(const SpectralPoint& reference, double beta2, double length,
                                 double phi_off, double beta3) {
  TaylorDispersion d;
  d.reference_frequency = reference.angular_frequency();
  d.beta = {0.0, 0.0, beta2, beta3};
  d.length = length;
  d.phi_off = phi_off;
  d.validate();
  return d;
}

double detuning(const SpectralPoint& signal, const SpectralPoint& pump) {
  return kTwoPi * kSpeedOfLight * (1.0 / signal.wavelength() - 1.0 / pump.wavelength());
}

double offset_phase(double beta0, double k_reference, double length, OffsetMode mode) {
  switch (mode) {
    case OffsetMode::bulk:
      return (2.0 * beta0 - k_reference) * length;
    case OffsetMode::cascaded:
      return (2.0 * beta0 - 2.0 * k_reference) * length;
  }
  return 0.0;
}

double pair_phase(const TaylorDispersion& disp, double dw) {
  double phase = 0.0;
  for (int n = disp.max_order(); n >= 1; --n) {
    const double signal_term = ipow(dw, n);
    const double idler_term = (n % 2 == 0) ? signal_term : -signal_term;
    phase += disp.beta[n] / factorial(n) * (signal_term + idler_term);
  }
  return phase * disp.length + disp.phi_off;
}

double branch_phase(const TaylorDispersion& disp, double dw_signal, double dw_idler) {
  double phase = 0.0;
  for (int n = disp.max_order(); n >= 1; --n) {
    phase += disp.beta[n] / factorial(n) * (ipow(dw_signal, n) + ipow(dw_idler, n));
  }
  return phase * disp.length + disp.phi_off;
}

double d_to_beta2(const DispersionParameter& d) {
  require_positive_wavelength(d.at_wavelength, "dispersion parameter");
  const double lambda = d.at_wavelength;
  return -(d.d_value * kPsPerNmKm) * lambda * lambda / (kTwoPi * kSpeedOfLight);
}

DispersionParameter beta2_to_d(double beta2, double at_wavelength) {
  require_positive_wavelength(at_wavelength, "dispersion parameter");
  const double d_si = -beta2 * kTwoPi * kSpeedOfLight / (at_wavelength * at_wavelength);
  return {d_si / kPsPerNmKm, at_wavelength};
}

FringeWidth fringe_width(const SpectralPoint& pump, double beta2, double length) {
  if (beta2 == 0.0 || !std::isfinite(beta2)) {
    throw DomainError("fringe width: beta2 must be non-zero (infinite fringe)");
  }
  if (!(length > 0.0)) {
    throw DomainError("fringe width: length must be > 0");
  }
  const double l2 = pump.wavelength() * pump.wavelength();
  const double c = kSpeedOfLight;
  return {std::sqrt(l2 * l2 / (kTwoPi * c * c * std::abs(beta2) * length))};
}

double wavelength_offset_to_detuning(double delta_lambda, const SpectralPoint& pump) {
  return kTwoPi * kSpeedOfLight * delta_lambda / (pump.wavelength() * pump.wavelength());
}

}  // namespace sagnac
