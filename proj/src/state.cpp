#include "sagnac/state.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sagnac {

PumpState PumpState::diagonal() {
  const double a = 1.0 / std::numbers::sqrt2;
  return {Complex{a, 0.0}, Complex{a, 0.0}};
}

double TwoPhotonState::relative_phase() const {
  return std::arg(amp_vv * std::conj(amp_hh));
}

TwoPhotonState propagate(const PumpState& pump, const DirectionalPhase& cwi,
                         const DirectionalPhase& ccwi, double brightness_ratio) {
  if (!(brightness_ratio > 0.0)) {
    throw std::invalid_argument("propagate: brightness_ratio must be > 0");
  }
  if (std::abs(pump.amp_h) == 0.0 && std::abs(pump.amp_v) == 0.0) {
    throw DegenerateStateError("propagate: pump has no amplitude in either polarization");
  }
  Complex hh = pump.amp_v * std::sqrt(brightness_ratio) * std::polar(1.0, cwi.phi_pump);
  Complex vv = pump.amp_h * std::polar(1.0, ccwi.phi_pair);
  const double norm = std::sqrt(std::norm(hh) + std::norm(vv));
  return {hh / norm, vv / norm};
}

double coincidence_probability(const TwoPhotonState& state, double analyzer_angle_s,
                               double analyzer_angle_i) {
  const Complex amp = std::cos(analyzer_angle_s) * std::cos(analyzer_angle_i) * state.amp_hh +
                      std::sin(analyzer_angle_s) * std::sin(analyzer_angle_i) * state.amp_vv;
  return std::norm(amp);
}

double diagonal_fringe(const TwoPhotonState& state) {
  const double quarter = std::numbers::pi / 4.0;
  const double total = std::norm(state.amp_hh) + std::norm(state.amp_vv);
  return 2.0 * coincidence_probability(state, quarter, quarter) / total;
}

double state_visibility(const TwoPhotonState& state, double overlap) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) {
    throw std::invalid_argument("state_visibility: overlap must lie in [0, 1]");
  }
  const double a = std::abs(state.amp_hh);
  const double b = std::abs(state.amp_vv);
  return overlap * 2.0 * a * b / (a * a + b * b);
}

}  // namespace sagnac
