#pragma once

// Polarization state algebra of the nonlinear Sagnac loop. A vertically
// polarized pump component runs clockwise and leaves as |HH>; the horizontal
// component runs counter-clockwise and leaves as |VV>. The two directions
// recombine coherently at the beam splitter.

#include <complex>
#include <stdexcept>

namespace sagnac {

using Complex = std::complex<double>;

struct PumpState {
  Complex amp_h{1.0, 0.0};
  Complex amp_v{0.0, 0.0};

  /// (|H> + |V>)/sqrt(2)
  static PumpState diagonal();
};

/// Phases collected along one loop direction. `phi_pump` is what the pump
/// picks up before conversion (phi_p, or 2 phi_0 when SHG precedes SPDC);
/// `phi_pair` is what the signal/idler pair picks up (phi_s + phi_i).
struct DirectionalPhase {
  double phi_pump = 0.0;
  double phi_pair = 0.0;
};

struct TwoPhotonState {
  Complex amp_hh;
  Complex amp_vv;

  /// arg(amp_vv) - arg(amp_hh), wrapped to (-pi, pi].
  double relative_phase() const;
};

class DegenerateStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Propagates the pump around both directions and superposes the pair
/// amplitudes. `brightness_ratio` is the clockwise/counter-clockwise pair
/// generation efficiency (1 = balanced).
TwoPhotonState propagate(const PumpState& pump, const DirectionalPhase& cwi,
                         const DirectionalPhase& ccwi, double brightness_ratio = 1.0);

/// Probability of a coincidence behind linear analyzers at the given angles.
double coincidence_probability(const TwoPhotonState& state, double analyzer_angle_s,
                               double analyzer_angle_i);

/// Diagonal-basis fringe scaled to peak 1: (1 + V cos dphi)/2.
double diagonal_fringe(const TwoPhotonState& state);

/// Two-photon visibility, with residual distinguishability between the two
/// directions folded into a single overlap factor in [0, 1].
double state_visibility(const TwoPhotonState& state, double overlap = 1.0);

}  // namespace sagnac
