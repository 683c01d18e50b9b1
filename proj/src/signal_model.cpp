#include "sagnac/signal_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace sagnac {

namespace {

struct QuadratureRule {
  std::array<double, 9> nodes;    // offsets in units of the filter bandwidth
  std::array<double, 9> weights;  // sum to 1
};

// Gauss-Legendre on [-1/2, 1/2] for a flat-top passband.
constexpr QuadratureRule kRectangularRule = [] {
  constexpr std::array<double, 9> x = {-0.9681602395076261, -0.8360311073266358, -0.6133714327005904,
                                       -0.3242534234038089, 0.0,                 0.3242534234038089,
                                       0.6133714327005904,  0.8360311073266358,  0.9681602395076261};
  constexpr std::array<double, 9> w = {0.0812743883615744, 0.1806481606948574, 0.2606106964029354,
                                       0.3123470770400029, 0.3302393550012598, 0.3123470770400029,
                                       0.2606106964029354, 0.1806481606948574, 0.0812743883615744};
  QuadratureRule r{};
  for (std::size_t k = 0; k < 9; ++k) {
    r.nodes[k] = 0.5 * x[k];
    r.weights[k] = 0.5 * w[k];
  }
  return r;
}();

// Gauss-Hermite for a Gaussian passband whose FWHM is the bandwidth:
// exp(-4 ln2 d^2) = exp(-u^2) with d = u / (2 sqrt(ln 2)).
const QuadratureRule kGaussianRule = [] {
  constexpr std::array<double, 9> u = {-3.190993201781528, -2.266580584531843, -1.468553289216668,
                                       -0.7235510187528376, 0.0,               0.7235510187528376,
                                       1.468553289216668,  2.266580584531843,  3.190993201781528};
  constexpr std::array<double, 9> w = {3.960697726326438e-05, 4.943624275536947e-03, 8.847452739437657e-02,
                                       4.326515590025558e-01, 7.202352156060510e-01, 4.326515590025558e-01,
                                       8.847452739437657e-02, 4.943624275536947e-03, 3.960697726326438e-05};
  QuadratureRule r{};
  const double scale = 1.0 / (2.0 * std::sqrt(std::numbers::ln2));
  for (std::size_t k = 0; k < 9; ++k) {
    r.nodes[k] = u[k] * scale;
    r.weights[k] = w[k] / std::sqrt(std::numbers::pi);
  }
  return r;
}();

const QuadratureRule& rule_for(FilterShape shape) {
  return shape == FilterShape::rectangular ? kRectangularRule : kGaussianRule;
}

double sinc(double x) {
  return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

// Passband average of f(signal wavelength) or the value at the filter center.
template <class F>
double over_passband(const FilterPair& filt, double center, const RateOptions& options, F&& f) {
  if (!options.integrate_passband) return f(center);
  const auto& rule = rule_for(filt.shape());
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    acc += rule.weights[k] * f(center + rule.nodes[k] * filt.bandwidth());
  }
  return acc;
}

double envelope_at(const PhaseMatchingEnvelope& env, double lambda) {
  return envelope_value(env, detuning(SpectralPoint::from_wavelength(lambda), env.center));
}

}  // namespace

FilterPair::FilterPair(double signal_center, const SpectralPoint& pump, double bandwidth,
                       FilterShape shape)
    : signal_center_(signal_center),
      idler_center_(idler_partner(signal_center, pump.wavelength())),
      bandwidth_(bandwidth),
      shape_(shape),
      pump_(pump) {
  if (!(bandwidth > 0.0)) {
    throw std::invalid_argument("filter: bandwidth must be > 0");
  }
}

void NoiseSpec::validate() const {
  if (!(sbrs_coincidence_fraction >= 0.0) || !(sbrs_singles_rate >= 0.0)) {
    throw std::invalid_argument("noise: SBRS terms must be >= 0");
  }
}

double idler_partner(double signal, double pump) {
  if (!(signal > 0.0) || !(pump > 0.0)) {
    throw DomainError("idler_partner: wavelengths must be positive");
  }
  const double inv = 2.0 / pump - 1.0 / signal;
  if (!(inv > 0.0)) {
    throw DomainError("idler_partner: signal lies beyond the energy-conservation pole");
  }
  return 1.0 / inv;
}

double envelope_value(const PhaseMatchingEnvelope& env, double dw) {
  const double half_width = wavelength_offset_to_detuning(0.5 * env.fwhm, env.center);
  const double r = dw / half_width;
  switch (env.shape) {
    case EnvelopeShape::sinc2: {
      const double s = sinc(kSinc2HalfMaxArgument * r);
      return s * s;
    }
    case EnvelopeShape::gaussian:
      return std::exp(-std::numbers::ln2 * r * r);
  }
  return 0.0;
}

double coincidence_rate(const TaylorDispersion& disp, const PhaseMatchingEnvelope& env,
                        const FilterPair& filt, double visibility, double peak_rate,
                        const NoiseSpec& noise, const RateOptions& options) {
  if (!(peak_rate > 0.0)) throw std::invalid_argument("coincidence_rate: peak_rate must be > 0");
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::invalid_argument("coincidence_rate: visibility must lie in [0, 1]");
  }
  const SpectralPoint& pump = filt.pump();
  const double pair = over_passband(filt, filt.signal_center(), options, [&](double lambda_s) {
    const double lambda_i = idler_partner(lambda_s, pump.wavelength());
    const double dw_s = detuning(SpectralPoint::from_wavelength(lambda_s), pump);
    double phase = 0.0;
    if (options.phase == PhaseEvaluation::symmetric) {
      phase = pair_phase(disp, dw_s);
    } else {
      const double dw_i = detuning(SpectralPoint::from_wavelength(lambda_i), pump);
      phase = branch_phase(disp, dw_s, dw_i);
    }
    // Pair envelope is the geometric mean of the two single-photon envelopes;
    // it reduces to E(dw) when the pump sits at the envelope center.
    const double e_s = envelope_at(env, lambda_s);
    const double e_i = envelope_at(env, lambda_i);
    const double envelope = e_s == e_i ? e_s : std::sqrt(e_s * e_i);
    return envelope * 0.5 * (1.0 + visibility * std::cos(phase));
  });
  return std::max(0.0, peak_rate * pair + peak_rate * noise.sbrs_coincidence_fraction);
}

std::pair<double, double> singles_rate(const PhaseMatchingEnvelope& env, const FilterPair& filt,
                                       double peak_singles, const NoiseSpec& noise,
                                       const RateOptions& options) {
  if (!(peak_singles > 0.0)) throw std::invalid_argument("singles_rate: peak_singles must be > 0");
  auto channel = [&](double center) {
    return over_passband(filt, center, options,
                         [&](double lambda) { return envelope_at(env, lambda); });
  };
  return {peak_singles * channel(filt.signal_center()) + noise.sbrs_singles_rate,
          peak_singles * channel(filt.idler_center()) + noise.sbrs_singles_rate};
}

}  // namespace sagnac
