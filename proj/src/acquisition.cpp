#include "sagnac/acquisition.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "sagnac/parallel.hpp"

namespace sagnac {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ splitmix64(v));
}

}  // namespace

void ScanPlan::validate() const {
  if (!(dwell > 0.0)) throw std::invalid_argument("scan: dwell must be > 0");
  if (signal_wavelengths.size() < 8) throw std::invalid_argument("scan: need at least 8 points");
  for (std::size_t k = 1; k < signal_wavelengths.size(); ++k) {
    if (!(signal_wavelengths[k] > signal_wavelengths[k - 1])) {
      throw std::invalid_argument("scan: signal wavelengths must be strictly increasing");
    }
  }
  if (!(signal_wavelengths.front() > 0.0)) {
    throw std::invalid_argument("scan: signal wavelengths must be positive");
  }
  if (!(peak_coincidence_rate > 0.0) || !(peak_singles_rate > 0.0)) {
    throw std::invalid_argument("scan: rates must be > 0");
  }
}

std::vector<double> linear_scan(const SpectralPoint& pump, int n_points, double span) {
  if (n_points < 2) throw std::invalid_argument("linear_scan: need at least 2 points");
  if (!(span > 0.0)) throw std::invalid_argument("linear_scan: span must be > 0");
  std::vector<double> out(static_cast<std::size_t>(n_points));
  const double start = pump.wavelength() - 0.5 * span;
  const double step = span / (n_points - 1);
  for (int k = 0; k < n_points; ++k) out[static_cast<std::size_t>(k)] = start + step * k;
  return out;
}

std::uint64_t derive_run_seed(std::uint64_t seed, std::uint64_t run) {
  return combine(seed, run);
}

std::uint64_t derive_draw_seed(std::uint64_t scan_seed, std::uint64_t point, Channel channel) {
  return combine(combine(scan_seed, point), static_cast<std::uint64_t>(channel));
}

std::int64_t poisson_draw(double mean, std::uint64_t key) {
  if (!(mean > 0.0)) return 0;
  std::mt19937_64 engine(key);
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(engine);
}

Interferogram run_scan(const TaylorDispersion& truth, const SimulationModel& model,
                       const ScanPlan& plan) {
  truth.validate();
  plan.validate();
  model.noise.validate();

  Interferogram out;
  out.pump_wavelength = plan.pump.wavelength();
  out.dwell = plan.dwell;
  out.seed = plan.seed;
  out.truth = SyntheticTruth{truth.beta2(), truth.length, truth.phi_off, model.visibility};
  out.points.reserve(plan.signal_wavelengths.size());

  for (std::size_t k = 0; k < plan.signal_wavelengths.size(); ++k) {
    const double lambda_s = plan.signal_wavelengths[k];
    std::optional<FilterPair> filt;
    try {
      filt.emplace(lambda_s, plan.pump, model.filter_bandwidth, model.filter_shape);
    } catch (const DomainError& e) {
      std::ostringstream msg;
      msg << "point " << k << " (lambda_s = " << lambda_s << " m) skipped: " << e.what();
      out.warnings.push_back(msg.str());
      continue;
    }
    const double coinc = coincidence_rate(truth, model.envelope, *filt, model.visibility,
                                          plan.peak_coincidence_rate, model.noise, model.rate);
    const auto [single_s, single_i] =
        singles_rate(model.envelope, *filt, plan.peak_singles_rate, model.noise, model.rate);

    InterferogramPoint p;
    p.signal_wavelength = lambda_s;
    p.idler_wavelength = filt->idler_center();
    const double mean_c = coinc * plan.dwell;
    const double mean_s = single_s * plan.dwell;
    const double mean_i = single_i * plan.dwell;
    if (model.noiseless) {
      p.coincidences = mean_c;
      p.singles_s = mean_s;
      p.singles_i = mean_i;
    } else {
      p.coincidences = static_cast<double>(
          poisson_draw(mean_c, derive_draw_seed(plan.seed, k, Channel::coincidences)));
      p.singles_s = static_cast<double>(
          poisson_draw(mean_s, derive_draw_seed(plan.seed, k, Channel::singles_signal)));
      p.singles_i = static_cast<double>(
          poisson_draw(mean_i, derive_draw_seed(plan.seed, k, Channel::singles_idler)));
    }
    out.points.push_back(p);
  }
  return out;
}

std::vector<Interferogram> mc_ensemble(const TaylorDispersion& truth, const SimulationModel& model,
                                       const ScanPlan& plan, int runs, unsigned threads) {
  if (runs < 1) throw std::invalid_argument("mc_ensemble: runs must be >= 1");
  std::vector<Interferogram> out(static_cast<std::size_t>(runs));
  parallel_for(out.size(), threads, [&](std::size_t k) {
    ScanPlan run_plan = plan;
    run_plan.seed = derive_run_seed(plan.seed, k);
    out[k] = run_scan(truth, model, run_plan);
  });
  return out;
}

}  // namespace sagnac
