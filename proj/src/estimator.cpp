#include "sagnac/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "sagnac/normality.hpp"
#include "sagnac/parallel.hpp"

namespace sagnac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_two_pi(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

/// |dD/dbeta2| in (ps/(nm km)) per (s^2/m).
double d_per_beta2(double wavelength) {
  return kTwoPi * kSpeedOfLight / (wavelength * wavelength) / kPsPerNmKm;
}

// Fit problem in an internal chart where the curvature parameter is the
// phase reached at the outermost detuning: s = beta2 * L * max|dw|^2, so
// all four unknowns are of order one.
class FringeProblem {
 public:
  using Vec4 = Eigen::Vector4d;
  using Mat4 = Eigen::Matrix4d;

  explicit FringeProblem(const NormalizedFringe& fringe) {
    const auto n = static_cast<Eigen::Index>(fringe.points.size());
    x_.resize(n);
    y_.resize(n);
    w_.resize(n);
    omega_max_ = 0.0;
    for (const auto& p : fringe.points) omega_max_ = std::max(omega_max_, std::abs(p.detuning));
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& p = fringe.points[static_cast<std::size_t>(k)];
      const double r = p.detuning / omega_max_;
      x_[k] = r * r;
      y_[k] = p.value;
      w_[k] = 1.0 / (p.sigma * p.sigma);
    }
  }

  Eigen::Index size() const { return x_.size(); }
  double omega_max() const { return omega_max_; }

  double model(const Vec4& t, Eigen::Index k) const {
    return 0.5 * t[3] * (1.0 + t[2] * std::cos(t[0] * x_[k] + t[1]));
  }

  double chi2(const Vec4& t) const {
    double c = 0.0;
    for (Eigen::Index k = 0; k < size(); ++k) {
      const double r = y_[k] - model(t, k);
      c += w_[k] * r * r;
    }
    return c;
  }

  // Gauss-Newton normal matrix J^T W J and gradient J^T W r.
  void normal_equations(const Vec4& t, Mat4& h, Vec4& g, double& chi2) const {
    h.setZero();
    g.setZero();
    chi2 = 0.0;
    for (Eigen::Index k = 0; k < size(); ++k) {
      const double phase = t[0] * x_[k] + t[1];
      const double c = std::cos(phase);
      const double s = std::sin(phase);
      Vec4 j;
      j[0] = -0.5 * t[3] * t[2] * s * x_[k];
      j[1] = -0.5 * t[3] * t[2] * s;
      j[2] = 0.5 * t[3] * c;
      j[3] = 0.5 * (1.0 + t[2] * c);
      const double r = y_[k] - 0.5 * t[3] * (1.0 + t[2] * c);
      h.noalias() += w_[k] * j * j.transpose();
      g.noalias() += w_[k] * r * j;
      chi2 += w_[k] * r * r;
    }
  }

  // Best (A, V, phi) at fixed curvature s: the model is linear in
  // (a, p, q) with y = a + p cos(s x) + q sin(s x).
  struct Projection {
    Vec4 params;
    double chi2;
  };
  Projection project(double s) const {
    const Eigen::Index n = size();
    Eigen::MatrixXd b(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double sw = std::sqrt(w_[k]);
      b(k, 0) = sw;
      b(k, 1) = sw * std::cos(s * x_[k]);
      b(k, 2) = sw * std::sin(s * x_[k]);
      rhs[k] = sw * y_[k];
    }
    const Eigen::Vector3d c = b.colPivHouseholderQr().solve(rhs);
    const double chi2 = (rhs - b * c).squaredNorm();
    const double amp = 2.0 * c[0];
    const double r = std::hypot(c[1], c[2]);
    const double vis = c[0] != 0.0 ? r / c[0] : 0.0;
    return {Vec4(s, std::atan2(-c[2], c[1]), vis, amp), chi2};
  }

  // Best (A, V) at fixed s and phi.
  Vec4 project_amplitude(double s, double phi) const {
    const Eigen::Index n = size();
    Eigen::MatrixXd b(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double sw = std::sqrt(w_[k]);
      b(k, 0) = sw;
      b(k, 1) = sw * std::cos(s * x_[k] + phi);
      rhs[k] = sw * y_[k];
    }
    const Eigen::Vector2d c = b.colPivHouseholderQr().solve(rhs);
    return Vec4(s, phi, c[0] != 0.0 ? c[1] / c[0] : 0.0, 2.0 * c[0]);
  }

 private:
  Eigen::VectorXd x_, y_, w_;
  double omega_max_ = 0.0;
};

double scaled_gradient(const Eigen::Matrix4d& h, const Eigen::Vector4d& g, double chi2) {
  if (chi2 <= 0.0) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (h(i, i) > 0.0) worst = std::max(worst, std::abs(g[i]) / std::sqrt(h(i, i) * chi2));
  }
  return worst;
}

}  // namespace

NormalizedFringe normalize(const Interferogram& raw, NormalizationConvention convention) {
  const SpectralPoint pump = SpectralPoint::from_wavelength(raw.pump_wavelength);
  NormalizedFringe out;
  out.pump_wavelength = raw.pump_wavelength;
  for (const auto& p : raw.points) {
    const bool geometric = convention == NormalizationConvention::geometric_mean;
    if (!(p.singles_s > 0.0) || (geometric && !(p.singles_i > 0.0)) || p.coincidences < 0.0) {
      ++out.dropped;
      continue;
    }
    const double norm = geometric ? std::sqrt(p.singles_s * p.singles_i) : p.singles_s;
    const double value = p.coincidences / norm;
    // First-order Poisson propagation; a zero-count bin keeps a one-count error.
    const double var_c = std::max(p.coincidences, 1.0);
    const double rel_singles = geometric ? 0.25 / p.singles_s + 0.25 / p.singles_i : 1.0 / p.singles_s;
    const double sigma = std::sqrt(var_c / (norm * norm) + value * value * rel_singles);
    out.points.push_back({detuning(SpectralPoint::from_wavelength(p.signal_wavelength), pump),
                          p.signal_wavelength, value, sigma});
  }
  if (out.points.size() < kMinFringePoints) {
    throw InsufficientDataError("normalize: fewer than " + std::to_string(kMinFringePoints) +
                                " usable points");
  }
  double peak = 0.0;
  for (const auto& p : out.points) peak = std::max(peak, p.value);
  out.scale = peak > 0.0 ? 1.0 / peak : 1.0;
  if (peak > 0.0) {
    for (auto& p : out.points) {
      p.value /= peak;
      p.sigma /= peak;
    }
  }
  return out;
}

double fringe_model(const FringeParams& p, double dw, double length) {
  return 0.5 * p[3] * (1.0 + p[2] * std::cos(p[0] * length * dw * dw + p[1]));
}

FringeParams fringe_jacobian(const FringeParams& p, double dw, double length) {
  const double q = length * dw * dw;
  const double phase = p[0] * q + p[1];
  const double s = std::sin(phase);
  const double c = std::cos(phase);
  return {-0.5 * p[3] * p[2] * s * q, -0.5 * p[3] * p[2] * s, 0.5 * p[3] * c, 0.5 * (1.0 + p[2] * c)};
}

double FitResult::beta2_sigma() const {
  return std::sqrt(covariance(0, 0));
}

double FitResult::d_sigma() const {
  return beta2_sigma() * d_per_beta2(pump_wavelength);
}

FitResult fit_cd(const NormalizedFringe& fringe, double sut_length, const SpectralPoint& pump,
                 const FitInit& init, const FitOptions& options) {
  if (!(sut_length > 0.0)) throw std::invalid_argument("fit_cd: sut_length must be > 0");
  if (fringe.points.size() < kMinFringePoints) {
    throw InsufficientDataError("fit_cd: fewer than " + std::to_string(kMinFringePoints) + " points");
  }
  for (const auto& p : fringe.points) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.value)) {
      throw std::invalid_argument("fit_cd: every point needs a finite value and sigma > 0");
    }
  }

  const FringeProblem problem(fringe);
  if (!(problem.omega_max() > 0.0)) throw InsufficientDataError("fit_cd: all points at degeneracy");
  const double chart = sut_length * problem.omega_max() * problem.omega_max();

  FitResult result;
  result.pump_wavelength = pump.wavelength();
  result.length = sut_length;
  result.n_points = fringe.points.size();

  Eigen::Vector4d t;
  if (init.explicit_beta2_phi) {
    t = problem.project_amplitude(init.explicit_beta2_phi->first * chart, init.explicit_beta2_phi->second);
  } else {
    // The model is even under (s, phi) -> (-s, -phi): half the range suffices.
    const double s_max =
        std::abs(d_to_beta2({options.grid_d_max, pump.wavelength()})) * chart;
    const int n_grid = std::clamp(static_cast<int>(std::ceil(s_max / options.grid_phase_step)) + 1, 2,
                                  options.max_grid_points);
    double best = kInf;
    int best_index = 0;
    for (int j = 0; j < n_grid; ++j) {
      const auto proj = problem.project(s_max * j / (n_grid - 1));
      if (proj.chi2 < best) {
        best = proj.chi2;
        best_index = j;
        t = proj.params;
      }
    }
    result.boundary_warning = best_index == n_grid - 1;
  }

  // Levenberg-Marquardt with Marquardt's diagonal scaling.
  Eigen::Matrix4d h;
  Eigen::Vector4d g;
  double chi2 = 0.0;
  double lambda = 1e-3;
  double gradient = kInf;
  bool converged = false;
  int iter = 0;
  problem.normal_equations(t, h, g, chi2);
  for (; iter < options.max_iterations; ++iter) {
    gradient = scaled_gradient(h, g, chi2);
    if (gradient < options.gradient_tolerance) {
      converged = true;
      break;
    }
    const double diag_floor = 1e-12 * h.diagonal().maxCoeff();
    bool accepted = false;
    while (!accepted && lambda < 1e12) {
      Eigen::Matrix4d a = h;
      for (int i = 0; i < 4; ++i) a(i, i) += lambda * std::max(h(i, i), diag_floor);
      const Eigen::Vector4d step = a.ldlt().solve(g);
      const Eigen::Vector4d trial = t + step;
      const double trial_chi2 = problem.chi2(trial);
      if (std::isfinite(trial_chi2) && trial_chi2 <= chi2) {
        const double reduction = chi2 - trial_chi2;
        t = trial;
        lambda = std::max(lambda * 0.1, 1e-15);
        accepted = true;
        const double step_rel = (step.array().abs() / (1.0 + t.array().abs())).maxCoeff();
        problem.normal_equations(t, h, g, chi2);
        if (step_rel < 1e-12 || reduction <= 1e-15 * chi2) {
          gradient = scaled_gradient(h, g, chi2);
          converged = true;
        }
      } else {
        lambda *= 10.0;
      }
    }
    if (converged) {
      ++iter;
      break;
    }
    if (!accepted) {
      // No downhill step at any damping: numerical floor of chi2.
      gradient = scaled_gradient(h, g, chi2);
      converged = gradient < 1e-6;
      result.message = "damping limit reached";
      break;
    }
  }
  if (!converged && result.message.empty()) result.message = "iteration limit reached";

  // Fold onto the canonical chart: V >= 0, s >= 0, then the requested branch.
  if (t[2] < 0.0) {
    t[2] = -t[2];
    t[1] += std::numbers::pi;
  }
  if (t[0] < 0.0) {
    t[0] = -t[0];
    t[1] = -t[1];
  }
  if (options.branch == DispersionBranch::anomalous) {
    t[0] = -t[0];
    t[1] = -t[1];
  }
  t[1] = wrap_two_pi(t[1]);
  problem.normal_equations(t, h, g, chi2);

  const Eigen::FullPivLU<Eigen::Matrix4d> lu(h);
  Eigen::Matrix4d cov = Eigen::Matrix4d::Constant(kInf);
  if (lu.isInvertible()) {
    const Eigen::Vector4d to_si(1.0 / chart, 1.0, 1.0, 1.0);
    cov = to_si.asDiagonal() * lu.inverse() * to_si.asDiagonal();
    cov = 0.5 * (cov + cov.transpose()).eval();
  }
  const bool cov_ok = cov.allFinite() && (cov.diagonal().array() >= 0.0).all();

  result.beta2 = t[0] / chart;
  result.phi_off = t[1];
  result.visibility = t[2];
  result.amplitude = t[3];
  result.covariance = cov;
  result.chi2_reduced = chi2 / static_cast<double>(problem.size() - 4);
  result.n_iterations = iter;
  result.gradient_norm = gradient;
  result.converged = converged && cov_ok && std::isfinite(result.chi2_reduced);
  result.d_value = beta2_to_d(result.beta2, pump.wavelength()).d_value;
  result.visibility_warning = result.visibility > 1.05;
  result.unidentifiable = !cov_ok || result.visibility < 3.0 * std::sqrt(cov(2, 2));
  if (!cov_ok && result.message.empty()) result.message = "singular normal matrix";
  if (std::abs(result.d_value) > options.grid_d_max) result.boundary_warning = true;
  return result;
}

std::vector<FitResult> fit_ensemble(std::span<const Interferogram> data, double sut_length,
                                    const FitOptions& options, NormalizationConvention convention,
                                    unsigned threads) {
  std::vector<FitResult> out(data.size());
  parallel_for(data.size(), threads, [&](std::size_t k) {
    const auto& raw = data[k];
    try {
      out[k] = fit_cd(normalize(raw, convention), sut_length,
                      SpectralPoint::from_wavelength(raw.pump_wavelength), FitInit::automatic(), options);
    } catch (const InsufficientDataError& e) {
      out[k].converged = false;
      out[k].pump_wavelength = raw.pump_wavelength;
      out[k].length = sut_length;
      out[k].message = e.what();
    }
  });
  return out;
}

double EnsembleStats::excluded_fraction() const {
  const double total = static_cast<double>(n + n_excluded);
  return total > 0.0 ? static_cast<double>(n_excluded) / total : 0.0;
}

EnsembleStats ensemble_stats(std::span<const FitResult> fits) {
  std::vector<double> d;
  d.reserve(fits.size());
  EnsembleStats out;
  for (const auto& f : fits) {
    if (f.converged && !f.unidentifiable) {
      d.push_back(f.d_value);
    } else {
      ++out.n_excluded;
    }
  }
  if (d.size() < 2) throw InsufficientDataError("ensemble_stats: fewer than 2 converged fits");
  out.n = d.size();
  // Shifted by the first value so identical inputs give exactly zero spread.
  const double shift = d.front();
  double offset = 0.0;
  for (double v : d) offset += v - shift;
  offset /= static_cast<double>(d.size());
  double ss = 0.0;
  for (double v : d) ss += (v - shift - offset) * (v - shift - offset);
  const double mean = shift + offset;
  out.mean_d = mean;
  out.std_d = std::sqrt(ss / static_cast<double>(d.size() - 1));
  out.relative_error = mean != 0.0 ? out.std_d / std::abs(mean) : kInf;
  out.normality_pvalue = d.size() >= 3 ? shapiro_wilk(d).p_value : 1.0;
  return out;
}

LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma) {
  if (x.size() != y.size() || x.size() != sigma.size()) {
    throw std::invalid_argument("weighted_line_fit: size mismatch");
  }
  if (x.size() < 2) throw InsufficientDataError("weighted_line_fit: need at least 2 points");
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(sigma[k] > 0.0)) throw std::invalid_argument("weighted_line_fit: sigma must be > 0");
    const double w = 1.0 / (sigma[k] * sigma[k]);
    sw += w;
    swx += w * x[k];
    swy += w * y[k];
  }
  LineFit out;
  out.x_ref = swx / sw;
  const double y_mean = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double w = 1.0 / (sigma[k] * sigma[k]);
    const double dx = x[k] - out.x_ref;
    sxx += w * dx * dx;
    sxy += w * dx * (y[k] - y_mean);
  }
  if (!(sxx > 0.0)) throw RankDeficiencyError("weighted_line_fit: all abscissae identical");
  out.slope = sxy / sxx;
  out.intercept = y_mean;
  out.slope_sigma = std::sqrt(1.0 / sxx);
  out.intercept_sigma = std::sqrt(1.0 / sw);
  return out;
}

TodResult fit_tod(std::span<const std::pair<SpectralPoint, FitResult>> sweep) {
  TodResult out;
  std::vector<double> x, y, s;
  for (const auto& [pump, fit] : sweep) {
    out.per_point.emplace_back(pump.wavelength(), fit);
    if (!fit.converged) continue;
    x.push_back(pump.wavelength() * 1e9);
    y.push_back(fit.d_value);
    s.push_back(fit.d_sigma());
  }
  if (x.size() < 3) throw InsufficientDataError("fit_tod: need at least 3 converged pump points");
  const LineFit line = weighted_line_fit(x, y, s);
  out.slope = line.slope;
  out.slope_uncertainty = line.slope_sigma;
  out.intercept_d = line.intercept;
  out.reference_wavelength = line.x_ref * 1e-9;
  return out;
}

FitResult subtract_reference(const FitResult& sample_fit, const FitResult& reference_fit) {
  if (!sample_fit.converged || !reference_fit.converged) {
    throw std::invalid_argument("subtract_reference: both fits must have converged");
  }
  if (std::abs(sample_fit.pump_wavelength - reference_fit.pump_wavelength) > 1e-12) {
    throw PumpMismatchError("subtract_reference: pump wavelengths differ by more than 1 pm");
  }
  FitResult out = sample_fit;
  out.beta2 = sample_fit.beta2 - reference_fit.beta2;
  out.d_value = sample_fit.d_value - reference_fit.d_value;
  out.covariance(0, 0) = sample_fit.covariance(0, 0) + reference_fit.covariance(0, 0);
  out.message = "reference subtracted";
  return out;
}

}  // namespace sagnac
