#include "sagnac/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sagnac/acquisition.hpp"
#include "sagnac/config.hpp"
#include "sagnac/estimator.hpp"
#include "sagnac/io.hpp"
#include "sagnac/parallel.hpp"
#include "sagnac/rangemap.hpp"
#include "sagnac/svg.hpp"

namespace sagnac {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Maps exceptions onto the exit-code table.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const std::ios_base::failure& e) {
    err << "i/o error: " << e.what() << '\n';
    return exit_code::io;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return exit_code::io;
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::no_convergence;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::no_convergence;
  }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

NormalizationConvention parse_convention(const std::string& s) {
  if (s == "geometric") return NormalizationConvention::geometric_mean;
  if (s == "single") return NormalizationConvention::single_channel;
  throw UsageError("--convention must be 'geometric' or 'single'");
}

DispersionBranch parse_branch(const std::string& s) {
  if (s == "normal") return DispersionBranch::normal;
  if (s == "anomalous") return DispersionBranch::anomalous;
  throw UsageError("--branch must be 'normal' or 'anomalous'");
}

std::string summary_line(const FitResult& fit) {
  std::ostringstream s;
  s.precision(6);
  s << std::fixed << "D = " << fit.d_value << " ± " << fit.d_sigma() << " ps/(nm.km)";
  return s.str();
}

double config_d(const RunConfig& cfg) {
  return cfg.sut.d_ps_nm_km ? *cfg.sut.d_ps_nm_km : beta2_to_d(*cfg.sut.beta2_si, cfg.pump_m).d_value;
}

}  // namespace

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load_config(args.config.string());
    if (args.seed) cfg.seed = *args.seed;
    const Interferogram data = run_scan(cfg.dispersion(), cfg.model(args.noiseless), cfg.plan());
    for (const auto& w : data.warnings) err << "warning: " << w << '\n';

    std::ostringstream csv;
    write_interferogram_csv(csv, data);
    write_text_file(args.out, csv.str());
    write_text_file(sidecar_path(args.out), dump(metadata_json(data)));

    double peak = 0.0;
    for (const auto& p : data.points) peak = std::max(peak, p.coincidences);
    out << "wrote " << data.points.size() << " points to " << args.out.string() << " (peak "
        << peak << " coincidences)\n";
    return exit_code::ok;
  });
}

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto convention = parse_convention(args.convention);
    FitOptions options;
    options.branch = parse_branch(args.branch);

    Interferogram data;
    {
      std::ifstream in(args.in);
      if (!in) throw std::ios_base::failure("cannot open for reading: " + args.in.string());
      data = read_interferogram_csv(in);
    }
    const auto meta_path = sidecar_path(args.in);
    if (std::filesystem::exists(meta_path)) {
      apply_metadata(json::parse(read_text_file(meta_path)), data);
    }
    if (args.pump_m) data.pump_wavelength = *args.pump_m;
    double length = 0.0;
    if (args.length_m) {
      length = *args.length_m;
    } else if (data.truth) {
      length = data.truth->length;
    } else {
      throw UsageError("sample length unknown: pass --length or provide a metadata sidecar");
    }
    if (!(length > 0.0)) throw UsageError("--length must be > 0");

    const NormalizedFringe fringe = normalize(data, convention);
    const FitResult fit =
        fit_cd(fringe, length, SpectralPoint::from_wavelength(data.pump_wavelength), FitInit::automatic(), options);

    ordered_json report = to_json(fit);
    report["convention"] = args.convention;
    report["fringe"] = to_json(fringe);
    write_text_file(args.out, dump(report));

    out << summary_line(fit) << '\n';
    if (!fit.converged) {
      err << "fit did not converge: " << fit.message << '\n';
      return exit_code::no_convergence;
    }
    if (fit.unidentifiable) {
      err << "fringe contrast not resolved; D is undetermined\n";
      return exit_code::no_convergence;
    }
    return exit_code::ok;
  });
}

int cmd_mc(const McArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.runs < 2) throw UsageError("--runs must be >= 2");
    const RunConfig cfg = load_config(args.config.string());
    const TaylorDispersion truth = cfg.dispersion();
    const ScanPlan plan = cfg.plan();
    const auto data = mc_ensemble(truth, cfg.model(), plan, args.runs, args.threads);
    FitOptions options;
    options.branch = cfg.branch();
    const auto fits = fit_ensemble(data, cfg.sut.length_m, options, NormalizationConvention::geometric_mean,
                                   args.threads);

    std::ostringstream runs_csv;
    runs_csv << "run,seed,d_ps_nm_km,d_sigma_ps_nm_km,visibility,chi2_reduced,converged\n";
    std::vector<double> d_values;
    for (std::size_t k = 0; k < fits.size(); ++k) {
      const auto& f = fits[k];
      runs_csv << k << ',' << data[k].seed << ',' << format_number(f.d_value) << ','
               << format_number(f.d_sigma()) << ',' << format_number(f.visibility) << ','
               << format_number(f.chi2_reduced) << ',' << (f.converged ? 1 : 0) << '\n';
      if (f.converged && !f.unidentifiable) d_values.push_back(f.d_value);
    }

    const EnsembleStats stats = ensemble_stats(fits);
    const Histogram hist = make_histogram(d_values);
    ordered_json report = to_json(stats);
    report["truth_d_ps_nm_km"] = beta2_to_d(truth.beta2(), cfg.pump_m).d_value;
    report["runs"] = args.runs;
    report["histogram"] = {{"edges_ps_nm_km", hist.edges}, {"counts", hist.counts}};
    report["config"] = to_json(cfg);

    write_text_file(args.out, dump(report));
    write_text_file(derived_path(args.out, "runs", "csv"), runs_csv.str());

    out.precision(6);
    out << std::fixed << "mean D = " << stats.mean_d << " ps/(nm.km), std = " << std::scientific
        << stats.std_d << ", relative error = " << stats.relative_error << " (n = " << stats.n << ")\n";
    if (stats.normality_warning()) {
      err << "warning: normality p-value " << stats.normality_pvalue << " below "
          << EnsembleStats::kNormalityWarning << '\n';
    }
    if (stats.failed()) {
      err << "error: " << stats.n_excluded << " runs did not converge\n";
      return exit_code::no_convergence;
    }
    return exit_code::ok;
  });
}

std::vector<double> sweep_pumps(double start_m, double stop_m, double step_m) {
  if (step_m == 0.0 || !std::isfinite(step_m)) throw std::invalid_argument("sweep step must be non-zero");
  const double lo = std::min(start_m, stop_m);
  const double hi = std::max(start_m, stop_m);
  const double step = std::abs(step_m);
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> pumps(n);
  for (std::size_t k = 0; k < n; ++k) pumps[k] = lo + step * static_cast<double>(k);
  return pumps;
}

std::vector<std::pair<SpectralPoint, FitResult>> simulate_sweep(const RunConfig& cfg,
                                                                std::span<const double> pumps_m,
                                                                double slope_ps_nm2_km, bool noiseless,
                                                                unsigned threads) {
  const double d0 = config_d(cfg);
  const SimulationModel model = cfg.model(noiseless);
  FitOptions options;
  options.branch = cfg.branch();

  std::vector<std::pair<SpectralPoint, FitResult>> sweep(pumps_m.size(), {cfg.pump(), FitResult{}});
  parallel_for(pumps_m.size(), threads, [&](std::size_t k) {
    const SpectralPoint pump = SpectralPoint::from_wavelength(pumps_m[k]);
    const double d = d0 + slope_ps_nm2_km * (pumps_m[k] - cfg.pump_m) * 1e9;
    const TaylorDispersion truth =
        make_dispersion(pump, d_to_beta2({d, pumps_m[k]}), cfg.sut.length_m, cfg.sut.phi_off_rad);
    ScanPlan plan = cfg.plan();
    plan.pump = pump;
    plan.signal_wavelengths = linear_scan(pump, cfg.scan.n_points, cfg.scan.span_m);
    plan.seed = derive_run_seed(cfg.seed, k);
    const Interferogram data = run_scan(truth, model, plan);
    sweep[k] = {pump, fit_cd(normalize(data), cfg.sut.length_m, pump, FitInit::automatic(), options)};
  });
  return sweep;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.step_m == 0.0 || !std::isfinite(args.step_m)) throw UsageError("--step must be non-zero");
    const RunConfig cfg = load_config(args.config.string());
    const auto pumps = sweep_pumps(args.start_m, args.stop_m, args.step_m);
    if (pumps.size() < 3) throw UsageError("sweep needs at least 3 pump wavelengths");

    const auto sweep = simulate_sweep(cfg, pumps, args.slope_ps_nm2_km, args.noiseless, args.threads);
    const TodResult tod = fit_tod(sweep);
    ordered_json report = to_json(tod);
    report["generator_slope_ps_nm2_km"] = args.slope_ps_nm2_km;
    write_text_file(args.out, dump(report));

    std::ostringstream csv;
    csv << "pump_m,d_ps_nm_km,d_sigma_ps_nm_km\n";
    for (const auto& [pump, fit] : sweep) {
      csv << format_number(pump.wavelength()) << ',' << format_number(fit.d_value) << ','
          << format_number(fit.d_sigma()) << '\n';
    }
    write_text_file(derived_path(args.out, "points", "csv"), csv.str());

    out.precision(5);
    out << std::fixed << "TOD slope = " << tod.slope << " ± " << tod.slope_uncertainty
        << " ps/(nm^2.km) over " << pumps.size() << " pump wavelengths\n";
    const bool all_converged =
        std::all_of(sweep.begin(), sweep.end(), [](const auto& p) { return p.second.converged; });
    return all_converged ? exit_code::ok : exit_code::no_convergence;
  });
}

int cmd_rangemap(const RangeMapArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ZoneThresholds thresholds;
    thresholds.filter_bandwidth = args.filter_bandwidth_m;
    thresholds.source_width = args.source_bandwidth_m;
    thresholds.narrow_factor = args.narrow_factor;
    const RangeMapGrid grid =
        make_range_map(SpectralPoint::from_wavelength(args.pump_m), args.lmin_m, args.lmax_m, args.n_lengths,
                       args.dmin, args.dmax, args.n_cd, thresholds);
    std::ostringstream csv;
    write_range_map_csv(csv, grid);
    write_text_file(args.out, csv.str());

    std::size_t counts[4] = {0, 0, 0, 0};
    for (Zone z : grid.zones) counts[static_cast<int>(z)]++;
    out << "wrote " << grid.zones.size() << " cells: " << counts[0] << " too_narrow, " << counts[1]
        << " accessible, " << counts[2] << " wide, " << counts[3] << " too_wide\n";
    return exit_code::ok;
  });
}

int cmd_plot(const PlotArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string text = read_text_file(args.in);
    std::string svg;
    if (args.kind == "rangemap") {
      std::istringstream in(text);
      try {
        svg = plot_range_map(read_range_map_csv(in));
      } catch (const FormatError& e) {
        throw UsageError(std::string("input is not a range map: ") + e.what());
      }
    } else if (args.kind == "fringe" || args.kind == "histogram" || args.kind == "sweep") {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::parse_error&) {
        throw UsageError("input is not a JSON report; kind '" + args.kind + "' expects one");
      }
      const std::string doc = j.is_object() ? j.value("kind", "") : "";
      if (args.kind == "fringe") {
        if (doc != "fit_result" || !j.contains("fringe")) throw UsageError("fringe plot needs a fit output");
        svg = plot_fringe(fringe_from_json(j["fringe"]), fit_from_json(j));
      } else if (args.kind == "histogram") {
        if (doc != "ensemble_stats" || !j.contains("histogram")) {
          throw UsageError("histogram plot needs an mc output");
        }
        Histogram h;
        h.edges = j["histogram"].at("edges_ps_nm_km").get<std::vector<double>>();
        h.counts = j["histogram"].at("counts").get<std::vector<std::size_t>>();
        svg = plot_histogram(h, j.at("mean_d_ps_nm_km").get<double>(), j.at("std_d_ps_nm_km").get<double>(),
                             j.at("n").get<std::size_t>());
      } else {
        if (doc != "tod_result") throw UsageError("sweep plot needs a sweep output");
        svg = plot_sweep(tod_from_json(j));
      }
    } else {
      throw UsageError("--kind must be one of fringe, histogram, sweep, rangemap");
    }
    write_text_file(args.out, svg);
    out << "wrote " << args.out.string() << '\n';
    return exit_code::ok;
  });
}

}  // namespace sagnac
