// sagnac-cd: simulate, fit and analyze quantum white-light interferograms
// from a nonlinear Sagnac loop.

#include <iostream>

#include <CLI11.hpp>

#include "sagnac/commands.hpp"

int main(int argc, char** argv) {
  using namespace sagnac;

  CLI::App app{"Chromatic dispersion from two-photon interferograms of a nonlinear Sagnac loop"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic interferogram (CSV + JSON metadata)");
  simulate->add_option("--config", sim.config, "Run configuration (JSON)")->required();
  simulate->add_option("--out", sim.out, "Output CSV path")->required();
  simulate->add_option("--seed", sim.seed, "Override the configured seed");
  simulate->add_flag("--noiseless", sim.noiseless, "Write expected counts instead of Poisson draws");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit D to an interferogram CSV");
  fit_cmd->add_option("--in", fit.in, "Interferogram CSV")->required();
  fit_cmd->add_option("--out", fit.out, "Fit result JSON")->required();
  fit_cmd->add_option("--convention", fit.convention, "Singles normalization: geometric | single");
  fit_cmd->add_option("--branch", fit.branch, "Sign prior on beta2: normal (D < 0) | anomalous (D > 0)");
  fit_cmd->add_option("--length", fit.length_m, "Sample length in m (default: from metadata)");
  fit_cmd->add_option("--pump", fit.pump_m, "Pump wavelength in m (default: from metadata or pairing)");

  McArgs mc;
  auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo ensemble of simulate + fit");
  mc_cmd->add_option("--config", mc.config, "Run configuration (JSON)")->required();
  mc_cmd->add_option("--runs", mc.runs, "Number of replicas")->required();
  mc_cmd->add_option("--out", mc.out, "Ensemble statistics JSON")->required();
  mc_cmd->add_option("--threads", mc.threads, "Worker threads (0 = all cores)");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Pump-wavelength sweep and dispersion-slope fit");
  sweep->add_option("--config", sw.config, "Run configuration (JSON)")->required();
  sweep->add_option("--start", sw.start_m, "First pump wavelength, m")->required();
  sweep->add_option("--stop", sw.stop_m, "Last pump wavelength, m")->required();
  sweep->add_option("--step", sw.step_m, "Pump step, m")->required();
  sweep->add_option("--slope", sw.slope_ps_nm2_km, "Generator dD/dlambda, ps/(nm^2 km)")->required();
  sweep->add_option("--out", sw.out, "Slope result JSON")->required();
  sweep->add_flag("--noiseless", sw.noiseless, "Use expected counts");
  sweep->add_option("--threads", sw.threads, "Worker threads (0 = all cores)");

  RangeMapArgs rm;
  auto* rangemap = app.add_subcommand("rangemap", "First-fringe width over sample length and D");
  rangemap->add_option("--lmin", rm.lmin_m, "Shortest sample, m")->required();
  rangemap->add_option("--lmax", rm.lmax_m, "Longest sample, m")->required();
  rangemap->add_option("--dmin", rm.dmin, "Lowest D, ps/(nm km)")->required();
  rangemap->add_option("--dmax", rm.dmax, "Highest D, ps/(nm km)")->required();
  rangemap->add_option("--out", rm.out, "Output CSV")->required();
  rangemap->add_option("--nl", rm.n_lengths, "Number of lengths (log-spaced)");
  rangemap->add_option("--nd", rm.n_cd, "Number of D values");
  rangemap->add_option("--pump", rm.pump_m, "Pump wavelength, m");
  rangemap->add_option("--filter-bw", rm.filter_bandwidth_m, "Filter bandwidth, m");
  rangemap->add_option("--source-bw", rm.source_bandwidth_m, "Single-photon spectral width, m");
  rangemap->add_option("--narrow-factor", rm.narrow_factor, "Narrowest fringe in filter bandwidths");

  PlotArgs pl;
  auto* plot = app.add_subcommand("plot", "Render a command output as SVG");
  plot->add_option("--in", pl.in, "Output of fit, mc, sweep or rangemap")->required();
  plot->add_option("--kind", pl.kind, "fringe | histogram | sweep | rangemap")->required();
  plot->add_option("--out", pl.out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code::usage;
  }

  if (simulate->parsed()) return cmd_simulate(sim, std::cout, std::cerr);
  if (fit_cmd->parsed()) return cmd_fit(fit, std::cout, std::cerr);
  if (mc_cmd->parsed()) return cmd_mc(mc, std::cout, std::cerr);
  if (sweep->parsed()) return cmd_sweep(sw, std::cout, std::cerr);
  if (rangemap->parsed()) return cmd_rangemap(rm, std::cout, std::cerr);
  if (plot->parsed()) return cmd_plot(pl, std::cout, std::cerr);
  return exit_code::usage;
}
