#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "miselbo/config.hpp"
#include "miselbo/errors.hpp"
#include "miselbo/estimators.hpp"
#include "miselbo/experiments.hpp"
#include "miselbo/report.hpp"
#include "miselbo/svg.hpp"
#include "miselbo/training.hpp"

namespace {

using namespace miselbo;

void write_trace_csv(const std::string& path, const std::vector<FitResult>& results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << "label,iteration,elbo\n";
  for (const auto& r : results)
    for (std::size_t i = 0; i < r.elbo_trace.size(); ++i)
      out << r.label << ',' << i + 1 << ',' << format_number(r.elbo_trace[i]) << "\n";
}

Target resolve_target(const std::string& target_id, const ExperimentConfig& config) {
  if (!target_id.empty()) return make_setting(target_id);
  if (!config.target_spec.is_null()) return target_from_spec(config.target_spec);
  throw ConfigError("no target given; pass --target <id> or put one in the config file");
}

int run_fit(const std::string& target_id, const std::string& init_path, std::size_t iters,
            std::size_t mc, double lr, std::uint64_t seed, const std::string& out_path,
            const std::string& trace_path, bool serial) {
  const ExperimentConfig config = load_config(init_path);
  if (config.members.empty()) throw ConfigError("config '" + init_path + "' has no members");
  const Target target = resolve_target(target_id, config);

  FitConfig fit_config;
  fit_config.iterations = iters;
  fit_config.samples_per_iter = mc;
  fit_config.adam.lr = lr;
  fit_config.seed = {seed, ""};

  const bool analytic = target.has_analytic_gradient();
  std::cerr << "fitting " << config.members.size() << " member(s) against '" << target.name()
            << "' (" << (analytic ? "analytic" : "finite-difference") << " target gradient)\n";

  EnsembleFit fit = fit_ensemble(target, config.members, fit_config, !serial);

  nlohmann::json target_spec = config.target_spec;
  if (!target_id.empty()) target_spec = target_id;
  std::vector<Member> fitted;
  for (const auto& r : fit.members) fitted.push_back({r.label, r.approx});
  save_ensemble_config(out_path, target_spec, fitted);
  if (!trace_path.empty()) write_trace_csv(trace_path, fit.members);

  for (const auto& r : fit.members)
    std::cerr << "  " << r.label << ": final elbo " << format_number(r.elbo_trace.back()) << "\n";
  std::cerr << "wrote " << out_path << "\n";
  return 0;
}

int run_estimate(const std::string& target_id, const std::string& ensemble_path, std::size_t L,
                 std::size_t replicates, std::uint64_t seed, const std::string& out_path) {
  const ExperimentConfig config = load_config(ensemble_path);
  if (config.members.empty()) throw ConfigError("config '" + ensemble_path + "' has no members");
  const Target target = resolve_target(target_id, config);
  const Ensemble ensemble(target, config.members);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + out_path + "' for writing");
  out << "estimator,S,L,replicate,value\n";

  const SeedSpec spec{seed, ""};
  const auto emit = [&](const std::string& name, EstimatorKind kind,
                        std::optional<std::size_t> member) {
    std::vector<double> values(replicates);
    for (std::size_t r = 0; r < replicates; ++r) {
      const SampleBatch batch = draw_batch(ensemble, L, spec, r);
      values[r] = evaluate_estimator(kind, batch, L, member);
      out << name << ',' << ensemble.size() << ',' << L << ',' << r << ','
          << format_number(values[r]) << "\n";
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(replicates);
    double sd = 0.0;
    if (replicates > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      sd = std::sqrt(ss / static_cast<double>(replicates - 1));
    }
    out << name << ',' << ensemble.size() << ',' << L << ",mean," << format_number(mean) << "\n";
    out << name << ',' << ensemble.size() << ',' << L << ",std," << format_number(sd) << "\n";
  };

  for (EstimatorKind kind : all_estimators()) {
    if (kind == EstimatorKind::kElbo || kind == EstimatorKind::kIwelbo) {
      for (std::size_t s = 0; s < ensemble.size(); ++s)
        emit(std::string(estimator_name(kind)) + "[" + ensemble.member(s).label + "]", kind, s);
    } else {
      emit(std::string(estimator_name(kind)), kind, {});
    }
  }
  std::cerr << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensembles of variational approximations with the MISELBO estimator family"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit Gaussian members to a target by ELBO ascent");
  std::string fit_target, fit_init, fit_out = "ensemble.json", fit_trace;
  std::size_t fit_iters = 10000, fit_mc = 1000;
  double fit_lr = 1e-3;
  std::uint64_t fit_seed = 0;
  bool fit_serial = false;
  fit->add_option("--target", fit_target, "Target id (overrides config)");
  fit->add_option("--init", fit_init, "Member init config (JSON)")->required();
  fit->add_option("--iters", fit_iters, "Adam iterations");
  fit->add_option("--mc", fit_mc, "Samples per iteration");
  fit->add_option("--lr", fit_lr, "Adam learning rate");
  fit->add_option("--seed", fit_seed, "Training root seed");
  fit->add_option("--out", fit_out, "Fitted ensemble JSON path");
  fit->add_option("--trace", fit_trace, "ELBO trace CSV path");
  fit->add_flag("--serial", fit_serial, "Fit members serially");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Evaluate the estimator family on an ensemble");
  std::string est_target, est_ensemble, est_out = "estimates.csv";
  std::size_t est_L = 1, est_replicates = 5;
  std::uint64_t est_seed = 0;
  estimate->add_option("--target", est_target, "Target id (overrides config)");
  estimate->add_option("--ensemble", est_ensemble, "Ensemble config (JSON)")->required();
  estimate->add_option("--L", est_L, "Importance samples per member");
  estimate->add_option("--replicates", est_replicates, "Independent batches");
  estimate->add_option("--seed", est_seed, "Root seed");
  estimate->add_option("--out", est_out, "Output CSV path");

  // sweep-shift
  auto* shift = app.add_subcommand("sweep-shift", "Sweep q1's mean and report jsd and delta");
  ShiftSweepConfig shift_config;
  std::string shift_out = "sweep_shift.csv", shift_plot;
  shift->add_option("--setting", shift_config.setting, "Target setting: i, ii, iii");
  shift->add_option("--grid", shift_config.grid, "mu_1 grid values")->delimiter(',');
  shift->add_option("--L", shift_config.L_list, "L values")->delimiter(',');
  shift->add_option("--samples", shift_config.samples, "Per-member batch size");
  shift->add_option("--replicates", shift_config.replicates, "Replicate batches");
  shift->add_option("--seed", shift_config.seed, "Root seed");
  shift->add_option("--out", shift_out, "Output CSV path");
  shift->add_option("--plot", shift_plot, "Optional overlay SVG path");

  // sweep-hier
  auto* hier = app.add_subcommand("sweep-hier", "Sweep q1's mu-variance in the hierarchical model");
  HierSweepConfig hier_config;
  std::string hier_out = "sweep_hier.csv", hier_plot;
  hier->add_option("--grid", hier_config.variance_grid, "sigma1^2 grid values")->delimiter(',');
  hier->add_option("--L", hier_config.L_list, "L values")->delimiter(',');
  hier->add_option("--sigma2-squared", hier_config.sigma2_squared, "Fixed sigma2^2");
  hier->add_option("--cond-sigma", hier_config.cond_sigma, "Conditional sigma of q(z|mu)");
  hier->add_option("--samples", hier_config.samples, "Per-member batch size");
  hier->add_option("--replicates", hier_config.replicates, "Replicate batches");
  hier->add_option("--seed", hier_config.seed, "Root seed");
  hier->add_option("--out", hier_out, "Output CSV path");
  hier->add_option("--plot", hier_plot, "Optional overlay SVG path");

  // reproduce-511
  auto* repro = app.add_subcommand("reproduce-511", "Fit the p1/p2 presets and report KLs and JSD");
  Run511Config repro_config;
  std::string repro_out = "table2.csv", repro_ensemble_out;
  repro->add_option("--variant", repro_config.variant, "p1 or p2");
  repro->add_option("--target", repro_config.target_id, "Target id override");
  repro->add_option("--seed", repro_config.train_seed, "Training root seed");
  repro->add_option("--eval-seed", repro_config.eval_seed, "Evaluation root seed");
  repro->add_option("--iters", repro_config.iterations, "Adam iterations");
  repro->add_option("--mc", repro_config.samples_per_iter, "Samples per iteration");
  repro->add_option("--lr", repro_config.lr, "Adam learning rate");
  repro->add_option("--sigma", repro_config.sigma, "Fixed member scale");
  repro->add_option("--eval-samples", repro_config.eval_samples, "Evaluation batch size");
  repro->add_option("--replicates", repro_config.replicates, "Evaluation replicates");
  repro->add_flag("--smoke", repro_config.smoke, "10x reduced budget");
  repro->add_option("--out", repro_out, "Output CSV path");
  repro->add_option("--ensemble-out", repro_ensemble_out, "Fitted ensemble JSON path");

  // verify
  auto* ver = app.add_subcommand("verify", "Run the identity and bound suite");
  VerifyConfig verify_config;
  std::string verify_out = "verify.csv";
  ver->add_option("--seed", verify_config.seed, "Root seed");
  ver->add_option("--ensembles", verify_config.ensembles, "Random ensemble count");
  ver->add_option("--identity-samples", verify_config.identity_samples, "Batch size for identities");
  ver->add_option("--bound-replicates", verify_config.bound_replicates, "Batches per bound check");
  ver->add_option("--out", verify_out, "Output CSV path");

  // plot
  auto* plot = app.add_subcommand("plot", "Render a report CSV as a static SVG");
  std::string plot_in, plot_out = "plot.svg", plot_kind = "curve";
  std::vector<std::string> plot_estimators;
  plot->add_option("--in", plot_in, "Report CSV path")->required();
  plot->add_option("--kind", plot_kind, "curve or overlay");
  plot->add_option("--estimator", plot_estimators, "Estimator filter")->delimiter(',');
  plot->add_option("--out", plot_out, "Output SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed())
      return run_fit(fit_target, fit_init, fit_iters, fit_mc, fit_lr, fit_seed, fit_out, fit_trace,
                     fit_serial);
    if (estimate->parsed())
      return run_estimate(est_target, est_ensemble, est_L, est_replicates, est_seed, est_out);
    if (shift->parsed()) {
      const Report report = run_512_shift(shift_config);
      write_report_csv(report, shift_out);
      if (!shift_plot.empty()) emit_plot(report, PlotKind::kOverlay, shift_plot);
      std::cerr << "wrote " << shift_out << "\n";
      return 0;
    }
    if (hier->parsed()) {
      const Report report = run_512_hier(hier_config);
      write_report_csv(report, hier_out);
      if (!hier_plot.empty()) emit_plot(report, PlotKind::kOverlay, hier_plot);
      std::cerr << "wrote " << hier_out << "\n";
      return 0;
    }
    if (repro->parsed()) {
      const Run511Result result = run_511(repro_config);
      write_report_csv(result.report, repro_out);
      if (!repro_ensemble_out.empty()) {
        std::vector<Member> fitted;
        for (const auto& r : result.fit.members) fitted.push_back({r.label, r.approx});
        nlohmann::json target_spec =
            repro_config.target_id.empty()
                ? nlohmann::json(repro_config.variant + "-squared")
                : nlohmann::json(repro_config.target_id);
        save_ensemble_config(repro_ensemble_out, target_spec, fitted);
      }
      for (const auto& row : result.report.rows)
        std::cout << row.estimator << " = " << format_number(row.mean) << " +- "
                  << format_number(row.std) << "\n";
      std::cerr << "wrote " << repro_out << "\n";
      return 0;
    }
    if (ver->parsed()) {
      const VerifyResult result = verify(verify_config);
      write_report_csv(result.report, verify_out);
      std::size_t warns = 0, fails = 0;
      for (const auto& row : result.report.rows) {
        if (row.verdict == "warn") ++warns;
        if (row.verdict == "fail") ++fails;
        if (row.verdict != "pass")
          std::cerr << row.verdict << ": " << row.setting << "/" << row.estimator << " config "
                    << row.swept_value << " measured " << format_number(row.mean) << "\n";
      }
      std::cout << result.report.rows.size() << " checks, " << fails << " failures, " << warns
                << " warnings\n";
      std::cerr << "wrote " << verify_out << "\n";
      return result.identities_ok ? 0 : 1;
    }
    if (plot->parsed()) {
      const Report report = read_report_csv(plot_in);
      emit_plot(report, parse_plot_kind(plot_kind), plot_out, plot_estimators);
      std::cerr << "wrote " << plot_out << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const FitDivergenceError& e) {
    std::cerr << "fit diverged: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
