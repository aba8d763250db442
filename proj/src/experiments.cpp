#include "miselbo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "miselbo/errors.hpp"

namespace miselbo {

namespace {

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  double se = 0.0;
};

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (n - 1.0));
    out.se = out.std / std::sqrt(n);
  }
  return out;
}

double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-12});
  return std::abs(a - b) / scale;
}

void check_sweep_sizes(const std::vector<double>& grid, const std::vector<std::size_t>& L_list,
                       std::size_t samples, std::size_t replicates) {
  if (grid.empty()) throw ConfigError("sweep grid must be nonempty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ConfigError("sweep grid must be strictly increasing");
  if (L_list.empty()) throw ConfigError("sweep needs at least one L");
  if (replicates == 0) throw ConfigError("sweep needs at least one replicate");
  for (std::size_t L : L_list)
    if (L == 0 || samples % L != 0)
      throw ConfigError("every L must divide the per-member sample count " +
                        std::to_string(samples));
}

// jsd and delta rows per (grid point, L), averaged over replicates that
// share one batch per (point, replicate) across all L.
void sweep_point(const Ensemble& ensemble, const std::string& setting, double swept_value,
                 std::size_t point_index, const std::vector<std::size_t>& L_list,
                 std::size_t samples, std::size_t replicates, std::uint64_t seed,
                 const std::string& stream_prefix, std::vector<ReportRow>& rows) {
  std::vector<std::vector<double>> delta_values(L_list.size());
  std::vector<double> jsd_values;
  for (std::size_t r = 0; r < replicates; ++r) {
    const SampleBatch batch = draw_batch(
        ensemble, samples, {seed, stream_prefix + "/" + std::to_string(point_index)}, r);
    jsd_values.push_back(estimators::jsd(batch).value);
    for (std::size_t i = 0; i < L_list.size(); ++i)
      delta_values[i].push_back(estimators::delta(batch, L_list[i]).value);
  }
  for (std::size_t i = 0; i < L_list.size(); ++i) {
    const Aggregate d = aggregate(delta_values[i]);
    const Aggregate j = aggregate(jsd_values);
    rows.push_back({setting, swept_value, ensemble.size(), L_list[i], "delta", d.mean, d.std, ""});
    rows.push_back({setting, swept_value, ensemble.size(), L_list[i], "jsd", j.mean, j.std, ""});
  }
}

}  // namespace

Run511Result run_511(const Run511Config& config) {
  std::string target_id = config.target_id;
  std::vector<Member> inits;
  const std::vector<double> scale = {config.sigma};
  if (config.variant == "p1") {
    if (target_id.empty()) target_id = "p1-squared";
    inits.push_back({"q1", GaussianApprox{{-3.0, 0.0}, scale}});
    inits.push_back({"q2", GaussianApprox{{3.0, 0.0}, scale}});
  } else if (config.variant == "p2") {
    if (target_id.empty()) target_id = "p2-squared";
    inits.push_back({"q1", GaussianApprox{{-3.0, 0.0}, scale}});
    inits.push_back({"q2", GaussianApprox{{0.0, 0.0}, scale}});
    inits.push_back({"q3", GaussianApprox{{3.0, 0.0}, scale}});
  } else {
    throw ConfigError("unknown variant '" + config.variant + "'; valid: p1 p2");
  }

  const Target target = make_setting(target_id);

  FitConfig fit_config;
  fit_config.iterations = config.iterations;
  // Smoke keeps the iteration count (Adam still reaches the basin) and cuts
  // the per-iteration sample budget tenfold.
  fit_config.samples_per_iter = config.smoke
                                    ? std::max<std::size_t>(1, config.samples_per_iter / 10)
                                    : config.samples_per_iter;
  fit_config.adam.lr = config.lr;
  fit_config.seed = {config.train_seed, ""};

  EnsembleFit fit = fit_ensemble(target, std::move(inits), fit_config);

  std::vector<double> kl_mis_values, kl_bar_values, jsd_values;
  for (std::size_t r = 0; r < config.replicates; ++r) {
    const SampleBatch batch =
        draw_batch(fit.ensemble, config.eval_samples, {config.eval_seed, "eval"}, r);
    kl_mis_values.push_back(estimators::kl_mis(batch).value);
    kl_bar_values.push_back(estimators::kl_bar(batch).value);
    jsd_values.push_back(estimators::jsd(batch).value);
  }

  Report report;
  report.provenance.seed = config.train_seed;
  const std::size_t S = fit.ensemble.size();
  const auto add = [&](const char* name, const std::vector<double>& values) {
    const Aggregate a = aggregate(values);
    report.rows.push_back(
        {config.variant, 0.0, S, config.eval_samples, name, a.mean, a.std, ""});
  };
  add("kl_mis", kl_mis_values);
  add("kl_bar", kl_bar_values);
  add("jsd", jsd_values);
  return {std::move(report), std::move(fit)};
}

Report run_512_shift(const ShiftSweepConfig& config) {
  std::vector<double> grid = config.grid;
  if (grid.empty())
    for (int mu = 0; mu <= 15; ++mu) grid.push_back(mu);
  check_sweep_sizes(grid, config.L_list, config.samples, config.replicates);

  const Target target = make_setting(config.setting);
  if (target.dim() != 1)
    throw ConfigError("shift sweep needs a 1-D target; got '" + config.setting + "'");

  Report report;
  report.provenance.seed = config.seed;
  for (std::size_t pi = 0; pi < grid.size(); ++pi) {
    std::vector<Member> members;
    members.push_back({"q1", GaussianApprox{{grid[pi]}, {1.0}}});
    members.push_back({"q2", GaussianApprox{{0.0}, {1.0}}});
    const Ensemble ensemble(target, std::move(members));
    sweep_point(ensemble, config.setting, grid[pi], pi, config.L_list, config.samples,
                config.replicates, config.seed, "shift", report.rows);
  }
  return report;
}

Report run_512_hier(const HierSweepConfig& config) {
  std::vector<double> grid = config.variance_grid;
  if (grid.empty()) {
    // 10 log-spaced points from sigma2^2 to 10 sigma2^2.
    for (int i = 0; i < 10; ++i)
      grid.push_back(config.sigma2_squared * std::pow(10.0, static_cast<double>(i) / 9.0));
  }
  check_sweep_sizes(grid, config.L_list, config.samples, config.replicates);
  if (std::abs(grid.front() - config.sigma2_squared) > 1e-12)
    throw UsageError("hierarchical sweep grid must start at sigma2^2 = " +
                     format_number(config.sigma2_squared));

  const Target target = make_setting("hierarchical");

  Report report;
  report.provenance.seed = config.seed;
  for (std::size_t pi = 0; pi < grid.size(); ++pi) {
    HierarchicalApprox q1;
    q1.mu_sigma = std::sqrt(grid[pi]);
    q1.cond_sigma = config.cond_sigma;
    HierarchicalApprox q2;
    q2.mu_sigma = std::sqrt(config.sigma2_squared);
    q2.cond_sigma = config.cond_sigma;
    const Ensemble ensemble(target, {{"q1", q1}, {"q2", q2}});
    sweep_point(ensemble, "hierarchical", grid[pi], pi, config.L_list, config.samples,
                config.replicates, config.seed, "hier", report.rows);
  }
  return report;
}

Ensemble random_gaussian_ensemble(std::uint64_t seed, std::size_t index) {
  auto stream = derive_stream(seed, "ensemble/" + std::to_string(index));
  const std::size_t S = 1 + index % 5;
  const std::size_t dims[] = {1, 2, 5};
  const std::size_t dim = dims[index % 3];

  const auto uniform_in = [&stream](double lo, double hi) {
    return lo + (hi - lo) * stream.uniform();
  };

  GaussianMixtureSpec spec;
  spec.weights = {0.5, 0.5};
  for (int c = 0; c < 2; ++c) {
    std::vector<double> mean(dim);
    for (auto& m : mean) m = uniform_in(-2.0, 2.0);
    spec.means.push_back(std::move(mean));
    spec.sigmas.push_back(uniform_in(0.8, 1.5));
  }
  Target target = make_gaussian_mixture(std::move(spec), "mixture-" + std::to_string(index));

  std::vector<Member> members;
  for (std::size_t s = 0; s < S; ++s) {
    GaussianApprox approx;
    approx.mean.resize(dim);
    for (auto& m : approx.mean) m = uniform_in(-3.0, 3.0);
    approx.scale = {uniform_in(0.5, 2.0)};
    members.push_back({"m" + std::to_string(s), std::move(approx)});
  }
  return Ensemble(std::move(target), std::move(members));
}

VerifyResult verify(const VerifyConfig& config) {
  VerifyResult result;
  result.report.provenance.seed = config.seed;
  result.report.with_verdict = true;

  const auto add_row = [&](const std::string& setting, std::size_t index, std::size_t S,
                           std::size_t L, const std::string& check, double measured,
                           double threshold, bool ok, bool hard) {
    result.report.rows.push_back({setting, static_cast<double>(index), S, L, check, measured,
                                  threshold, ok ? "pass" : (hard ? "fail" : "warn")});
    if (!ok) (hard ? result.identities_ok : result.bounds_ok) = false;
  };

  for (std::size_t k = 0; k < config.ensembles; ++k) {
    const Ensemble ensemble = random_gaussian_ensemble(config.seed, k);
    const std::size_t S = ensemble.size();
    const SampleBatch batch =
        draw_batch(ensemble, config.identity_samples, {config.seed, "verify/identity"}, k);

    const double jsd_value = estimators::jsd(batch).value;
    const double delta1 = estimators::delta(batch, 1).value;
    add_row("identity", k, S, 1, "delta1_eq_jsd", relative_error(delta1, jsd_value),
            config.identity_tolerance, relative_error(delta1, jsd_value) <= config.identity_tolerance,
            true);

    const double kl_gap =
        estimators::kl_bar(batch).value - estimators::kl_mis(batch).value;
    add_row("identity", k, S, batch.L, "klbar_minus_klmis_eq_jsd",
            relative_error(kl_gap, jsd_value), config.identity_tolerance,
            relative_error(kl_gap, jsd_value) <= config.identity_tolerance, true);

    double worst_iwelbo1 = 0.0;
    for (std::size_t s = 0; s < S; ++s)
      worst_iwelbo1 = std::max(
          worst_iwelbo1, relative_error(estimators::iwelbo(batch, s, 1).value,
                                        estimators::elbo(batch, s).value));
    add_row("identity", k, S, 1, "iwelbo1_eq_elbo", worst_iwelbo1, config.identity_tolerance,
            worst_iwelbo1 <= config.identity_tolerance, true);

    if (S == 1) {
      const double gap = relative_error(estimators::miselbo(batch, batch.L).value,
                                        estimators::iwelbo(batch, 0, batch.L).value);
      add_row("identity", k, S, batch.L, "singleton_miselbo_eq_iwelbo", gap,
              config.identity_tolerance, gap <= config.identity_tolerance, true);
    }

    // Identical members: duplicate member 0 S-fold; delta must vanish.
    if (S > 1) {
      std::vector<Member> clones;
      for (std::size_t s = 0; s < S; ++s)
        clones.push_back({"m" + std::to_string(s), ensemble.member(0).approx});
      const Ensemble clone_ensemble(ensemble.target(), std::move(clones));
      const SampleBatch clone_batch =
          draw_batch(clone_ensemble, config.identity_samples, {config.seed, "verify/clones"}, k);
      const double clone_delta = estimators::delta(clone_batch, clone_batch.L).value;
      add_row("identity", k, S, clone_batch.L, "identical_members_delta_zero",
              std::abs(clone_delta), config.identity_tolerance,
              std::abs(clone_delta) <= config.identity_tolerance, true);
    }

    // Bounds: 0 <= E[delta_1] <= log S, within three standard errors.
    std::vector<double> delta_values(config.bound_replicates);
    for (std::size_t r = 0; r < config.bound_replicates; ++r) {
      const SampleBatch b = draw_batch(ensemble, 1, {config.seed, "verify/bounds"},
                                       k * config.bound_replicates + r);
      delta_values[r] = estimators::delta(b, 1).value;
    }
    const Aggregate d = aggregate(delta_values);
    add_row("bound", k, S, 1, "delta1_nonnegative", d.mean, 3.0 * d.se, d.mean >= -3.0 * d.se,
            false);
    const double log_s = std::log(static_cast<double>(S));
    add_row("bound", k, S, 1, "delta1_at_most_logS", d.mean - log_s, 3.0 * d.se,
            d.mean <= log_s + 3.0 * d.se, false);
  }

  // Sandwich and L-monotonicity on normalized mixture targets (log Z = 0).
  const std::vector<std::size_t> L_ladder = {1, 2, 5, 10, 50};
  for (std::size_t k = 0; k < std::min<std::size_t>(3, config.ensembles); ++k) {
    const Ensemble ensemble = random_gaussian_ensemble(config.seed, k);
    std::vector<std::vector<double>> values(L_ladder.size());
    for (std::size_t r = 0; r < config.bound_replicates; ++r) {
      const SampleBatch b = draw_batch(ensemble, 50, {config.seed, "verify/monotone"},
                                       k * config.bound_replicates + r);
      for (std::size_t i = 0; i < L_ladder.size(); ++i)
        values[i].push_back(estimators::miselbo(b, L_ladder[i]).value);
    }
    for (std::size_t i = 0; i < L_ladder.size(); ++i) {
      const Aggregate a = aggregate(values[i]);
      add_row("bound", k, ensemble.size(), L_ladder[i], "miselbo_at_most_logZ", a.mean,
              3.0 * a.se, a.mean <= 3.0 * a.se, false);
    }
    for (std::size_t i = 0; i + 1 < L_ladder.size(); ++i) {
      std::vector<double> diffs(config.bound_replicates);
      for (std::size_t r = 0; r < config.bound_replicates; ++r)
        diffs[r] = values[i + 1][r] - values[i][r];
      const Aggregate a = aggregate(diffs);
      add_row("bound", k, ensemble.size(), L_ladder[i + 1], "miselbo_nondecreasing_in_L", a.mean,
              3.0 * a.se, a.mean >= -3.0 * a.se, false);
    }
  }

  return result;
}

}  // namespace miselbo
