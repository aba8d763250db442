// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "miselbo/estimators.hpp"
#include "miselbo/experiments.hpp"
#include "miselbo/targets.hpp"
#include "miselbo/training.hpp"
#include "support/oracles.hpp"

using namespace miselbo;

namespace {

constexpr std::uint64_t kSeed = 0;
int g_failures = 0;

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return buffer;
}

Target quadratic_target(std::size_t dim) {
  return Target(
      "quadratic", dim,
      [](std::span<const double> z) {
        double acc = 0.0;
        for (double v : z) acc += v * v;
        return -0.5 * acc;
      },
      {},
      [](std::span<const double> z, std::span<double> g) {
        for (std::size_t j = 0; j < z.size(); ++j) g[j] = -z[j];
      });
}

// --- criterion 1: delta(batch, 1) == jsd(batch) on 50 random ensembles ----
double criterion_1() {
  Timer timer;
  double worst = 0.0;
  for (std::size_t k = 0; k < 50; ++k) {
    const Ensemble ensemble = random_gaussian_ensemble(kSeed, k);
    const SampleBatch batch = draw_batch(ensemble, 32, {kSeed, "acceptance/identity"}, k);
    worst = std::max(worst, rel_err(estimators::delta(batch, 1).value,
                                    estimators::jsd(batch).value));
  }
  const double elapsed = timer.seconds();
  report(1, worst <= 1e-10 && elapsed < 10.0,
         fmt("Theorem 1 identity: delta_1 = jsd on 50 random ensembles "
             "(max rel err %.2e, tol 1e-10; %.1f s, limit 10 s)",
             worst, elapsed));
  return worst;
}

// --- criterion 2: 0 <= E[delta_1] <= log S within 3 SE ---------------------
void criterion_2() {
  Timer timer;
  bool ok = true;
  double worst_low = 0.0, worst_high = 0.0;
  for (std::size_t k = 0; k < 50; ++k) {
    const Ensemble ensemble = random_gaussian_ensemble(kSeed, k);
    const std::size_t R = 200;
    std::vector<double> values(R);
    for (std::size_t r = 0; r < R; ++r)
      values[r] = estimators::delta(
                      draw_batch(ensemble, 1, {kSeed, "acceptance/bounds"}, k * R + r), 1)
                      .value;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(R);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R));
    const double log_s = std::log(static_cast<double>(ensemble.size()));
    if (mean < -3.0 * se) ok = false;
    if (mean > log_s + 3.0 * se) ok = false;
    worst_low = std::min(worst_low, se > 0.0 ? mean / se : 0.0);
    worst_high = std::max(worst_high, se > 0.0 ? (mean - log_s) / se : -999.0);
  }
  const double elapsed = timer.seconds();
  report(2, ok && elapsed < 60.0,
         fmt("Theorem 1 bounds: 0 <= mean delta_1 <= log S across 50 configs x 200 replicates "
             "(worst lower z %.2f, worst upper z %.2f, limit +-3; %.1f s, limit 60 s)",
             worst_low, worst_high, elapsed));
}

// --- criterion 3: corollary limits ------------------------------------------
void criterion_3(const Target& quad_1d) {
  Timer timer;
  const Ensemble disjoint(quad_1d, {{"a", GaussianApprox{{0.0}, {1.0}}},
                                    {"b", GaussianApprox{{100.0}, {1.0}}}});
  const SampleBatch far_batch = draw_batch(disjoint, 64, {kSeed, "acceptance/disjoint"});
  const double gap = std::abs(estimators::delta(far_batch, 1).value - std::log(2.0));

  const Ensemble clones(quad_1d, {{"a", GaussianApprox{{1.0}, {0.7}}},
                                  {"b", GaussianApprox{{1.0}, {0.7}}}});
  const SampleBatch clone_batch = draw_batch(clones, 64, {kSeed, "acceptance/clones"});
  const double clone_delta = estimators::delta(clone_batch, 1).value;

  const double elapsed = timer.seconds();
  report(3, gap <= 1e-6 && clone_delta == 0.0 && elapsed < 1.0,
         fmt("corollary limits: disjoint members give |delta_1 - log 2| = %.2e (tol 1e-6), "
             "identical members give delta_1 = %.1f exactly (%.2f s, limit 1 s)",
             gap, clone_delta, elapsed));
}

// --- criterion 4: Table-2 style reproduction -------------------------------
struct TableCheck {
  const char* variant;
  double kl_mis, kl_bar, jsd;
  double tolerance;
};

Run511Result check_511(const TableCheck& expected, bool smoke, double tolerance, bool& ok,
                       std::string& detail) {
  Run511Config config;
  config.variant = expected.variant;
  config.smoke = smoke;
  Run511Result result = run_511(config);
  double kl_mis = 0, kl_bar = 0, jsd = 0;
  for (const auto& row : result.report.rows) {
    if (row.estimator == "kl_mis") kl_mis = row.mean;
    if (row.estimator == "kl_bar") kl_bar = row.mean;
    if (row.estimator == "jsd") jsd = row.mean;
  }
  const bool here = std::abs(kl_mis - expected.kl_mis) <= tolerance &&
                    std::abs(kl_bar - expected.kl_bar) <= tolerance &&
                    std::abs(jsd - expected.jsd) <= tolerance;
  ok = ok && here;
  detail += fmt("%s%s (%.3f, %.3f, %.3f) vs (%.2f, %.2f, %.2f) tol %.2f%s; ", expected.variant,
                smoke ? " smoke" : "", kl_mis, kl_bar, jsd, expected.kl_mis, expected.kl_bar,
                expected.jsd, tolerance, here ? "" : " MISS");
  return result;
}

void criterion_4(std::vector<Run511Result>& fitted) {
  Timer timer;
  bool ok = true;
  std::string detail = "benchmark reproduction: ";
  const TableCheck p1{"p1", -0.03, 0.61, 0.64, 0.1};
  const TableCheck p2{"p2", 0.15, 1.05, 0.90, 0.15};
  fitted.push_back(check_511(p1, false, p1.tolerance, ok, detail));
  fitted.push_back(check_511(p2, false, p2.tolerance, ok, detail));
  check_511(p1, true, 0.25, ok, detail);
  check_511(p2, true, 0.25, ok, detail);
  const double elapsed = timer.seconds();
  report(4, ok && elapsed < 600.0, detail + fmt("(%.0f s, limit 600 s)", elapsed));
}

// --- criterion 5: shift sweep limit behavior --------------------------------
Report criterion_5() {
  Timer timer;
  ShiftSweepConfig config;
  config.seed = kSeed;
  const Report report_data = run_512_shift(config);

  bool ok = true;
  double worst_identity = 0.0;
  double worst_limit = 0.0;
  for (const auto& row : report_data.rows) {
    if (row.estimator != "delta") continue;
    if (row.swept_value == 15.0)
      worst_limit = std::max(worst_limit, std::abs(row.mean - std::log(2.0)));
    if (row.L == 1) {
      for (const auto& jrow : report_data.rows)
        if (jrow.estimator == "jsd" && jrow.L == 1 && jrow.swept_value == row.swept_value)
          worst_identity = std::max(worst_identity, rel_err(row.mean, jrow.mean));
    }
  }
  ok = worst_limit <= 0.02 && worst_identity <= 1e-10;
  const double elapsed = timer.seconds();
  report(5, ok && elapsed < 60.0,
         fmt("shift sweep: |delta_L - log 2| at mu_1 = 15 is %.2e for L in {1,5,25} (tol 0.02); "
             "delta_1 = jsd at every grid point (max rel err %.2e); %.1f s, limit 60 s",
             worst_limit, worst_identity, elapsed));
  return report_data;
}

// --- criterion 6: kl telescoping on the shared batches of 1-5 ---------------
void criterion_6(const std::vector<Run511Result>& fitted) {
  double worst = 0.0;
  const auto check = [&worst](const SampleBatch& batch) {
    const double gap = estimators::kl_bar(batch).value - estimators::kl_mis(batch).value;
    worst = std::max(worst, rel_err(gap, estimators::jsd(batch).value));
  };

  // criterion 1 batches
  for (std::size_t k = 0; k < 50; ++k)
    check(draw_batch(random_gaussian_ensemble(kSeed, k), 32, {kSeed, "acceptance/identity"}, k));

  // criterion 3 batches
  const Target quad = quadratic_target(1);
  check(draw_batch(Ensemble(quad, {{"a", GaussianApprox{{0.0}, {1.0}}},
                                   {"b", GaussianApprox{{100.0}, {1.0}}}}),
                   64, {kSeed, "acceptance/disjoint"}));

  // criterion 4 evaluation batches, on the fitted ensembles
  for (const auto& run : fitted)
    for (std::size_t r = 0; r < 5; ++r)
      check(draw_batch(run.fit.ensemble, 10000, {1, "eval"}, r));

  // criterion 5 sweep batches, recreated through the deterministic streams
  const Target setting_i = make_setting("i");
  for (std::size_t pi = 0; pi <= 15; ++pi) {
    const Ensemble ensemble(setting_i,
                            {{"q1", GaussianApprox{{static_cast<double>(pi)}, {1.0}}},
                             {"q2", GaussianApprox{{0.0}, {1.0}}}});
    for (std::size_t r = 0; r < 5; ++r)
      check(draw_batch(ensemble, 1000, {kSeed, "shift/" + std::to_string(pi)}, r));
  }

  report(6, worst <= 1e-10,
         fmt("kl telescoping: kl_bar - kl_mis = jsd on every shared batch of criteria 1-5 "
             "(max rel err %.2e, tol 1e-10)",
             worst));
}

// --- criterion 7: sandwich and monotonicity in L -----------------------------
void criterion_7() {
  Timer timer;
  const Target target = make_setting("iii");  // normalized, log Z = 0
  // Members cover the modes without matching the components exactly, so the
  // bound is strict and the L-ladder has real signal.
  const Ensemble ensemble(target, {{"a", GaussianApprox{{1.0}, {1.5}}},
                                   {"b", GaussianApprox{{8.0}, {3.0}}}});
  const std::vector<std::size_t> ladder = {1, 2, 5, 10, 50};
  const std::size_t R = 200;
  std::vector<std::vector<double>> values(ladder.size(), std::vector<double>(R));
  for (std::size_t r = 0; r < R; ++r) {
    const SampleBatch batch = draw_batch(ensemble, 50, {kSeed, "acceptance/sandwich"}, r);
    for (std::size_t i = 0; i < ladder.size(); ++i)
      values[i][r] = estimators::miselbo(batch, ladder[i]).value;
  }

  const auto mean_se = [R](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(R);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair<double, double>{
        mean, std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R))};
  };

  bool ok = true;
  double worst_sandwich = -1e9;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const auto [mean, se] = mean_se(values[i]);
    if (mean > 3.0 * se) ok = false;  // log Z = 0
    worst_sandwich = std::max(worst_sandwich, se > 0 ? mean / se : 0.0);
  }
  double worst_pair = 1e9;
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
    std::vector<double> diffs(R);
    for (std::size_t r = 0; r < R; ++r) diffs[r] = values[i + 1][r] - values[i][r];
    const auto [mean, se] = mean_se(diffs);
    if (mean < -3.0 * se) ok = false;
    worst_pair = std::min(worst_pair, se > 0 ? mean / se : 0.0);
  }
  const double elapsed = timer.seconds();
  report(7, ok,
         fmt("sandwich and monotonicity: mean miselbo <= log Z = 0 for L in {1,2,5,10,50} "
             "(worst z %.2f <= 3) and nondecreasing in L (worst pair z %.2f >= -3); %.1f s",
             worst_sandwich, worst_pair, elapsed));
}

// --- criterion 8: gradient vs finite-difference oracle -----------------------
void criterion_8() {
  Timer timer;
  auto config_stream = derive_stream(kSeed, "acceptance/grad-configs");
  const std::vector<Target> targets = {make_setting("iii"), make_setting("p1-squared"),
                                       make_setting("p2-squared"), quadratic_target(2),
                                       make_setting("i")};
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Target& target = targets[trial];
    GaussianApprox approx;
    approx.mean.resize(target.dim());
    for (auto& m : approx.mean) m = 4.0 * config_stream.uniform() - 2.0;
    approx.scale = {0.4 + config_stream.uniform()};
    approx.train_scale = trial % 2 == 0;

    const std::size_t n = 400;
    const std::string id = "acceptance/grad/" + std::to_string(trial);
    auto stream = derive_stream(kSeed, id);
    const auto ge = elbo_gradient(target, approx, stream, n);
    auto replay = derive_stream(kSeed, id);
    const std::vector<double> eps = replay.normals(n * target.dim());

    std::vector<double> params = pack_parameters(approx);
    double diff = 0.0, norm = 0.0;
    for (std::size_t j = 0; j < params.size(); ++j) {
      GaussianApprox probe = approx;
      std::vector<double> bumped = params;
      const double h = 1e-5;
      bumped[j] = params[j] + h;
      unpack_parameters(probe, bumped);
      const double up = monte_carlo_elbo(target, probe, eps);
      bumped[j] = params[j] - h;
      unpack_parameters(probe, bumped);
      const double down = monte_carlo_elbo(target, probe, eps);
      const double fd = (up - down) / (2.0 * h);
      diff += (ge.grad[j] - fd) * (ge.grad[j] - fd);
      norm += fd * fd;
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12));
  }
  const double elapsed = timer.seconds();
  report(8, worst <= 1e-4 && elapsed < 5.0,
         fmt("gradient check: reparameterization gradient vs common-random-number finite "
             "differences on 5 configs (worst rel err %.2e, tol 1e-4; %.2f s, limit 5 s)",
             worst, elapsed));
}

// --- criterion 9: discrete-support brute force -------------------------------
void criterion_9() {
  double worst = 0.0;
  std::vector<oracles::DiscreteSurrogate> surrogates = {oracles::default_surrogate()};
  oracles::DiscreteSurrogate second;
  second.mult1 = {5, 1, 1, 2, 3};
  second.mult2 = {1, 4, 3, 3, 1};
  second.log_p = {-0.4, 1.1, 0.0, -2.0, 0.6};
  second.N = 12;
  surrogates.push_back(second);

  for (const auto& s : surrogates) {
    std::vector<double> log_q, log_p;
    s.tables(log_q, log_p);
    const SampleBatch batch = batch_from_tables({"a", "b"}, s.N, log_q, log_p);
    const auto track = [&worst](double a, double b) { worst = std::max(worst, rel_err(a, b)); };
    track(estimators::elbo(batch, 0).value, s.elbo(0));
    track(estimators::elbo(batch, 1).value, s.elbo(1));
    track(estimators::avg_elbo(batch).value, s.avg_elbo());
    track(estimators::iwelbo(batch, 0, s.N).value, s.iwelbo_full(0));
    track(estimators::iwelbo(batch, 1, s.N).value, s.iwelbo_full(1));
    track(estimators::avg_iwelbo(batch, s.N).value, s.avg_iwelbo_full());
    track(estimators::miselbo(batch, s.N).value, s.miselbo_full());
    track(estimators::miselbo(batch, 1).value, s.miselbo_1());
    track(estimators::jsd(batch).value, s.jsd());
    track(estimators::kl_bar(batch).value, s.kl_bar());
    track(estimators::kl_mis(batch).value, s.kl_mis());
    track(estimators::delta(batch, s.N).value, s.miselbo_full() - s.avg_iwelbo_full());
    track(estimators::delta(batch, 1).value, s.miselbo_1() - s.avg_elbo());
  }
  report(9, worst <= 1e-12,
         fmt("discrete surrogates: all estimators match exhaustive enumeration "
             "(max rel err %.2e, tol 1e-12)",
             worst));
}

}  // namespace

int main() {
  const Target quad_1d = quadratic_target(1);
  std::vector<Run511Result> fitted;

  criterion_1();
  criterion_2();
  criterion_3(quad_1d);
  criterion_4(fitted);
  criterion_5();
  criterion_6(fitted);
  criterion_7();
  criterion_8();
  criterion_9();
  report(10, true,
         "large-scale deep-VAE and phylogenetics benchmarks are out of scope by design; "
         "nothing to assert");

  if (g_failures) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
