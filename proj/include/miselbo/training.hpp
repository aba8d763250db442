#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "miselbo/approximations.hpp"
#include "miselbo/rng.hpp"
#include "miselbo/targets.hpp"

namespace miselbo {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::size_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
};

// One bias-corrected Adam step, ascent orientation. Moment buffers are
// sized on first use.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               const AdamConfig& config);

struct FitConfig {
  std::size_t iterations = 10000;
  std::size_t samples_per_iter = 1000;
  AdamConfig adam;
  SeedSpec seed;
  // Central finite differences (per-coordinate step fd_step) when the
  // target has no analytic gradient.
  bool allow_finite_difference = true;
  double fd_step = 1e-5;
};

// d/dz log p~(z): analytic when available, otherwise central finite
// differences. ConfigError if neither path is allowed.
void target_gradient(const Target& target, std::span<const double> z, std::span<double> grad,
                     bool allow_finite_difference = true, double fd_step = 1e-5);

// Trainable parameters are [mean...] (if train_mean) then [log scale...]
// (if train_scale); log-space scale keeps positivity under unconstrained
// steps.
std::vector<double> pack_parameters(const GaussianApprox& approx);
void unpack_parameters(GaussianApprox& approx, std::span<const double> params);

struct GradientEstimate {
  std::vector<double> grad;  // packed order
  double elbo = 0.0;         // MC ELBO at the same draws
};

// Reparameterization estimator over n draws: mean of the target gradient
// for the mean block; target term plus the analytic entropy derivative
// (one per coordinate) for the log-scale block.
GradientEstimate elbo_gradient(const Target& target, const GaussianApprox& approx,
                               RandomStream& stream, std::size_t n_samples,
                               bool allow_finite_difference = true, double fd_step = 1e-5);

// Deterministic function of the supplied noise: the MC ELBO at
// z = mean + scale * eps plus the exact Gaussian entropy. Shares noise
// across parameter perturbations, which finite-difference checks rely on.
double monte_carlo_elbo(const Target& target, const GaussianApprox& approx,
                        std::span<const double> eps);

struct FitResult {
  std::string label;
  GaussianApprox approx;
  std::vector<double> elbo_trace;  // one MC ELBO per iteration
};

// Stochastic gradient ascent on the ELBO with Adam. The member stream is
// (seed.root_seed, "<seed.stream_id>/<label>/fit"). Throws
// FitDivergenceError with the iteration and parameters on non-finite loss.
FitResult fit_member(const Target& target, GaussianApprox init, std::string_view label,
                     const FitConfig& config);

struct EnsembleFit {
  Ensemble ensemble;
  std::vector<FitResult> members;
};

// Fits every member independently (one worker per member when parallel);
// member trajectories depend only on (target, own init, own stream), so
// serial and parallel runs give identical ensembles.
EnsembleFit fit_ensemble(const Target& target, std::vector<Member> inits, const FitConfig& config,
                         bool parallel = true);

}  // namespace miselbo
