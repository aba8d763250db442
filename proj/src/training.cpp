#include "miselbo/training.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <utility>

#include "miselbo/errors.hpp"

namespace miselbo {

namespace {

double gaussian_entropy(const GaussianApprox& approx) {
  const double d = static_cast<double>(approx.dim());
  double log_det = 0.0;
  for (std::size_t j = 0; j < approx.dim(); ++j) log_det += std::log(approx.scale_at(j));
  return log_det + 0.5 * d * (1.0 + std::log(2.0 * std::numbers::pi));
}

std::string format_params(const GaussianApprox& approx) {
  std::ostringstream out;
  out << "mean = [";
  for (std::size_t j = 0; j < approx.mean.size(); ++j)
    out << (j ? ", " : "") << approx.mean[j];
  out << "], scale = [";
  for (std::size_t j = 0; j < approx.scale.size(); ++j)
    out << (j ? ", " : "") << approx.scale[j];
  out << "]";
  return out.str();
}

bool all_finite(std::span<const double> values) {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               const AdamConfig& config) {
  if (params.size() != grad.size()) throw UsageError("adam_step: params/grad size mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) throw UsageError("adam_step: state size mismatch");

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double m_corr = 1.0 - std::pow(config.beta1, t);
  const double v_corr = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grad[i];
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / m_corr;
    const double v_hat = state.v[i] / v_corr;
    params[i] += config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
  }
}

void target_gradient(const Target& target, std::span<const double> z, std::span<double> grad,
                     bool allow_finite_difference, double fd_step) {
  if (target.has_analytic_gradient()) {
    target.analytic_gradient(z, grad);
    return;
  }
  if (!allow_finite_difference)
    throw ConfigError("target '" + target.name() +
                      "' has no analytic gradient and finite differences are disabled");
  std::vector<double> probe(z.begin(), z.end());
  for (std::size_t j = 0; j < z.size(); ++j) {
    probe[j] = z[j] + fd_step;
    const double up = target.log_density(probe);
    probe[j] = z[j] - fd_step;
    const double down = target.log_density(probe);
    probe[j] = z[j];
    grad[j] = (up - down) / (2.0 * fd_step);
  }
}

std::vector<double> pack_parameters(const GaussianApprox& approx) {
  std::vector<double> params;
  if (approx.train_mean) params.insert(params.end(), approx.mean.begin(), approx.mean.end());
  if (approx.train_scale)
    for (double s : approx.scale) params.push_back(std::log(s));
  if (params.empty()) throw UsageError("member has no trainable parameters");
  return params;
}

void unpack_parameters(GaussianApprox& approx, std::span<const double> params) {
  std::size_t offset = 0;
  if (approx.train_mean) {
    for (std::size_t j = 0; j < approx.mean.size(); ++j) approx.mean[j] = params[offset + j];
    offset += approx.mean.size();
  }
  if (approx.train_scale)
    for (std::size_t j = 0; j < approx.scale.size(); ++j)
      approx.scale[j] = std::exp(params[offset + j]);
}

GradientEstimate elbo_gradient(const Target& target, const GaussianApprox& approx,
                               RandomStream& stream, std::size_t n_samples,
                               bool allow_finite_difference, double fd_step) {
  if (n_samples == 0) throw UsageError("elbo_gradient needs n_samples >= 1");
  if (!approx.train_mean && !approx.train_scale)
    throw UsageError("member has no trainable parameters");
  const std::size_t dim = approx.dim();
  const bool isotropic = approx.scale.size() == 1;

  std::vector<double> mean_grad(approx.train_mean ? dim : 0, 0.0);
  std::vector<double> scale_grad(approx.train_scale ? approx.scale.size() : 0, 0.0);
  std::vector<double> z(dim);
  std::vector<double> eps(dim);
  std::vector<double> g(dim);
  double log_p_sum = 0.0;

  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      eps[j] = stream.normal();
      z[j] = approx.mean[j] + approx.scale_at(j) * eps[j];
    }
    log_p_sum += target.log_density(z);
    target_gradient(target, z, g, allow_finite_difference, fd_step);
    if (approx.train_mean)
      for (std::size_t j = 0; j < dim; ++j) mean_grad[j] += g[j];
    if (approx.train_scale) {
      if (isotropic) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) acc += g[j] * approx.scale_at(j) * eps[j];
        scale_grad[0] += acc;
      } else {
        for (std::size_t j = 0; j < dim; ++j) scale_grad[j] += g[j] * approx.scale[j] * eps[j];
      }
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n_samples);
  GradientEstimate out;
  if (approx.train_mean)
    for (double v : mean_grad) out.grad.push_back(v * inv_n);
  if (approx.train_scale) {
    // Entropy term: dH/dlog(sigma_j) = 1 per coordinate (d for isotropic).
    const double entropy_term = isotropic ? static_cast<double>(dim) : 1.0;
    for (double v : scale_grad) out.grad.push_back(v * inv_n + entropy_term);
  }
  out.elbo = log_p_sum * inv_n + gaussian_entropy(approx);
  return out;
}

double monte_carlo_elbo(const Target& target, const GaussianApprox& approx,
                        std::span<const double> eps) {
  const std::size_t dim = approx.dim();
  if (dim == 0 || eps.size() % dim != 0 || eps.empty())
    throw UsageError("monte_carlo_elbo: eps must hold whole samples");
  const std::size_t n = eps.size() / dim;
  std::vector<double> z(dim);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) z[j] = approx.mean[j] + approx.scale_at(j) * eps[i * dim + j];
    acc += target.log_density(z);
  }
  return acc / static_cast<double>(n) + gaussian_entropy(approx);
}

FitResult fit_member(const Target& target, GaussianApprox init, std::string_view label,
                     const FitConfig& config) {
  if (config.iterations == 0 || config.samples_per_iter == 0)
    throw ConfigError("fit needs iterations >= 1 and samples_per_iter >= 1");
  if (init.dim() != target.dim())
    throw ConfigError("init dim does not match target '" + target.name() + "'");

  auto stream = derive_stream(config.seed.root_seed,
                              stream_path({config.seed.stream_id, label, "fit"}));
  GaussianApprox current = std::move(init);
  std::vector<double> params = pack_parameters(current);
  AdamState state;
  FitResult result;
  result.label = std::string(label);
  result.elbo_trace.reserve(config.iterations);

  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const GradientEstimate ge = elbo_gradient(target, current, stream, config.samples_per_iter,
                                              config.allow_finite_difference, config.fd_step);
    if (!std::isfinite(ge.elbo) || !all_finite(ge.grad))
      throw FitDivergenceError("non-finite loss fitting member '" + result.label +
                               "' at iteration " + std::to_string(t) + "; " +
                               format_params(current));
    adam_step(state, params, ge.grad, config.adam);
    unpack_parameters(current, params);
    if (!all_finite(params))
      throw FitDivergenceError("non-finite parameters fitting member '" + result.label +
                               "' at iteration " + std::to_string(t) + "; " +
                               format_params(current));
    result.elbo_trace.push_back(ge.elbo);
  }
  result.approx = std::move(current);
  return result;
}

EnsembleFit fit_ensemble(const Target& target, std::vector<Member> inits, const FitConfig& config,
                         bool parallel) {
  if (inits.empty()) throw ConfigError("fit_ensemble needs at least one member");
  std::vector<FitResult> results(inits.size());

  auto fit_one = [&](std::size_t i) {
    const auto* g = std::get_if<GaussianApprox>(&inits[i].approx);
    if (!g) throw ConfigError("member '" + inits[i].label + "' is not a gaussian member; only "
                              "gaussian members are trainable");
    return fit_member(target, *g, inits[i].label, config);
  };

  if (parallel && inits.size() > 1) {
    std::vector<std::future<FitResult>> futures;
    futures.reserve(inits.size());
    for (std::size_t i = 0; i < inits.size(); ++i)
      futures.push_back(std::async(std::launch::async, fit_one, i));
    for (std::size_t i = 0; i < inits.size(); ++i) results[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < inits.size(); ++i) results[i] = fit_one(i);
  }

  std::vector<Member> fitted;
  fitted.reserve(results.size());
  for (const auto& r : results) fitted.push_back({r.label, r.approx});
  return {Ensemble(target, std::move(fitted)), std::move(results)};
}

}  // namespace miselbo
