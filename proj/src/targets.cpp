#include "miselbo/targets.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "miselbo/errors.hpp"
#include "miselbo/logsumexp.hpp"

namespace miselbo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sq(double x) { return x * x; }

double squared_distance(std::span<const double> z, std::span<const double> mean) {
  double acc = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) acc += sq(z[j] - mean[j]);
  return acc;
}

// log N(z | mean, sigma^2 I)
double isotropic_log_pdf(std::span<const double> z, std::span<const double> mean, double sigma) {
  const double d = static_cast<double>(z.size());
  return -0.5 * squared_distance(z, mean) / sq(sigma) - 0.5 * d * std::log(kTwoPi * sq(sigma));
}

void validate_mixture(const GaussianMixtureSpec& spec) {
  const std::size_t k = spec.weights.size();
  if (k == 0 || spec.means.size() != k || spec.sigmas.size() != k)
    throw ConfigError("mixture spec needs equal-length weights, means, sigmas (got " +
                      std::to_string(k) + ", " + std::to_string(spec.means.size()) + ", " +
                      std::to_string(spec.sigmas.size()) + ")");
  double total = 0.0;
  for (double w : spec.weights) {
    if (w < 0.0) throw ConfigError("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mixture weights must sum to 1");
  const std::size_t dim = spec.means.front().size();
  if (dim == 0) throw ConfigError("mixture means must be nonempty vectors");
  for (const auto& mean : spec.means)
    if (mean.size() != dim) throw ConfigError("mixture means must share one dimension");
  for (double s : spec.sigmas)
    if (!(s > 0.0)) throw ConfigError("mixture sigmas must be strictly positive");
}

GaussianMixtureSpec uniform_1d_mixture(std::vector<double> means, double sigma) {
  GaussianMixtureSpec spec;
  const double w = 1.0 / static_cast<double>(means.size());
  for (double mu : means) {
    spec.weights.push_back(w);
    spec.means.push_back({mu});
    spec.sigmas.push_back(sigma);
  }
  return spec;
}

// --- 2-D energy benchmarks -------------------------------------------------

double ring_term(std::span<const double> z) {
  double r = std::sqrt(z[0] * z[0] + z[1] * z[1]);
  return -0.5 * sq((r - 2.0) / 0.4);
}

void ring_gradient(std::span<const double> z, std::span<double> grad) {
  const double r = std::sqrt(z[0] * z[0] + z[1] * z[1]);
  if (r == 0.0) {
    grad[0] = grad[1] = 0.0;
    return;
  }
  const double t = -(r - 2.0) / (0.16 * r);
  grad[0] = t * z[0];
  grad[1] = t * z[1];
}

double p1_verbatim_log(std::span<const double> z) {
  return ring_term(z) - (std::exp(-(z[0] - 2.0) / 1.2) + std::exp(-(z[0] + 2.0) / 1.2));
}

void p1_verbatim_grad(std::span<const double> z, std::span<double> grad) {
  ring_gradient(z, grad);
  grad[0] += (std::exp(-(z[0] - 2.0) / 1.2) + std::exp(-(z[0] + 2.0) / 1.2)) / 1.2;
}

double p1_squared_log(std::span<const double> z) {
  const double a = -0.5 * sq((z[0] - 2.0) / 0.6);
  const double b = -0.5 * sq((z[0] + 2.0) / 0.6);
  const double m = std::max(a, b);
  return ring_term(z) + m + std::log(std::exp(a - m) + std::exp(b - m));
}

void p1_squared_grad(std::span<const double> z, std::span<double> grad) {
  ring_gradient(z, grad);
  const double a = -0.5 * sq((z[0] - 2.0) / 0.6);
  const double b = -0.5 * sq((z[0] + 2.0) / 0.6);
  const double m = std::max(a, b);
  const double ea = std::exp(a - m);
  const double eb = std::exp(b - m);
  const double da = -(z[0] - 2.0) / 0.36;
  const double db = -(z[0] + 2.0) / 0.36;
  grad[0] += (ea * da + eb * db) / (ea + eb);
}

double sine_ridge(double z1) { return std::sin(kTwoPi * z1 / 4.0); }

double p2_log(std::span<const double> z, double denom) {
  return -0.5 * sq(z[1] - sine_ridge(z[0])) / denom;
}

void p2_grad(std::span<const double> z, std::span<double> grad, double denom) {
  const double d = z[1] - sine_ridge(z[0]);
  const double wp = (kTwoPi / 4.0) * std::cos(kTwoPi * z[0] / 4.0);
  grad[0] = d * wp / denom;
  grad[1] = -d / denom;
}

}  // namespace

Target::Target(std::string name, std::size_t dim, LogDensityFn log_unnorm,
               std::optional<double> log_normalizer, GradientFn gradient)
    : name_(std::move(name)),
      dim_(dim),
      log_unnorm_(std::move(log_unnorm)),
      log_normalizer_(log_normalizer),
      gradient_(std::move(gradient)) {
  if (dim_ == 0) throw ConfigError("target dimension must be positive");
  if (!log_unnorm_) throw ConfigError("target needs a log-density function");
}

double Target::log_density(std::span<const double> z) const {
  if (z.size() != dim_)
    throw UsageError("target '" + name_ + "' has dim " + std::to_string(dim_) + ", got point of dim " +
                     std::to_string(z.size()));
  return log_unnorm_(z);
}

void Target::analytic_gradient(std::span<const double> z, std::span<double> grad) const {
  if (!gradient_) throw UsageError("target '" + name_ + "' has no analytic gradient");
  if (z.size() != dim_ || grad.size() != dim_)
    throw UsageError("gradient dimension mismatch for target '" + name_ + "'");
  gradient_(z, grad);
}

Target make_gaussian_mixture(GaussianMixtureSpec spec, std::string name) {
  validate_mixture(spec);
  const std::size_t dim = spec.means.front().size();
  const std::size_t k = spec.weights.size();

  std::vector<double> log_weights(k);
  for (std::size_t i = 0; i < k; ++i) log_weights[i] = std::log(spec.weights[i]);

  auto log_density = [spec, log_weights, k](std::span<const double> z) {
    std::vector<double> terms(k);
    for (std::size_t i = 0; i < k; ++i)
      terms[i] = log_weights[i] + isotropic_log_pdf(z, spec.means[i], spec.sigmas[i]);
    return log_sum_exp(terms);
  };

  auto gradient = [spec, log_weights, k](std::span<const double> z, std::span<double> grad) {
    std::vector<double> terms(k);
    for (std::size_t i = 0; i < k; ++i)
      terms[i] = log_weights[i] + isotropic_log_pdf(z, spec.means[i], spec.sigmas[i]);
    const double total = log_sum_exp(terms);
    for (auto& g : grad) g = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double resp = std::exp(terms[i] - total);
      const double inv_var = 1.0 / sq(spec.sigmas[i]);
      for (std::size_t j = 0; j < grad.size(); ++j)
        grad[j] += resp * (spec.means[i][j] - z[j]) * inv_var;
    }
  };

  return Target(std::move(name), dim, std::move(log_density), 0.0, std::move(gradient));
}

const std::vector<std::string>& setting_ids() {
  static const std::vector<std::string> ids = {"i",  "ii", "iii",        "hierarchical",
                                               "p1", "p2", "p1-squared", "p2-squared"};
  return ids;
}

Target make_setting(std::string_view id) {
  if (id == "i") return make_gaussian_mixture(uniform_1d_mixture({-5, 0, 5, 10, 15, 20}, 0.5), "i");
  if (id == "ii") return make_gaussian_mixture(uniform_1d_mixture({0, 10, 20}, 1.1), "ii");
  if (id == "iii") {
    GaussianMixtureSpec spec;
    spec.weights = {0.5, 0.5};
    spec.means = {{0.0}, {10.0}};
    spec.sigmas = {2.0, 4.0};  // N(z|0,4), N(z|10,16) with variance notation
    return make_gaussian_mixture(std::move(spec), "iii");
  }
  if (id == "hierarchical") {
    // Joint over (z, mu): p(z) is setting i, p(mu) = N(10, 9). Normalized,
    // so log Z = 0.
    Target pz = make_setting("i");
    auto log_density = [pz](std::span<const double> zmu) {
      const double mu = zmu[1];
      const double log_pmu = -0.5 * sq(mu - 10.0) / 9.0 - 0.5 * std::log(kTwoPi * 9.0);
      return pz.log_density(zmu.subspan(0, 1)) + log_pmu;
    };
    auto gradient = [pz](std::span<const double> zmu, std::span<double> grad) {
      pz.analytic_gradient(zmu.subspan(0, 1), grad.subspan(0, 1));
      grad[1] = -(zmu[1] - 10.0) / 9.0;
    };
    return Target("hierarchical", 2, std::move(log_density), 0.0, std::move(gradient));
  }
  if (id == "p1") return Target("p1", 2, p1_verbatim_log, {}, p1_verbatim_grad);
  if (id == "p1-squared") return Target("p1-squared", 2, p1_squared_log, {}, p1_squared_grad);
  if (id == "p2")
    return Target(
        "p2", 2, [](std::span<const double> z) { return p2_log(z, 0.4); }, {},
        [](std::span<const double> z, std::span<double> g) { p2_grad(z, g, 0.4); });
  if (id == "p2-squared")
    return Target(
        "p2-squared", 2, [](std::span<const double> z) { return p2_log(z, 0.16); }, {},
        [](std::span<const double> z, std::span<double> g) { p2_grad(z, g, 0.16); });

  std::string msg = "unknown target id '";
  msg += id;
  msg += "'; valid ids:";
  for (const auto& valid : setting_ids()) msg += " " + valid;
  throw ConfigError(msg);
}

}  // namespace miselbo
