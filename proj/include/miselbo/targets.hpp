#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace miselbo {

// Isotropic Gaussian mixture over R^dim, normalized by construction.
struct GaussianMixtureSpec {
  std::vector<double> weights;             // sums to 1
  std::vector<std::vector<double>> means;  // one entry per component
  std::vector<double> sigmas;              // per-component isotropic sigma
};

// An unnormalized log-density over R^dim. The log-normalizer is present
// only where it is known (mixtures, hierarchical joint), enabling oracle
// checks like E[MISELBO] <= log Z.
class Target {
 public:
  using LogDensityFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

  Target(std::string name, std::size_t dim, LogDensityFn log_unnorm,
         std::optional<double> log_normalizer = {}, GradientFn gradient = {});

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  std::optional<double> log_normalizer() const { return log_normalizer_; }

  // log p~(z); throws UsageError on dimension mismatch.
  double log_density(std::span<const double> z) const;

  bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }

  // d/dz log p~(z) into grad (same length as z).
  void analytic_gradient(std::span<const double> z, std::span<double> grad) const;

 private:
  std::string name_;
  std::size_t dim_;
  LogDensityFn log_unnorm_;
  std::optional<double> log_normalizer_;
  GradientFn gradient_;
};

// Normalized isotropic Gaussian mixture (log Z = 0), log-sum-exp stabilized.
Target make_gaussian_mixture(GaussianMixtureSpec spec, std::string name = "mixture");

// Built-in settings:
//   i            uniform mixture of six Gaussians, means {-5,0,5,10,15,20}, sigma 0.5
//   ii           uniform mixture of three Gaussians, means {0,10,20}, sigma 1.1
//   iii          (1/2) N(0,4) + (1/2) N(10,16)     (variances)
//   hierarchical joint over (z, mu): p(z) = setting i, p(mu) = N(10, 9)
//   p1           2-D ring energy with linear-exponent tilt terms
//   p1-squared   2-D ring energy with squared-exponent wells at z1 = +-2
//                (the form the reproduction presets use)
//   p2           2-D sine ridge, -(z2 - sin(pi z1 / 2))^2 / (2 * 0.4)
//   p2-squared   sine ridge with 0.4 inside the square
// Unknown ids raise ConfigError listing the valid ids.
Target make_setting(std::string_view id);

const std::vector<std::string>& setting_ids();

}  // namespace miselbo
