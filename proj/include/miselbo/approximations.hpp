#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "miselbo/rng.hpp"
#include "miselbo/targets.hpp"

namespace miselbo {

// Gaussian variational member with isotropic (scale.size() == 1) or
// diagonal (scale.size() == dim) scale. Scales stay strictly positive;
// training steps act on log-scale.
struct GaussianApprox {
  std::vector<double> mean;
  std::vector<double> scale;
  bool train_mean = true;
  bool train_scale = false;

  std::size_t dim() const { return mean.size(); }
  double scale_at(std::size_t j) const { return scale.size() == 1 ? scale[0] : scale[j]; }

  double log_density(std::span<const double> z) const;
};

// Factorized member over (z, mu): q(mu) = N(mu_mean, mu_sigma^2) and
// q(z|mu) = N(mu, cond_sigma^2), sampled ancestrally. Points are packed
// as (z, mu), matching the hierarchical target.
struct HierarchicalApprox {
  double mu_mean = 10.0;
  double mu_sigma = 1.0;
  double cond_sigma = 1.0;

  static constexpr std::size_t kDim = 2;
  std::size_t dim() const { return kDim; }

  double log_density(std::span<const double> zmu) const;
};

using Approximation = std::variant<GaussianApprox, HierarchicalApprox>;

std::size_t approx_dim(const Approximation& approx);
double member_log_density(const Approximation& approx, std::span<const double> z);

// Reparameterized draws: z = transform(parameters, eps). The noise is kept
// so gradients can reuse the exact draws.
struct SampleBatchSlice {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> z;    // count x dim, row-major
  std::vector<double> eps;  // same layout; eps[i][j] is the noise behind z[i][j]

  std::span<const double> point(std::size_t i) const { return {z.data() + i * dim, dim}; }
  std::span<const double> noise(std::size_t i) const { return {eps.data() + i * dim, dim}; }
};

SampleBatchSlice reparam_sample(const Approximation& approx, RandomStream& stream, std::size_t n);

struct Member {
  std::string label;
  Approximation approx;
};

// Equally weighted set of approximations sharing one target. Reductions
// over members run in label-sorted order so every estimate is exactly
// invariant under member reordering.
class Ensemble {
 public:
  Ensemble(Target target, std::vector<Member> members);

  std::size_t size() const { return members_.size(); }
  std::size_t dim() const { return target_.dim(); }
  const Target& target() const { return target_; }
  const std::vector<Member>& members() const { return members_; }
  const Member& member(std::size_t i) const { return members_[i]; }
  const std::vector<std::size_t>& label_order() const { return label_order_; }

  double member_log_density(std::size_t i, std::span<const double> z) const;

  // log((1/S) sum_s q_s(z)), stabilized, accumulated in label order.
  double mixture_log_density(std::span<const double> z) const;

 private:
  Target target_;
  std::vector<Member> members_;
  std::vector<std::size_t> label_order_;
};

}  // namespace miselbo
