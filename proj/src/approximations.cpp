#include "miselbo/approximations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "miselbo/errors.hpp"
#include "miselbo/logsumexp.hpp"

namespace miselbo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double normal_log_pdf(double x, double mean, double sigma) {
  const double u = (x - mean) / sigma;
  return -0.5 * u * u - 0.5 * std::log(kTwoPi * sigma * sigma);
}

}  // namespace

double GaussianApprox::log_density(std::span<const double> z) const {
  if (z.size() != dim())
    throw UsageError("gaussian member has dim " + std::to_string(dim()) + ", got point of dim " +
                     std::to_string(z.size()));
  double acc = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) acc += normal_log_pdf(z[j], mean[j], scale_at(j));
  return acc;
}

double HierarchicalApprox::log_density(std::span<const double> zmu) const {
  if (zmu.size() != kDim) throw UsageError("hierarchical member expects a (z, mu) point");
  const double z = zmu[0];
  const double mu = zmu[1];
  return normal_log_pdf(mu, mu_mean, mu_sigma) + normal_log_pdf(z, mu, cond_sigma);
}

std::size_t approx_dim(const Approximation& approx) {
  return std::visit([](const auto& a) { return a.dim(); }, approx);
}

double member_log_density(const Approximation& approx, std::span<const double> z) {
  return std::visit([z](const auto& a) { return a.log_density(z); }, approx);
}

SampleBatchSlice reparam_sample(const Approximation& approx, RandomStream& stream, std::size_t n) {
  const std::size_t dim = approx_dim(approx);
  SampleBatchSlice slice;
  slice.count = n;
  slice.dim = dim;
  slice.z.resize(n * dim);
  slice.eps.resize(n * dim);

  if (const auto* g = std::get_if<GaussianApprox>(&approx)) {
    for (std::size_t i = 0; i < n * dim; ++i) slice.eps[i] = stream.normal();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        slice.z[i * dim + j] = g->mean[j] + g->scale_at(j) * slice.eps[i * dim + j];
    return slice;
  }

  const auto& h = std::get<HierarchicalApprox>(approx);
  for (std::size_t i = 0; i < n; ++i) {
    const double eps_mu = stream.normal();
    const double eps_z = stream.normal();
    const double mu = h.mu_mean + h.mu_sigma * eps_mu;
    slice.z[i * 2] = mu + h.cond_sigma * eps_z;
    slice.z[i * 2 + 1] = mu;
    slice.eps[i * 2] = eps_z;
    slice.eps[i * 2 + 1] = eps_mu;
  }
  return slice;
}

Ensemble::Ensemble(Target target, std::vector<Member> members)
    : target_(std::move(target)), members_(std::move(members)) {
  if (members_.empty()) throw ConfigError("ensemble needs at least one member");
  std::set<std::string> labels;
  for (const auto& m : members_) {
    if (m.label.empty()) throw ConfigError("ensemble member labels must be nonempty");
    if (!labels.insert(m.label).second)
      throw ConfigError("duplicate ensemble member label '" + m.label + "'");
    if (approx_dim(m.approx) != target_.dim())
      throw ConfigError("member '" + m.label + "' has dim " + std::to_string(approx_dim(m.approx)) +
                        " but target '" + target_.name() + "' has dim " +
                        std::to_string(target_.dim()));
    if (const auto* g = std::get_if<GaussianApprox>(&m.approx)) {
      if (g->scale.empty() || (g->scale.size() != 1 && g->scale.size() != g->dim()))
        throw ConfigError("member '" + m.label + "' scale must have size 1 or dim");
      for (double s : g->scale)
        if (!(s > 0.0)) throw ConfigError("member '" + m.label + "' scale must be positive");
    } else if (const auto* h = std::get_if<HierarchicalApprox>(&m.approx)) {
      if (!(h->mu_sigma > 0.0) || !(h->cond_sigma > 0.0))
        throw ConfigError("member '" + m.label + "' sigmas must be positive");
    }
  }
  label_order_.resize(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) label_order_[i] = i;
  std::sort(label_order_.begin(), label_order_.end(),
            [this](std::size_t a, std::size_t b) { return members_[a].label < members_[b].label; });
}

double Ensemble::member_log_density(std::size_t i, std::span<const double> z) const {
  return miselbo::member_log_density(members_[i].approx, z);
}

double Ensemble::mixture_log_density(std::span<const double> z) const {
  std::vector<double> terms(members_.size());
  for (std::size_t k = 0; k < members_.size(); ++k)
    terms[k] = member_log_density(label_order_[k], z);
  // m + log(acc / S): identical members reduce to the member density bitwise.
  const double m = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return m + std::log(acc / static_cast<double>(members_.size()));
}

}  // namespace miselbo
