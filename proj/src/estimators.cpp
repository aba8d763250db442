#include "miselbo/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "miselbo/errors.hpp"
#include "miselbo/logsumexp.hpp"

namespace miselbo {

namespace {

std::vector<std::size_t> sorted_label_order(const std::vector<std::string>& labels) {
  std::vector<std::size_t> order(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&labels](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  return order;
}

void compute_log_mix(SampleBatch& batch) {
  batch.log_mix.resize(batch.S * batch.L);
  std::vector<double> terms(batch.S);
  for (std::size_t s = 0; s < batch.S; ++s)
    for (std::size_t l = 0; l < batch.L; ++l) {
      for (std::size_t k = 0; k < batch.S; ++k) terms[k] = batch.lq(batch.label_order[k], s, l);
      // m + log(acc / S) rather than lse - log S: identical members then give
      // log(1) = 0 and the mixture equals the member density bitwise.
      const double m = *std::max_element(terms.begin(), terms.end());
      double acc = 0.0;
      for (double t : terms) acc += std::exp(t - m);
      batch.log_mix[s * batch.L + l] = m + std::log(acc / static_cast<double>(batch.S));
    }
}

EstimateConfig batch_config(const SampleBatch& batch, std::size_t L) {
  return {batch.S, L, 1, batch.root_seed};
}

void check_group_size(const SampleBatch& batch, std::size_t L) {
  if (L == 0 || L > batch.L || batch.L % L != 0)
    throw UsageError("L = " + std::to_string(L) + " must divide the batch size " +
                     std::to_string(batch.L));
}

// Mean over groups of L consecutive samples of log((1/L) sum exp(lw)).
double grouped_log_mean_exp(std::span<const double> lw, std::size_t L) {
  const std::size_t groups = lw.size() / L;
  double acc = 0.0;
  for (std::size_t g = 0; g < groups; ++g) acc += log_mean_exp(lw.subspan(g * L, L));
  return acc / static_cast<double>(groups);
}

double member_iwelbo(const SampleBatch& batch, std::size_t s, std::size_t L) {
  std::vector<double> lw(batch.L);
  for (std::size_t l = 0; l < batch.L; ++l) lw[l] = batch.lp(s, l) - batch.lq(s, s, l);
  return grouped_log_mean_exp(lw, L);
}

double member_mis_term(const SampleBatch& batch, std::size_t s, std::size_t L) {
  std::vector<double> lw(batch.L);
  for (std::size_t l = 0; l < batch.L; ++l) lw[l] = batch.lp(s, l) - batch.lmix(s, l);
  return grouped_log_mean_exp(lw, L);
}

// Accumulates term(s) / S member by member in label order. Every
// member-averaged estimator goes through this one update so the
// telescoping identities share their rounding.
template <typename PerMember>
double label_ordered_mean(const SampleBatch& batch, PerMember&& term) {
  const double inv_s = 1.0 / static_cast<double>(batch.S);
  double acc = 0.0;
  for (std::size_t k = 0; k < batch.S; ++k) acc += inv_s * term(batch.label_order[k]);
  return acc;
}

}  // namespace

SampleBatch draw_batch(const Ensemble& ensemble, std::size_t L, const SeedSpec& seed,
                       std::size_t replicate) {
  if (L == 0) throw UsageError("batch size L must be at least 1");
  SampleBatch batch;
  batch.S = ensemble.size();
  batch.L = L;
  batch.dim = ensemble.dim();
  batch.root_seed = seed.root_seed;
  batch.replicate = replicate;
  batch.labels.reserve(batch.S);
  for (const auto& m : ensemble.members()) batch.labels.push_back(m.label);
  batch.label_order = ensemble.label_order();

  batch.z.resize(batch.S * L * batch.dim);
  batch.log_q.resize(batch.S * batch.S * L);
  batch.log_p.resize(batch.S * L);

  for (std::size_t s = 0; s < batch.S; ++s) {
    auto stream = derive_stream(
        seed.root_seed,
        stream_path({seed.stream_id, batch.labels[s], "batch", std::to_string(replicate)}));
    const auto slice = reparam_sample(ensemble.member(s).approx, stream, L);
    std::copy(slice.z.begin(), slice.z.end(), batch.z.begin() + s * L * batch.dim);
    for (std::size_t l = 0; l < L; ++l) {
      const auto point = batch.point(s, l);
      batch.log_p[s * L + l] = ensemble.target().log_density(point);
      for (std::size_t sp = 0; sp < batch.S; ++sp)
        batch.log_q[(sp * batch.S + s) * L + l] = ensemble.member_log_density(sp, point);
    }
  }
  compute_log_mix(batch);
  return batch;
}

SampleBatch batch_from_tables(std::vector<std::string> labels, std::size_t L,
                              std::vector<double> log_q, std::vector<double> log_p) {
  SampleBatch batch;
  batch.S = labels.size();
  batch.L = L;
  if (batch.S == 0 || L == 0) throw UsageError("batch needs S >= 1 and L >= 1");
  if (log_q.size() != batch.S * batch.S * L || log_p.size() != batch.S * L)
    throw UsageError("log_q must be S*S*L and log_p S*L");
  batch.labels = std::move(labels);
  batch.label_order = sorted_label_order(batch.labels);
  batch.log_q = std::move(log_q);
  batch.log_p = std::move(log_p);
  compute_log_mix(batch);
  return batch;
}

namespace estimators {

BoundEstimate elbo(const SampleBatch& batch, std::size_t member) {
  double acc = 0.0;
  for (std::size_t l = 0; l < batch.L; ++l)
    acc += batch.lp(member, l) - batch.lq(member, member, l);
  return {acc / static_cast<double>(batch.L), 0.0, batch_config(batch, batch.L)};
}

BoundEstimate iwelbo(const SampleBatch& batch, std::size_t member, std::size_t L) {
  check_group_size(batch, L);
  return {member_iwelbo(batch, member, L), 0.0, batch_config(batch, L)};
}

BoundEstimate miselbo(const SampleBatch& batch, std::size_t L) {
  check_group_size(batch, L);
  const double value =
      label_ordered_mean(batch, [&](std::size_t s) { return member_mis_term(batch, s, L); });
  return {value, 0.0, batch_config(batch, L)};
}

BoundEstimate avg_elbo(const SampleBatch& batch) {
  const double value =
      label_ordered_mean(batch, [&](std::size_t s) { return elbo(batch, s).value; });
  return {value, 0.0, batch_config(batch, batch.L)};
}

BoundEstimate avg_iwelbo(const SampleBatch& batch, std::size_t L) {
  check_group_size(batch, L);
  const double value =
      label_ordered_mean(batch, [&](std::size_t s) { return member_iwelbo(batch, s, L); });
  return {value, 0.0, batch_config(batch, L)};
}

BoundEstimate jsd(const SampleBatch& batch) {
  const double value = label_ordered_mean(batch, [&](std::size_t s) {
    double acc = 0.0;
    for (std::size_t l = 0; l < batch.L; ++l) acc += batch.lq(s, s, l) - batch.lmix(s, l);
    return acc / static_cast<double>(batch.L);
  });
  return {value, 0.0, batch_config(batch, batch.L)};
}

BoundEstimate delta(const SampleBatch& batch, std::size_t L) {
  const double value = miselbo(batch, L).value - avg_iwelbo(batch, L).value;
  return {value, 0.0, batch_config(batch, L)};
}

BoundEstimate kl_bar(const SampleBatch& batch) {
  const double value = label_ordered_mean(batch, [&](std::size_t s) {
    double acc = 0.0;
    for (std::size_t l = 0; l < batch.L; ++l) acc += batch.lq(s, s, l) - batch.lp(s, l);
    return acc / static_cast<double>(batch.L);
  });
  return {value, 0.0, batch_config(batch, batch.L)};
}

BoundEstimate kl_mis(const SampleBatch& batch) {
  const double value = label_ordered_mean(batch, [&](std::size_t s) {
    double acc = 0.0;
    for (std::size_t l = 0; l < batch.L; ++l) acc += batch.lmix(s, l) - batch.lp(s, l);
    return acc / static_cast<double>(batch.L);
  });
  return {value, 0.0, batch_config(batch, batch.L)};
}

}  // namespace estimators

std::string_view estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kElbo: return "elbo";
    case EstimatorKind::kIwelbo: return "iwelbo";
    case EstimatorKind::kMiselbo: return "miselbo";
    case EstimatorKind::kAvgElbo: return "avg_elbo";
    case EstimatorKind::kAvgIwelbo: return "avg_iwelbo";
    case EstimatorKind::kJsd: return "jsd";
    case EstimatorKind::kDelta: return "delta";
    case EstimatorKind::kKlMis: return "kl_mis";
    case EstimatorKind::kKlBar: return "kl_bar";
  }
  return "unknown";
}

EstimatorKind parse_estimator(std::string_view name) {
  for (EstimatorKind kind : all_estimators())
    if (estimator_name(kind) == name) return kind;
  std::string msg = "unknown estimator '";
  msg += name;
  msg += "'; valid:";
  for (EstimatorKind kind : all_estimators()) {
    msg += ' ';
    msg += estimator_name(kind);
  }
  throw ConfigError(msg);
}

const std::vector<EstimatorKind>& all_estimators() {
  static const std::vector<EstimatorKind> kinds = {
      EstimatorKind::kElbo,   EstimatorKind::kIwelbo, EstimatorKind::kMiselbo,
      EstimatorKind::kAvgElbo, EstimatorKind::kAvgIwelbo, EstimatorKind::kJsd,
      EstimatorKind::kDelta,  EstimatorKind::kKlMis,  EstimatorKind::kKlBar};
  return kinds;
}

double evaluate_estimator(EstimatorKind kind, const SampleBatch& batch, std::size_t L,
                          std::optional<std::size_t> member) {
  using namespace estimators;
  const auto need_member = [&]() -> std::size_t {
    if (!member) throw UsageError("per-member estimator needs a member index");
    if (*member >= batch.S) throw UsageError("member index out of range");
    return *member;
  };
  switch (kind) {
    case EstimatorKind::kElbo: return elbo(batch, need_member()).value;
    case EstimatorKind::kIwelbo: return iwelbo(batch, need_member(), L).value;
    case EstimatorKind::kMiselbo: return miselbo(batch, L).value;
    case EstimatorKind::kAvgElbo: return avg_elbo(batch).value;
    case EstimatorKind::kAvgIwelbo: return avg_iwelbo(batch, L).value;
    case EstimatorKind::kJsd: return jsd(batch).value;
    case EstimatorKind::kDelta: return delta(batch, L).value;
    case EstimatorKind::kKlMis: return kl_mis(batch).value;
    case EstimatorKind::kKlBar: return kl_bar(batch).value;
  }
  throw UsageError("unhandled estimator kind");
}

BoundEstimate estimate_replicated(const Ensemble& ensemble, EstimatorKind kind, std::size_t L,
                                  std::size_t replicates, const SeedSpec& seed,
                                  std::optional<std::size_t> member) {
  if (replicates == 0) throw UsageError("replicates must be at least 1");
  std::vector<double> values(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    const SampleBatch batch = draw_batch(ensemble, L, seed, r);
    values[r] = evaluate_estimator(kind, batch, L, member);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(replicates);
  double se = 0.0;
  if (replicates > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / static_cast<double>(replicates - 1)) /
         std::sqrt(static_cast<double>(replicates));
  }
  return {mean, se, {ensemble.size(), L, replicates, seed.root_seed}};
}

}  // namespace miselbo
