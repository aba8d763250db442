#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "miselbo/approximations.hpp"
#include "miselbo/rng.hpp"

namespace miselbo {

// S x L latent draws with every cross log-density populated, so all
// estimators can share one batch and their algebraic identities hold
// sample-for-sample, not just in expectation.
//
// Layout: z[(s*L + l)*dim + j], log_q[(s_prime*S + s)*L + l],
// log_p[s*L + l]. log_mix[s*L + l] is the stabilized
// log((1/S) sum_s' q_s'(z_{s,l})), accumulated in label order.
struct SampleBatch {
  std::size_t S = 0;
  std::size_t L = 0;
  std::size_t dim = 0;
  std::vector<std::string> labels;
  std::vector<std::size_t> label_order;
  std::vector<double> z;
  std::vector<double> log_q;
  std::vector<double> log_p;
  std::vector<double> log_mix;
  std::uint64_t root_seed = 0;
  std::size_t replicate = 0;

  double lq(std::size_t s_prime, std::size_t s, std::size_t l) const {
    return log_q[(s_prime * S + s) * L + l];
  }
  double lp(std::size_t s, std::size_t l) const { return log_p[s * L + l]; }
  double lmix(std::size_t s, std::size_t l) const { return log_mix[s * L + l]; }
  std::span<const double> point(std::size_t s, std::size_t l) const {
    return {z.data() + (s * L + l) * dim, dim};
  }
};

// Draws L samples per member. Member streams are
// (root_seed, "<stream_id>/<label>/batch/<replicate>"), so batches are
// reproducible and member-order independent.
SampleBatch draw_batch(const Ensemble& ensemble, std::size_t L, const SeedSpec& seed,
                       std::size_t replicate = 0);

// Synthetic batch from raw log-density tables (log_q in [s'][s][l] order);
// used by discrete-support surrogates and the bindings.
SampleBatch batch_from_tables(std::vector<std::string> labels, std::size_t L,
                              std::vector<double> log_q, std::vector<double> log_p);

struct EstimateConfig {
  std::size_t S = 0;
  std::size_t L = 0;
  std::size_t n_replicates = 1;
  std::uint64_t seed = 0;
};

struct BoundEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 when n_replicates == 1
  EstimateConfig config;
};

namespace estimators {

// (1/L) sum_l [log p(z_{s,l}) - log q_s(z_{s,l})]
BoundEstimate elbo(const SampleBatch& batch, std::size_t member);

// log((1/L) sum_l p/q_s) per group of L consecutive samples, averaged over
// the batch's L/L_groups replicate groups. Requires L dividing batch.L.
BoundEstimate iwelbo(const SampleBatch& batch, std::size_t member, std::size_t L);

// (1/S) sum_s log((1/L) sum_l p / ((1/S) sum_s' q_s')), the mixture-weighted
// bound, group-averaged like iwelbo. Accumulated in label order.
BoundEstimate miselbo(const SampleBatch& batch, std::size_t L);

BoundEstimate avg_elbo(const SampleBatch& batch);
BoundEstimate avg_iwelbo(const SampleBatch& batch, std::size_t L);

// Monte-Carlo Jensen-Shannon divergence of the ensemble on the member-own
// samples: (1/S) sum_s (1/L) sum_l [log q_s - log mix]. Free of the target.
BoundEstimate jsd(const SampleBatch& batch);

// miselbo minus avg_iwelbo on the same batch. Equals jsd when L = 1.
BoundEstimate delta(const SampleBatch& batch, std::size_t L);

// Unnormalized KL divergences (no log Z subtraction, may be negative):
// kl_bar averages member KLs, kl_mis is the mixture-vs-target KL under
// stratified per-member sampling. kl_bar - kl_mis = jsd on a shared batch.
BoundEstimate kl_mis(const SampleBatch& batch);
BoundEstimate kl_bar(const SampleBatch& batch);

}  // namespace estimators

enum class EstimatorKind {
  kElbo,
  kIwelbo,
  kMiselbo,
  kAvgElbo,
  kAvgIwelbo,
  kJsd,
  kDelta,
  kKlMis,
  kKlBar,
};

std::string_view estimator_name(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view name);
const std::vector<EstimatorKind>& all_estimators();

// Dispatch; member is required for kElbo/kIwelbo and ignored otherwise.
double evaluate_estimator(EstimatorKind kind, const SampleBatch& batch, std::size_t L,
                          std::optional<std::size_t> member = {});

// Mean and standard error over independent replicate batches
// (distinct derived seeds per replicate).
BoundEstimate estimate_replicated(const Ensemble& ensemble, EstimatorKind kind, std::size_t L,
                                  std::size_t replicates, const SeedSpec& seed,
                                  std::optional<std::size_t> member = {});

}  // namespace miselbo
