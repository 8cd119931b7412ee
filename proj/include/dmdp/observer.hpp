#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "dmdp/solver.hpp"

namespace dmdp {

class ObserverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Prior P(r_i) over the candidate reward functions.
struct PriorDistribution {
    Eigen::VectorXd weights;

    static PriorDistribution uniform(std::size_t n);
    static PriorDistribution explicit_weights(Eigen::VectorXd w);

    std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
};

/// Observer state after one trace prefix: posterior over the reward set and
/// the per-reward divergences it was computed from.
struct PosteriorSnapshot {
    std::size_t step_index = 0;            // 1-based prefix length
    Eigen::VectorXd probabilities;
    Eigen::VectorXd divergences;           // all <= 0
};

/// Divergence from optimality: sum over (s, a) in obs of
/// Q(s, a) - max_a' Q(s, a'). Zero iff the trace is optimal for q's reward.
/// Single-pair divergence term Delta contribution; zero when the pair's state
/// is this hypothesis' own goal (a reached destination makes no step
/// irrational for it).
double delta_contribution(const QTable& q, const GridMap& map, Cell s, Action a);

double divergence(const QTable& q, const GridMap& map,
                  const ObservationSequence& obs);

/// Boltzmann posterior P(r_i | obs) proportional to exp(divergence_i) * prior_i,
/// computed in log-space; beta scales the divergences (default 1, the model's
/// own form).
PosteriorSnapshot posterior(const std::vector<QTable>& qtables, const GridMap& map,
                            const PriorDistribution& prior,
                            const ObservationSequence& obs, double beta = 1.0);

/// Posterior over an index subset, from precomputed divergences. Weights for
/// indices outside `active` are dropped before normalizing.
Eigen::VectorXd posterior_over_set(const Eigen::VectorXd& divergences,
                                   const PriorDistribution& prior,
                                   const std::vector<std::size_t>& active,
                                   double beta = 1.0);

/// One snapshot per prefix length 1..|obs|; incremental divergence
/// accumulation, identical to per-prefix recomputation.
std::vector<PosteriorSnapshot> posterior_stream(const std::vector<QTable>& qtables,
                                                const GridMap& map,
                                                const PriorDistribution& prior,
                                                const ObservationSequence& obs,
                                                double beta = 1.0);

}  // namespace dmdp
