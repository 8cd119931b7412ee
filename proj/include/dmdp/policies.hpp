#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "dmdp/observer.hpp"

namespace dmdp {

class PolicyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct PolicyConfig {
    enum class Kind { honest, ambiguity, irrationality };

    Kind kind = Kind::honest;
    double alpha = 0.3;        // irrationality weight
    double delta = 0.0;        // pruning threshold
    std::size_t min_active = 1;
    double kappa = 1.0;        // entropy normalizer; selection is kappa-invariant
    std::size_t step_cap = 0;  // 0 = 10x the optimal honest path length
    double boltzmann_beta = 1.0;
};

const char* policy_kind_name(PolicyConfig::Kind kind);

/// Per-episode mutable state. `divergences` caches the divergence of `obs`
/// for every reward function so each step extends in O(|R| * |A|).
struct PolicyState {
    ObservationSequence obs;
    std::vector<std::size_t> active_set;  // sorted reward indices
    Eigen::VectorXd divergences;

    static PolicyState initial(std::size_t n_rewards);
};

/// Residual reward banked along obs: Q at the last pair minus Q at the first
/// pair. Zero on an empty or single-pair trace.
double residual_reward(const QTable& q, const ObservationSequence& obs);

/// G(s, a) = Q(s, a) - residual_reward(obs). Positive means a moves toward
/// this reward function's payoff.
double q_gain(const QTable& q, const ObservationSequence& obs, Cell s, Action a);

/// Irrationality of a trace: 1 - max_i exp(divergence_i). Zero on traces
/// optimal for any candidate reward, approaching 1 as the trace becomes
/// irrational for all of them.
double irrationality_measure(const std::vector<QTable>& qtables,
                             const GridMap& map, const ObservationSequence& obs);

/// Entropy-maximizing step over the observer posterior restricted to the
/// active reward set. Candidates are the valid actions with non-negative true
/// q-gain; when none qualify the single best true-q-gain action is used.
/// Rewards whose best candidate q-gain falls below cfg.delta are pruned from
/// the entropy set, never the true reward and never below cfg.min_active.
Action ambiguity_action(const Mdp& mdp, const std::vector<QTable>& qtables,
                        const PriorDistribution& prior, PolicyState& state,
                        Cell s, const PolicyConfig& cfg);

/// Argmax over valid actions of (1-alpha) * Qn + alpha * IM(obs + (s, a)),
/// where Qn is the true-reward Q row min-max normalized to [0, 1].
Action irrationality_action(const Mdp& mdp, const std::vector<QTable>& qtables,
                            PolicyState& state, Cell s, const PolicyConfig& cfg);

/// Greedy step on the true reward's Q-table.
Action honest_action(const QTable& q_true, const GridMap& map, Cell s);

struct EpisodeResult {
    ObservationSequence trace;
    bool truncated = false;
};

/// Drives the configured policy from the map start until the true goal is
/// reached or the step cap fires (reported via `truncated`).
EpisodeResult run_episode(const Mdp& mdp, const std::vector<QTable>& qtables,
                          const PriorDistribution& prior, const PolicyConfig& cfg);

/// Step count of the greedy trace from start to the true goal.
std::size_t honest_path_steps(const Mdp& mdp, const QTable& q_true);

}  // namespace dmdp
