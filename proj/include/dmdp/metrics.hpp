#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "dmdp/observer.hpp"

namespace dmdp {

class MetricsError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Everything measured about one episode.
struct EpisodeMetrics {
    double path_cost = 0.0;
    double optimal_cost = 0.0;
    double cost_ratio = 0.0;
    std::vector<std::pair<double, double>> checkpoint_posteriors;
    double simulation_value = 0.0;
    std::size_t ldp_index = 0;
    double non_deceptive_fraction = 0.0;
    bool truncated = false;
};

/// Average over prefixes of (highest bogus posterior - true posterior).
/// Positive means the observer believes a wrong reward function.
double simulation_value(const std::vector<PosteriorSnapshot>& snapshots,
                        std::size_t true_index);

/// A step is deceptive when the true reward's posterior fails to strictly
/// dominate every bogus one (ties count as deceptive).
bool deceptive_step(const PosteriorSnapshot& snapshot, std::size_t true_index);

/// 1-based index of the last deceptive snapshot; 0 when none is deceptive.
std::size_t last_deceptive_point(const std::vector<PosteriorSnapshot>& snapshots,
                                 std::size_t true_index);

double non_deceptive_fraction(const std::vector<PosteriorSnapshot>& snapshots,
                              std::size_t true_index);

/// Sum over steps of (1-omega) * reward + omega * per-step deception term.
double belief_induced_score(const ObservationSequence& trace,
                            const std::vector<PosteriorSnapshot>& snapshots,
                            const Mdp& mdp, double omega);

/// True-goal posterior at snapshot ceil(f * t), clamped to [1, t], per fraction.
std::vector<std::pair<double, double>> checkpoint_posteriors(
    const std::vector<PosteriorSnapshot>& snapshots, std::size_t true_index,
    const std::vector<double>& fractions);

/// Default checkpoint fractions 0.1 .. 0.9.
std::vector<double> default_checkpoints();

}  // namespace dmdp
