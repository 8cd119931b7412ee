#include "dmdp/metrics.hpp"

#include <cmath>
#include <limits>

namespace dmdp {

namespace {

double step_term(const PosteriorSnapshot& snap, std::size_t true_index) {
    const auto n = snap.probabilities.size();
    if (n < 2) throw MetricsError("at least two reward functions required");
    double best_bogus = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<std::size_t>(i) == true_index) continue;
        best_bogus = std::max(best_bogus, snap.probabilities[i]);
    }
    return best_bogus - snap.probabilities[static_cast<Eigen::Index>(true_index)];
}

}  // namespace

double simulation_value(const std::vector<PosteriorSnapshot>& snapshots,
                        std::size_t true_index) {
    if (snapshots.empty()) throw MetricsError("empty snapshot stream");
    double sum = 0.0;
    for (const auto& snap : snapshots) sum += step_term(snap, true_index);
    return sum / static_cast<double>(snapshots.size());
}

bool deceptive_step(const PosteriorSnapshot& snapshot, std::size_t true_index) {
    return step_term(snapshot, true_index) >= 0.0;
}

std::size_t last_deceptive_point(const std::vector<PosteriorSnapshot>& snapshots,
                                 std::size_t true_index) {
    std::size_t ldp = 0;
    for (std::size_t j = 0; j < snapshots.size(); ++j) {
        if (deceptive_step(snapshots[j], true_index)) ldp = j + 1;
    }
    return ldp;
}

double non_deceptive_fraction(const std::vector<PosteriorSnapshot>& snapshots,
                              std::size_t true_index) {
    if (snapshots.empty()) throw MetricsError("empty snapshot stream");
    std::size_t count = 0;
    for (const auto& snap : snapshots) {
        if (!deceptive_step(snap, true_index)) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(snapshots.size());
}

double belief_induced_score(const ObservationSequence& trace,
                            const std::vector<PosteriorSnapshot>& snapshots,
                            const Mdp& mdp, double omega) {
    if (trace.size() != snapshots.size())
        throw MetricsError("trace and snapshot stream lengths differ");
    double total = 0.0;
    for (std::size_t j = 0; j < trace.size(); ++j) {
        const auto& p = trace.pairs[j];
        Cell next = *transition(mdp.map, p.state, p.action);
        double r = reward(mdp.true_reward(), p.state, p.action, next);
        total += (1.0 - omega) * r + omega * step_term(snapshots[j], mdp.true_index);
    }
    return total;
}

std::vector<std::pair<double, double>> checkpoint_posteriors(
    const std::vector<PosteriorSnapshot>& snapshots, std::size_t true_index,
    const std::vector<double>& fractions) {
    if (snapshots.empty()) throw MetricsError("empty snapshot stream");
    const auto t = static_cast<double>(snapshots.size());
    std::vector<std::pair<double, double>> out;
    for (double f : fractions) {
        auto idx = static_cast<std::size_t>(std::ceil(f * t));
        idx = std::max<std::size_t>(1, std::min(idx, snapshots.size()));
        out.emplace_back(
            f, snapshots[idx - 1].probabilities[static_cast<Eigen::Index>(true_index)]);
    }
    return out;
}

std::vector<double> default_checkpoints() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

}  // namespace dmdp
