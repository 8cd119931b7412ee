#include "dmdp/observer.hpp"

#include <cmath>
#include <limits>

namespace dmdp {

PriorDistribution PriorDistribution::uniform(std::size_t n) {
    if (n == 0) throw ObserverError("prior over empty reward set");
    return {Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / n)};
}

PriorDistribution PriorDistribution::explicit_weights(Eigen::VectorXd w) {
    if (w.size() == 0 || (w.array() <= 0).any())
        throw ObserverError("prior weights must be positive");
    if (std::abs(w.sum() - 1.0) > 1e-9)
        throw ObserverError("prior weights must sum to 1");
    return {std::move(w)};
}

double delta_contribution(const QTable& q, const GridMap& map, Cell s, Action a) {
    // A pair taken at this hypothesis' own goal is never irrational for it:
    // the destination was already reached, so the step carries no evidence.
    if (s == map.goals().at(q.reward_index())) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (Action b : available_actions(map, s)) best = std::max(best, q.q(s, b));
    return q.q(s, a) - best;
}

double divergence(const QTable& q, const GridMap& map,
                  const ObservationSequence& obs) {
    double sum = 0.0;
    for (const auto& p : obs.pairs)
        sum += delta_contribution(q, map, p.state, p.action);
    return sum;
}

namespace {

Eigen::VectorXd normalize_logits(const Eigen::VectorXd& logits) {
    // log-sum-exp; divergences scale with path costs, naive exp underflows
    double peak = logits.maxCoeff();
    Eigen::VectorXd p = (logits.array() - peak).exp();
    double total = p.sum();
    if (!(total > 0.0) || !std::isfinite(total))
        throw ObserverError("degenerate posterior distribution");
    return p / total;
}

}  // namespace

PosteriorSnapshot posterior(const std::vector<QTable>& qtables, const GridMap& map,
                            const PriorDistribution& prior,
                            const ObservationSequence& obs, double beta) {
    if (qtables.empty()) throw ObserverError("posterior over empty reward set");
    const auto n = static_cast<Eigen::Index>(qtables.size());
    if (prior.weights.size() != n)
        throw ObserverError("prior size does not match reward set");

    PosteriorSnapshot snap;
    snap.step_index = obs.size();
    snap.divergences.resize(n);
    Eigen::VectorXd logits(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        snap.divergences[i] = divergence(qtables[i], map, obs);
        logits[i] = beta * snap.divergences[i] + std::log(prior.weights[i]);
    }
    snap.probabilities = normalize_logits(logits);
    return snap;
}

Eigen::VectorXd posterior_over_set(const Eigen::VectorXd& divergences,
                                   const PriorDistribution& prior,
                                   const std::vector<std::size_t>& active,
                                   double beta) {
    if (active.empty()) throw ObserverError("posterior over empty active set");
    Eigen::VectorXd logits(static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
        auto i = static_cast<Eigen::Index>(active[k]);
        logits[static_cast<Eigen::Index>(k)] =
            beta * divergences[i] + std::log(prior.weights[i]);
    }
    Eigen::VectorXd packed = normalize_logits(logits);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(divergences.size());
    for (std::size_t k = 0; k < active.size(); ++k)
        out[static_cast<Eigen::Index>(active[k])] = packed[static_cast<Eigen::Index>(k)];
    return out;
}

std::vector<PosteriorSnapshot> posterior_stream(const std::vector<QTable>& qtables,
                                                const GridMap& map,
                                                const PriorDistribution& prior,
                                                const ObservationSequence& obs,
                                                double beta) {
    if (qtables.empty()) throw ObserverError("posterior over empty reward set");
    const auto n = static_cast<Eigen::Index>(qtables.size());
    if (prior.weights.size() != n)
        throw ObserverError("prior size does not match reward set");

    std::vector<PosteriorSnapshot> out;
    out.reserve(obs.size());
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 0; j < obs.size(); ++j) {
        const auto& p = obs.pairs[j];
        for (Eigen::Index i = 0; i < n; ++i)
            delta[i] += delta_contribution(qtables[i], map, p.state, p.action);
        PosteriorSnapshot snap;
        snap.step_index = j + 1;
        snap.divergences = delta;
        Eigen::VectorXd logits =
            beta * delta.array() + prior.weights.array().log();
        snap.probabilities = normalize_logits(logits);
        out.push_back(std::move(snap));
    }
    return out;
}

}  // namespace dmdp
