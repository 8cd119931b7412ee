#include "dmdp/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dmdp {

namespace {

double entropy_bits(const Eigen::VectorXd& p) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) h -= p[i] * std::log2(p[i]);
    }
    return h;
}

void extend(PolicyState& state, const std::vector<QTable>& qtables,
            const GridMap& map, Cell s, Action a) {
    for (std::size_t i = 0; i < qtables.size(); ++i) {
        state.divergences[static_cast<Eigen::Index>(i)] +=
            delta_contribution(qtables[i], map, s, a);
    }
    state.obs.push(s, a);
}

// Q read for residual/q-gain purposes: at this reward's own goal the value of
// having arrived is the full goal reward, keeping residuals finite when a
// trace crosses a bogus destination.
double q_at(const QTable& q, const RewardFunction& rf, Cell s, Action a) {
    if (s == rf.goal) return rf.goal_reward;
    return q.q(s, a);
}

double residual_at(const QTable& q, const RewardFunction& rf,
                   const ObservationSequence& obs) {
    if (obs.empty()) return 0.0;
    const auto& first = obs.front();
    const auto& last = obs.back();
    return q_at(q, rf, last.state, last.action) -
           q_at(q, rf, first.state, first.action);
}

}  // namespace

const char* policy_kind_name(PolicyConfig::Kind kind) {
    switch (kind) {
        case PolicyConfig::Kind::honest: return "honest";
        case PolicyConfig::Kind::ambiguity: return "ambiguity";
        case PolicyConfig::Kind::irrationality: return "irrationality";
    }
    return "?";
}

PolicyState PolicyState::initial(std::size_t n_rewards) {
    PolicyState st;
    st.active_set.resize(n_rewards);
    std::iota(st.active_set.begin(), st.active_set.end(), 0);
    st.divergences = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_rewards));
    return st;
}

double residual_reward(const QTable& q, const ObservationSequence& obs) {
    if (obs.empty()) return 0.0;
    const auto& first = obs.front();
    const auto& last = obs.back();
    return q.q(last.state, last.action) - q.q(first.state, first.action);
}

double q_gain(const QTable& q, const ObservationSequence& obs, Cell s, Action a) {
    return q.q(s, a) - residual_reward(q, obs);
}

double irrationality_measure(const std::vector<QTable>& qtables,
                             const GridMap& map, const ObservationSequence& obs) {
    double best = -std::numeric_limits<double>::infinity();
    for (const QTable& q : qtables)
        best = std::max(best, divergence(q, map, obs));
    return 1.0 - std::exp(best);
}

Action ambiguity_action(const Mdp& mdp, const std::vector<QTable>& qtables,
                        const PriorDistribution& prior, PolicyState& state,
                        Cell s, const PolicyConfig& cfg) {
    const GridMap& map = mdp.map;
    const QTable& q_true = qtables[mdp.true_index];
    const std::vector<Action> valid = available_actions(map, s);

    const double true_residual = residual_reward(q_true, state.obs);
    std::vector<Action> candidates;
    for (Action a : valid) {
        if (q_true.q(s, a) - true_residual >= 0.0) candidates.push_back(a);
    }
    if (candidates.empty()) {
        // fallback: single best true-q-gain action
        Action best = valid.front();
        for (Action a : valid) {
            if (q_true.q(s, a) > q_true.q(s, best)) best = a;
        }
        candidates.push_back(best);
    }

    // Best candidate q-gain per reward drives pruning.
    const std::size_t n = qtables.size();
    std::vector<double> best_gain(n);
    for (std::size_t i = 0; i < n; ++i) {
        double residual = residual_at(qtables[i], mdp.rewards[i], state.obs);
        double g = -std::numeric_limits<double>::infinity();
        for (Action a : candidates)
            g = std::max(g, q_at(qtables[i], mdp.rewards[i], s, a) - residual);
        best_gain[i] = g;
    }
    std::vector<std::size_t> active;
    std::vector<std::size_t> pruned;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == mdp.true_index || best_gain[i] >= cfg.delta)
            active.push_back(i);
        else
            pruned.push_back(i);
    }
    std::stable_sort(pruned.begin(), pruned.end(), [&](std::size_t a, std::size_t b) {
        return best_gain[a] > best_gain[b];
    });
    for (std::size_t i : pruned) {
        if (active.size() >= cfg.min_active) break;
        active.push_back(i);
    }
    std::sort(active.begin(), active.end());

    // Pick the candidate whose one-step-extended posterior has max entropy.
    Action chosen = candidates.front();
    double chosen_score = -std::numeric_limits<double>::infinity();
    for (Action a : candidates) {
        Eigen::VectorXd ext = state.divergences;
        for (std::size_t i = 0; i < n; ++i)
            ext[static_cast<Eigen::Index>(i)] +=
                delta_contribution(qtables[i], map, s, a);
        Eigen::VectorXd post =
            posterior_over_set(ext, prior, active, cfg.boltzmann_beta);
        double score = cfg.kappa * entropy_bits(post);
        if (score > chosen_score) {
            chosen_score = score;
            chosen = a;
        }
    }

    extend(state, qtables, map, s, chosen);
    state.active_set = std::move(active);
    return chosen;
}

Action irrationality_action(const Mdp& mdp, const std::vector<QTable>& qtables,
                            PolicyState& state, Cell s, const PolicyConfig& cfg) {
    const GridMap& map = mdp.map;
    const QTable& q_true = qtables[mdp.true_index];
    const std::vector<Action> valid = available_actions(map, s);
    const std::size_t n = qtables.size();

    double q_min = std::numeric_limits<double>::infinity();
    double q_max = -std::numeric_limits<double>::infinity();
    for (Action a : valid) {
        q_min = std::min(q_min, q_true.q(s, a));
        q_max = std::max(q_max, q_true.q(s, a));
    }
    const double span = q_max - q_min;

    Action chosen = valid.front();
    double chosen_score = -std::numeric_limits<double>::infinity();
    for (Action a : valid) {
        // constant rows normalize to 1 for every action
        double qn = span > 0.0 ? (q_true.q(s, a) - q_min) / span : 1.0;
        double best_delta = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double d = state.divergences[static_cast<Eigen::Index>(i)] +
                       delta_contribution(qtables[i], map, s, a);
            best_delta = std::max(best_delta, d);
        }
        double im = 1.0 - std::exp(best_delta);
        double score = (1.0 - cfg.alpha) * qn + cfg.alpha * im;
        if (score > chosen_score) {
            chosen_score = score;
            chosen = a;
        }
    }

    extend(state, qtables, map, s, chosen);
    return chosen;
}

Action honest_action(const QTable& q_true, const GridMap& map, Cell s) {
    return greedy_action(q_true, map, s);
}

std::size_t honest_path_steps(const Mdp& mdp, const QTable& q_true) {
    Cell s = mdp.map.start();
    std::size_t steps = 0;
    const std::size_t hard_cap =
        static_cast<std::size_t>(mdp.map.num_cells()) * 2 + 2;
    while (s != mdp.true_goal()) {
        Action a = greedy_action(q_true, mdp.map, s);
        s = *transition(mdp.map, s, a);
        if (++steps > hard_cap)
            throw PolicyError("greedy trace failed to reach the true goal");
    }
    return steps;
}

EpisodeResult run_episode(const Mdp& mdp, const std::vector<QTable>& qtables,
                          const PriorDistribution& prior, const PolicyConfig& cfg) {
    if (qtables.size() != mdp.rewards.size())
        throw PolicyError("one trained q-table per reward function required");
    const QTable& q_true = qtables[mdp.true_index];
    if (mdp.map.start() == mdp.true_goal())
        throw PolicyError("start coincides with the true goal");

    std::size_t cap = cfg.step_cap;
    if (cap == 0) cap = 10 * honest_path_steps(mdp, q_true);

    PolicyState state = PolicyState::initial(qtables.size());
    Cell s = mdp.map.start();
    EpisodeResult result;
    while (s != mdp.true_goal()) {
        if (state.obs.size() >= cap) {
            result.truncated = true;
            break;
        }
        Action a;
        switch (cfg.kind) {
            case PolicyConfig::Kind::honest:
                a = honest_action(q_true, mdp.map, s);
                extend(state, qtables, mdp.map, s, a);
                break;
            case PolicyConfig::Kind::ambiguity:
                a = ambiguity_action(mdp, qtables, prior, state, s, cfg);
                break;
            case PolicyConfig::Kind::irrationality:
                a = irrationality_action(mdp, qtables, state, s, cfg);
                break;
        }
        s = *transition(mdp.map, s, a);
    }
    result.trace = std::move(state.obs);
    return result;
}

}  // namespace dmdp
