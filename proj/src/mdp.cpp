#include "dmdp/mdp.hpp"

namespace dmdp {

std::array<double, kNumActions> RewardFunction::default_step_costs() {
    std::array<double, kNumActions> costs{};
    for (Action a : all_actions()) costs[static_cast<int>(a)] = -action_cost(a);
    return costs;
}

Mdp::Mdp(GridMap m, std::vector<RewardFunction> rs, std::size_t true_idx, double g)
    : map(std::move(m)), rewards(std::move(rs)), true_index(true_idx), gamma(g) {
    if (rewards.size() != map.num_goals())
        throw GridError("one reward function per map goal required");
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        if (rewards[i].goal != map.goals()[i])
            throw GridError("rewards[i].goal must equal map.goals[i]");
        if (rewards[i].goal_reward <= 0) throw GridError("goal_reward must be positive");
        for (Action a : all_actions()) {
            if (rewards[i].step_cost(a) >= 0)
                throw GridError("step costs must be negative");
        }
    }
    if (true_index >= rewards.size()) throw GridError("true_index out of range");
    if (gamma <= 0 || gamma > 1) throw GridError("gamma must be in (0, 1]");
}

Mdp make_mdp(GridMap map, std::size_t true_index, double gamma, double goal_reward) {
    std::vector<RewardFunction> rewards;
    for (Cell g : map.goals()) {
        RewardFunction rf;
        rf.goal = g;
        rf.goal_reward = goal_reward;
        rewards.push_back(rf);
    }
    return Mdp(std::move(map), std::move(rewards), true_index, gamma);
}

double ObservationSequence::path_cost() const {
    double cost = 0.0;
    for (const Pair& p : pairs) cost += action_cost(p.action);
    return cost;
}

void ObservationSequence::validate(const GridMap& map) const {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        auto next = transition(map, pairs[k].state, pairs[k].action);
        if (!next) throw GridError("observation pair has invalid transition");
        if (k + 1 < pairs.size() && *next != pairs[k + 1].state)
            throw GridError("observation pairs are not transition-consistent");
    }
}

}  // namespace dmdp
