#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "dmdp/grid.hpp"

namespace dmdp {

/// One candidate goal: large terminal reward, strictly negative step costs.
struct RewardFunction {
    Cell goal;
    double goal_reward = 10000.0;
    // step cost per action in canonical order; defaults to -action_cost(a)
    std::array<double, kNumActions> step_costs = default_step_costs();

    static std::array<double, kNumActions> default_step_costs();

    double step_cost(Action a) const { return step_costs[static_cast<int>(a)]; }
};

/// r(s, a, s') for a valid transition.
inline double reward(const RewardFunction& rf, Cell /*s*/, Action a, Cell s_next) {
    return rf.step_cost(a) + (s_next == rf.goal ? rf.goal_reward : 0.0);
}

/// The full problem: map, candidate reward set, which one is real, discount.
struct Mdp {
    GridMap map;
    std::vector<RewardFunction> rewards;
    std::size_t true_index = 0;
    double gamma = 1.0;

    Mdp(GridMap m, std::vector<RewardFunction> rs, std::size_t true_idx,
        double g = 1.0);

    const RewardFunction& true_reward() const { return rewards[true_index]; }
    Cell true_goal() const { return rewards[true_index].goal; }
};

/// Builds an Mdp with one default-parameter reward function per map goal.
Mdp make_mdp(GridMap map, std::size_t true_index, double gamma = 1.0,
             double goal_reward = 10000.0);

/// Ordered (state, action) pairs shared by the policies and the observer.
struct ObservationSequence {
    struct Pair {
        Cell state;
        Action action;
        friend bool operator==(const Pair&, const Pair&) = default;
    };
    std::vector<Pair> pairs;

    bool empty() const { return pairs.empty(); }
    std::size_t size() const { return pairs.size(); }
    const Pair& front() const { return pairs.front(); }
    const Pair& back() const { return pairs.back(); }

    void push(Cell s, Action a) { pairs.push_back({s, a}); }

    /// Sum of action costs over the trace.
    double path_cost() const;

    /// Checks transition consistency and validity of every pair against map.
    /// Throws GridError on violation.
    void validate(const GridMap& map) const;
};

}  // namespace dmdp
