#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "dmdp/mdp.hpp"

namespace dmdp {

struct SolverConfig {
    double tolerance = 1e-6;   // max absolute Bellman residual
    int max_sweeps = 100000;
};

class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Exact action values for one reward function. Rows are row-major cells,
/// columns the canonical actions; invalid (s, a) pairs hold NaN. The goal
/// cell is absorbing with value 0. Immutable after training.
class QTable {
  public:
    QTable(std::size_t reward_index, Cell goal, double gamma,
           double converged_residual, Eigen::MatrixXd values, int width);

    std::size_t reward_index() const { return reward_index_; }
    Cell goal() const { return goal_; }
    double gamma() const { return gamma_; }
    double converged_residual() const { return converged_residual_; }
    const Eigen::MatrixXd& values() const { return values_; }

    double q(Cell s, Action a) const {
        return values_(s.y * width_ + s.x, static_cast<int>(a));
    }

    /// V(s) = max_a Q(s, a); 0 at the goal (absorbing convention).
    double state_value(Cell s) const;

  private:
    std::size_t reward_index_;
    Cell goal_;
    double gamma_;
    double converged_residual_;
    Eigen::MatrixXd values_;  // num_cells x kNumActions
    int width_;
};

/// Gauss-Seidel value iteration, row-major sweeps, canonical action order,
/// initialized below the fixed point so sweep values improve monotonically.
/// Throws SolverError on unreachable goal or sweep exhaustion.
QTable value_iteration(const Mdp& mdp, std::size_t reward_index,
                       const SolverConfig& cfg = {});

/// Action maximizing Q(s, .); ties broken by canonical order.
Action greedy_action(const QTable& q, const GridMap& map, Cell s);

/// One QTable per reward function, in reward order.
std::vector<QTable> train_all(const Mdp& mdp, const SolverConfig& cfg = {});

/// Cache round-trip. The loader verifies map hash, gamma and reward index
/// and throws SolverError on any mismatch.
void save_qtable(const QTable& q, const GridMap& map, double tolerance,
                 const std::string& path);
QTable load_qtable(const std::string& path, const GridMap& map, double gamma,
                   std::size_t reward_index);

}  // namespace dmdp
