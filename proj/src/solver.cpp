#include "dmdp/solver.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

namespace dmdp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool reachable(const GridMap& map, Cell from, Cell to) {
    std::vector<char> seen(map.num_cells(), 0);
    std::deque<Cell> frontier{from};
    seen[map.index(from)] = 1;
    while (!frontier.empty()) {
        Cell s = frontier.front();
        frontier.pop_front();
        if (s == to) return true;
        for (Action a : all_actions()) {
            if (auto t = transition(map, s, a); t && !seen[map.index(*t)]) {
                seen[map.index(*t)] = 1;
                frontier.push_back(*t);
            }
        }
    }
    return false;
}

}  // namespace

QTable::QTable(std::size_t reward_index, Cell goal, double gamma,
               double converged_residual, Eigen::MatrixXd values, int width)
    : reward_index_(reward_index),
      goal_(goal),
      gamma_(gamma),
      converged_residual_(converged_residual),
      values_(std::move(values)),
      width_(width) {}

double QTable::state_value(Cell s) const {
    if (s == goal_) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumActions; ++a) {
        double v = values_(s.y * width_ + s.x, a);
        if (!std::isnan(v) && v > best) best = v;
    }
    return best;
}

QTable value_iteration(const Mdp& mdp, std::size_t reward_index,
                       const SolverConfig& cfg) {
    const GridMap& map = mdp.map;
    const RewardFunction& rf = mdp.rewards.at(reward_index);
    if (!reachable(map, map.start(), rf.goal))
        throw SolverError("goal " + std::to_string(reward_index) +
                          " unreachable from start");

    const int n = map.num_cells();
    const double init = -(map.width() + map.height()) * std::sqrt(2.0);
    Eigen::MatrixXd q = Eigen::MatrixXd::Constant(n, kNumActions, kNaN);
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, kNaN);

    for (int i = 0; i < n; ++i) {
        Cell s = map.cell_at(i);
        if (!map.free(s)) continue;
        if (s == rf.goal) {
            v[i] = 0.0;  // absorbing
            continue;
        }
        v[i] = init;
        for (Action a : all_actions()) {
            if (transition(map, s, a)) q(i, static_cast<int>(a)) = init;
        }
    }

    auto backup = [&](Cell s, Action a, Cell t) {
        double cont = (t == rf.goal) ? rf.goal_reward : mdp.gamma * v[map.index(t)];
        return rf.step_cost(a) + cont;
    };

    auto bellman_residual = [&] {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            Cell s = map.cell_at(i);
            if (!map.free(s) || s == rf.goal) continue;
            for (Action a : all_actions()) {
                auto t = transition(map, s, a);
                if (!t) continue;
                worst = std::max(worst,
                                 std::abs(q(i, static_cast<int>(a)) - backup(s, a, *t)));
            }
        }
        return worst;
    };

    int sweeps = 0;
    double residual = std::numeric_limits<double>::infinity();
    while (sweeps < cfg.max_sweeps) {
        double change = 0.0;
        for (int i = 0; i < n; ++i) {
            Cell s = map.cell_at(i);
            if (!map.free(s) || s == rf.goal) continue;
            double best = -std::numeric_limits<double>::infinity();
            for (Action a : all_actions()) {
                auto t = transition(map, s, a);
                if (!t) continue;
                double nq = backup(s, a, *t);
                change = std::max(change, std::abs(nq - q(i, static_cast<int>(a))));
                q(i, static_cast<int>(a)) = nq;
                best = std::max(best, nq);
            }
            v[i] = best;
        }
        ++sweeps;
        if (change < cfg.tolerance) {
            residual = bellman_residual();
            if (residual <= cfg.tolerance) break;
        }
    }
    if (residual > cfg.tolerance)
        throw SolverError("value iteration for goal " + std::to_string(reward_index) +
                          " did not converge in " + std::to_string(cfg.max_sweeps) +
                          " sweeps (residual " + std::to_string(residual) + ")");

    return QTable(reward_index, rf.goal, mdp.gamma, residual, std::move(q),
                  map.width());
}

Action greedy_action(const QTable& q, const GridMap& map, Cell s) {
    Action best = Action::N;
    double best_q = -std::numeric_limits<double>::infinity();
    for (Action a : available_actions(map, s)) {
        double val = q.q(s, a);
        if (val > best_q) {
            best_q = val;
            best = a;
        }
    }
    return best;
}

std::vector<QTable> train_all(const Mdp& mdp, const SolverConfig& cfg) {
    std::vector<QTable> tables;
    tables.reserve(mdp.rewards.size());
    for (std::size_t i = 0; i < mdp.rewards.size(); ++i)
        tables.push_back(value_iteration(mdp, i, cfg));
    return tables;
}

void save_qtable(const QTable& q, const GridMap& map, double tolerance,
                 const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SolverError("cannot write q-table cache: " + path);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(map.hash()));
    out << "map_hash=" << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", q.gamma());
    out << "gamma=" << buf << "\n";
    out << "reward_index=" << q.reward_index() << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", tolerance);
    out << "tolerance=" << buf << "\n";
    for (int i = 0; i < map.num_cells(); ++i) {
        Cell s = map.cell_at(i);
        for (Action a : all_actions()) {
            double val = q.q(s, a);
            if (std::isnan(val)) continue;
            std::snprintf(buf, sizeof buf, "%.17g", val);
            out << s.x << "," << s.y << "," << action_name(a) << "," << buf << "\n";
        }
    }
}

QTable load_qtable(const std::string& path, const GridMap& map, double gamma,
                   std::size_t reward_index) {
    std::ifstream in(path);
    if (!in) throw SolverError("cannot open q-table cache: " + path);
    auto expect_header = [&](const std::string& key) {
        std::string line;
        if (!std::getline(in, line) || line.rfind(key + "=", 0) != 0)
            throw SolverError("malformed q-table cache header in " + path);
        return line.substr(key.size() + 1);
    };
    char buf[64];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(map.hash()));
    if (expect_header("map_hash") != buf)
        throw SolverError("q-table cache map_hash mismatch: " + path);
    if (std::stod(expect_header("gamma")) != gamma)
        throw SolverError("q-table cache gamma mismatch: " + path);
    if (std::stoull(expect_header("reward_index")) != reward_index)
        throw SolverError("q-table cache reward_index mismatch: " + path);
    double tolerance = std::stod(expect_header("tolerance"));

    Eigen::MatrixXd q =
        Eigen::MatrixXd::Constant(map.num_cells(), kNumActions, kNaN);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string fx, fy, fa, fq;
        if (!std::getline(row, fx, ',') || !std::getline(row, fy, ',') ||
            !std::getline(row, fa, ',') || !std::getline(row, fq))
            throw SolverError("malformed q-table cache row: " + line);
        auto a = action_from_name(fa);
        if (!a) throw SolverError("unknown action in q-table cache: " + fa);
        Cell s{std::stoi(fx), std::stoi(fy)};
        if (!map.free(s)) throw SolverError("q-table cache cell not on map");
        q(map.index(s), static_cast<int>(*a)) = std::stod(fq);
    }
    Cell goal = map.goals().at(reward_index);
    return QTable(reward_index, goal, gamma, tolerance, std::move(q), map.width());
}

}  // namespace dmdp
