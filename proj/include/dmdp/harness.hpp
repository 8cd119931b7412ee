#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dmdp/layout.hpp"
#include "dmdp/metrics.hpp"
#include "dmdp/policies.hpp"

namespace dmdp {

class HarnessError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One experiment cell: a map, the true goal, one agent, observer settings.
struct Scenario {
    std::string map_path;
    int true_goal = 0;
    PolicyConfig policy;
    double gamma = 1.0;
    double goal_reward = 10000.0;
    std::vector<double> prior_weights;  // empty = uniform
    std::uint64_t seed = 0;
    std::vector<double> checkpoints = default_checkpoints();
    double tolerance = 1e-6;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Parses an agent spec string: "honest", "ambiguity",
/// "irrationality:<alpha>".
PolicyConfig parse_agent(const std::string& text);

/// A batch: the cross product of maps and agents under shared settings.
struct SweepSpec {
    std::vector<std::string> maps;
    std::vector<PolicyConfig> agents;
    Scenario base;  // shared settings (map_path/policy ignored)
};

SweepSpec parse_sweep(const std::string& text);
SweepSpec load_sweep(const std::string& path);

/// Cache directory: DECEPTIVE_MDP_CACHE env var, else ".dmdp-cache".
std::string cache_dir();

/// Trains all Q-tables for the scenario's map, writing them to the cache.
void train_scenario(const Scenario& sc);

struct ScenarioResult {
    EpisodeMetrics metrics;
    ObservationSequence trace;
    std::vector<PosteriorSnapshot> snapshots;
    Mdp mdp;
};

/// Trains (or loads cached) Q-tables, runs one episode and computes metrics.
ScenarioResult run_scenario(const Scenario& sc);

/// CSV header, fixed schema (checkpoint columns follow sc.checkpoints).
std::string csv_header(const std::vector<double>& checkpoints);

/// One data row for a finished scenario.
std::string csv_row(const Scenario& sc, const ScenarioResult& result);

/// Runs every (map, agent) cell, appends per-agent mean/SD summary rows.
/// Failures become error rows; the batch continues. With workers > 1 the
/// cells run concurrently; output ordering is independent of worker count.
std::string run_batch(const SweepSpec& sweep, unsigned workers = 1);

/// Deterministic SVG rendering of a map and trace: blocked cells dark,
/// start green, bogus goals red, true goal orange, path as a polyline.
std::string render_svg(const GridMap& map, const ObservationSequence& trace,
                       const std::vector<PosteriorSnapshot>& snapshots,
                       std::size_t true_index);

/// Per-step trace CSV: step,x,y,action then one posterior column per reward.
std::string trace_csv(const ObservationSequence& trace,
                      const std::vector<PosteriorSnapshot>& snapshots);

/// Reads a trace CSV back (posterior columns ignored).
ObservationSequence parse_trace_csv(const std::string& text);

}  // namespace dmdp
