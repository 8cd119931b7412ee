#include "dmdp/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace dmdp {

namespace {

std::string trim(std::string s) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
}

void parse_kv_lines(const std::string& text,
                    const std::function<void(const std::string&, const std::string&)>& on_pair) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw HarnessError("config line missing '=': " + line);
        on_pair(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

std::vector<double> parse_double_list(const std::string& value) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(std::stod(trim(item)));
    return out;
}

std::string fmt(double v, const char* spec = "%.9g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string agent_key(const PolicyConfig& cfg) {
    if (cfg.kind == PolicyConfig::Kind::irrationality)
        return "ir" + fmt(cfg.alpha, "%g");
    return policy_kind_name(cfg.kind);
}

std::string map_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

bool scenario_key(Scenario& sc, const std::string& key, const std::string& value) {
    if (key == "map") sc.map_path = value;
    else if (key == "true_goal") sc.true_goal = std::stoi(value);
    else if (key == "agent") {
        PolicyConfig parsed = parse_agent(value);
        sc.policy.kind = parsed.kind;
        if (parsed.kind == PolicyConfig::Kind::irrationality)
            sc.policy.alpha = parsed.alpha;
    } else if (key == "alpha") sc.policy.alpha = std::stod(value);
    else if (key == "delta") sc.policy.delta = std::stod(value);
    else if (key == "kappa") sc.policy.kappa = std::stod(value);
    else if (key == "min_active") sc.policy.min_active = std::stoull(value);
    else if (key == "step_cap") sc.policy.step_cap = std::stoull(value);
    else if (key == "boltzmann_beta") sc.policy.boltzmann_beta = std::stod(value);
    else if (key == "gamma") sc.gamma = std::stod(value);
    else if (key == "goal_reward") sc.goal_reward = std::stod(value);
    else if (key == "seed") sc.seed = std::stoull(value);
    else if (key == "tolerance") sc.tolerance = std::stod(value);
    else if (key == "prior") {
        if (value != "uniform") sc.prior_weights = parse_double_list(value);
    } else if (key == "checkpoints") sc.checkpoints = parse_double_list(value);
    else return false;
    return true;
}

void validate_scenario(const Scenario& sc) {
    for (std::size_t i = 0; i < sc.checkpoints.size(); ++i) {
        double f = sc.checkpoints[i];
        if (f <= 0 || f >= 1 || (i > 0 && f <= sc.checkpoints[i - 1]))
            throw HarnessError("checkpoints must be strictly increasing in (0,1)");
    }
}

}  // namespace

PolicyConfig parse_agent(const std::string& text) {
    PolicyConfig cfg;
    std::string name = text;
    auto colon = text.find(':');
    if (colon != std::string::npos) {
        name = text.substr(0, colon);
        cfg.alpha = std::stod(text.substr(colon + 1));
    }
    if (name == "honest") cfg.kind = PolicyConfig::Kind::honest;
    else if (name == "ambiguity") cfg.kind = PolicyConfig::Kind::ambiguity;
    else if (name == "irrationality" || name == "ir")
        cfg.kind = PolicyConfig::Kind::irrationality;
    else throw HarnessError("unknown agent: " + text);
    return cfg;
}

Scenario parse_scenario(const std::string& text) {
    Scenario sc;
    parse_kv_lines(text, [&](const std::string& key, const std::string& value) {
        if (!scenario_key(sc, key, value))
            throw HarnessError("unknown scenario key: " + key);
    });
    if (sc.map_path.empty()) throw HarnessError("scenario missing 'map'");
    validate_scenario(sc);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw HarnessError("cannot open scenario: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    Scenario sc = parse_scenario(buf.str());
    // map paths are relative to the scenario file
    auto dir = std::filesystem::path(path).parent_path();
    if (!dir.empty() && std::filesystem::path(sc.map_path).is_relative())
        sc.map_path = (dir / sc.map_path).string();
    return sc;
}

SweepSpec parse_sweep(const std::string& text) {
    SweepSpec sweep;
    parse_kv_lines(text, [&](const std::string& key, const std::string& value) {
        if (key == "map") sweep.maps.push_back(value);
        else if (key == "agent") sweep.agents.push_back(parse_agent(value));
        else if (!scenario_key(sweep.base, key, value))
            throw HarnessError("unknown sweep key: " + key);
    });
    if (sweep.maps.empty()) throw HarnessError("sweep lists no maps");
    if (sweep.agents.empty()) throw HarnessError("sweep lists no agents");
    validate_scenario(sweep.base);
    return sweep;
}

SweepSpec load_sweep(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw HarnessError("cannot open sweep file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    SweepSpec sweep = parse_sweep(buf.str());
    auto dir = std::filesystem::path(path).parent_path();
    if (!dir.empty()) {
        for (auto& m : sweep.maps)
            if (std::filesystem::path(m).is_relative()) m = (dir / m).string();
    }
    return sweep;
}

std::string cache_dir() {
    if (const char* env = std::getenv("DECEPTIVE_MDP_CACHE")) return env;
    return ".dmdp-cache";
}

namespace {

std::string cache_path(const GridMap& map, double gamma, std::size_t index) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "q_%016llx_g%.17g_r%zu.csv",
                  static_cast<unsigned long long>(map.hash()), gamma, index);
    return (std::filesystem::path(cache_dir()) / buf).string();
}

std::vector<QTable> obtain_qtables(const Mdp& mdp, double tolerance) {
    SolverConfig cfg;
    cfg.tolerance = tolerance;
    std::filesystem::create_directories(cache_dir());
    std::vector<QTable> tables;
    for (std::size_t i = 0; i < mdp.rewards.size(); ++i) {
        std::string path = cache_path(mdp.map, mdp.gamma, i);
        if (std::filesystem::exists(path)) {
            tables.push_back(load_qtable(path, mdp.map, mdp.gamma, i));
        } else {
            tables.push_back(value_iteration(mdp, i, cfg));
            save_qtable(tables.back(), mdp.map, tolerance, path);
        }
    }
    return tables;
}

}  // namespace

void train_scenario(const Scenario& sc) {
    GridMap map = load_map(sc.map_path);
    if (sc.true_goal < 0 || static_cast<std::size_t>(sc.true_goal) >= map.num_goals())
        throw HarnessError("true_goal not on map: " + std::to_string(sc.true_goal));
    Mdp mdp = make_mdp(std::move(map), static_cast<std::size_t>(sc.true_goal),
                       sc.gamma, sc.goal_reward);
    obtain_qtables(mdp, sc.tolerance);
}

ScenarioResult run_scenario(const Scenario& sc) {
    GridMap map = load_map(sc.map_path);
    if (map.num_goals() < 2) throw HarnessError("scenario map needs >= 2 goals");
    if (sc.true_goal < 0 || static_cast<std::size_t>(sc.true_goal) >= map.num_goals())
        throw HarnessError("true_goal not on map: " + std::to_string(sc.true_goal));
    Mdp mdp = make_mdp(std::move(map), static_cast<std::size_t>(sc.true_goal),
                       sc.gamma, sc.goal_reward);
    std::vector<QTable> qtables = obtain_qtables(mdp, sc.tolerance);

    PriorDistribution prior =
        sc.prior_weights.empty()
            ? PriorDistribution::uniform(qtables.size())
            : PriorDistribution::explicit_weights(Eigen::Map<const Eigen::VectorXd>(
                  sc.prior_weights.data(),
                  static_cast<Eigen::Index>(sc.prior_weights.size())));

    EpisodeResult episode = run_episode(mdp, qtables, prior, sc.policy);
    std::vector<PosteriorSnapshot> snapshots = posterior_stream(
        qtables, mdp.map, prior, episode.trace, sc.policy.boltzmann_beta);

    // optimal cost from the greedy trace; greedy on exact Q is optimal
    ObservationSequence honest_trace;
    {
        Cell s = mdp.map.start();
        const QTable& q_true = qtables[mdp.true_index];
        while (s != mdp.true_goal()) {
            Action a = greedy_action(q_true, mdp.map, s);
            honest_trace.push(s, a);
            s = *transition(mdp.map, s, a);
        }
    }

    ScenarioResult result{EpisodeMetrics{}, std::move(episode.trace),
                          std::move(snapshots), std::move(mdp)};
    EpisodeMetrics& m = result.metrics;
    m.truncated = episode.truncated;
    m.path_cost = result.trace.path_cost();
    m.optimal_cost = honest_trace.path_cost();
    m.cost_ratio = m.path_cost / m.optimal_cost;
    m.simulation_value = simulation_value(result.snapshots, result.mdp.true_index);
    m.ldp_index = last_deceptive_point(result.snapshots, result.mdp.true_index);
    m.non_deceptive_fraction =
        non_deceptive_fraction(result.snapshots, result.mdp.true_index);
    m.checkpoint_posteriors =
        checkpoint_posteriors(result.snapshots, result.mdp.true_index, sc.checkpoints);
    return result;
}

std::string csv_header(const std::vector<double>& checkpoints) {
    std::string out =
        "run_id,map,agent,alpha,delta,gamma,seed,truncated,path_cost,"
        "optimal_cost,cost_ratio,simulation,ldp_index,non_deceptive_fraction";
    for (double f : checkpoints)
        out += ",cp_" + std::to_string(static_cast<int>(std::lround(f * 100)));
    return out + "\n";
}

std::string csv_row(const Scenario& sc, const ScenarioResult& result) {
    const EpisodeMetrics& m = result.metrics;
    std::ostringstream out;
    out << map_stem(sc.map_path) << "__" << agent_key(sc.policy) << "__s" << sc.seed
        << ',' << sc.map_path << ',' << policy_kind_name(sc.policy.kind) << ','
        << fmt(sc.policy.alpha, "%g") << ',' << fmt(sc.policy.delta, "%g") << ','
        << fmt(sc.gamma, "%g") << ',' << sc.seed << ',' << (m.truncated ? 1 : 0)
        << ',' << fmt(m.path_cost) << ',' << fmt(m.optimal_cost) << ','
        << fmt(m.cost_ratio) << ',' << fmt(m.simulation_value) << ',' << m.ldp_index
        << ',' << fmt(m.non_deceptive_fraction);
    for (const auto& [f, p] : m.checkpoint_posteriors) out << ',' << fmt(p, "%.6f");
    out << '\n';
    return out.str();
}

std::string run_batch(const SweepSpec& sweep, unsigned workers) {
    std::string out = csv_header(sweep.base.checkpoints);

    std::vector<Scenario> cells;
    for (const std::string& map : sweep.maps) {
        for (const PolicyConfig& agent : sweep.agents) {
            Scenario sc = sweep.base;
            sc.map_path = map;
            sc.policy.kind = agent.kind;
            if (agent.kind == PolicyConfig::Kind::irrationality)
                sc.policy.alpha = agent.alpha;
            cells.push_back(std::move(sc));
        }
    }

    struct CellOutcome {
        std::string row;
        std::vector<double> columns;  // empty on failure
    };
    auto run_cell = [](const Scenario& sc) {
        CellOutcome outcome;
        try {
            ScenarioResult result = run_scenario(sc);
            outcome.row = csv_row(sc, result);
            const EpisodeMetrics& m = result.metrics;
            outcome.columns = {m.path_cost,
                               m.optimal_cost,
                               m.cost_ratio,
                               m.simulation_value,
                               static_cast<double>(m.ldp_index),
                               m.non_deceptive_fraction};
            for (const auto& [f, p] : m.checkpoint_posteriors)
                outcome.columns.push_back(p);
        } catch (const std::exception& e) {
            std::string msg = e.what();
            for (char& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            outcome.row = map_stem(sc.map_path) + "__" + agent_key(sc.policy) +
                          "__s" + std::to_string(sc.seed) + "," + sc.map_path +
                          ",error,,,,,," + msg + "\n";
        }
        return outcome;
    };

    std::vector<CellOutcome> outcomes(cells.size());
    if (workers <= 1) {
        for (std::size_t k = 0; k < cells.size(); ++k) outcomes[k] = run_cell(cells[k]);
    } else {
        // warm the shared q-table cache first so parallel cells only read it
        for (const std::string& map : sweep.maps) {
            Scenario sc = sweep.base;
            sc.map_path = map;
            try {
                train_scenario(sc);
            } catch (const std::exception&) {
                // the per-cell run reports the failure as an error row
            }
        }
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t k = next++; k < cells.size(); k = next++)
                outcomes[k] = run_cell(cells[k]);
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // per-agent column samples: path_cost, optimal_cost, cost_ratio,
    // simulation, ldp, ndf, then one per checkpoint
    const std::size_t n_cols = 6 + sweep.base.checkpoints.size();
    std::vector<std::vector<std::vector<double>>> samples(
        sweep.agents.size(), std::vector<std::vector<double>>(n_cols));
    for (std::size_t k = 0; k < cells.size(); ++k) {
        out += outcomes[k].row;
        if (outcomes[k].columns.empty()) continue;
        std::size_t ai = k % sweep.agents.size();
        for (std::size_t c = 0; c < n_cols; ++c)
            samples[ai][c].push_back(outcomes[k].columns[c]);
    }

    auto mean_of = [](const std::vector<double>& xs) {
        double s = 0;
        for (double x : xs) s += x;
        return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
    };
    auto sd_of = [&](const std::vector<double>& xs) {
        if (xs.size() < 2) return 0.0;
        double mu = mean_of(xs), s = 0;
        for (double x : xs) s += (x - mu) * (x - mu);
        return std::sqrt(s / static_cast<double>(xs.size() - 1));
    };
    for (std::size_t ai = 0; ai < sweep.agents.size(); ++ai) {
        const PolicyConfig& agent = sweep.agents[ai];
        const std::string key = agent_key(agent);
        for (const char* stat : {"mean", "sd"}) {
            const bool is_mean = stat[0] == 'm';
            out += std::string("summary_") + stat + "__" + key + ",summary," +
                   policy_kind_name(agent.kind) + "," + fmt(agent.alpha, "%g") +
                   "," + fmt(sweep.base.policy.delta, "%g") + "," +
                   fmt(sweep.base.gamma, "%g") + "," +
                   std::to_string(sweep.base.seed) + ",0";
            for (std::size_t c = 0; c < n_cols; ++c)
                out += "," + fmt(is_mean ? mean_of(samples[ai][c])
                                         : sd_of(samples[ai][c]));
            out += "\n";
        }
    }
    return out;
}

std::string render_svg(const GridMap& map, const ObservationSequence& trace,
                       const std::vector<PosteriorSnapshot>& snapshots,
                       std::size_t true_index) {
    constexpr int kCell = 12;
    const int w = map.width() * kCell, h = map.height() * kCell;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
    if (!snapshots.empty()) {
        out << "<title>true-goal posterior "
            << fmt(snapshots.back().probabilities[static_cast<Eigen::Index>(true_index)],
                   "%.4f")
            << " after " << snapshots.size() << " steps</title>\n";
    }
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            if (map.blocked({x, y}))
                out << "<rect x=\"" << x * kCell << "\" y=\"" << y * kCell
                    << "\" width=\"" << kCell << "\" height=\"" << kCell
                    << "\" fill=\"#333333\"/>\n";
        }
    }
    auto cell_rect = [&](Cell c, const char* fill) {
        out << "<rect x=\"" << c.x * kCell << "\" y=\"" << c.y * kCell
            << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\""
            << fill << "\"/>\n";
    };
    for (std::size_t i = 0; i < map.num_goals(); ++i)
        cell_rect(map.goals()[i], i == true_index ? "#e69500" : "#cc2222");
    cell_rect(map.start(), "#22aa22");
    if (!trace.empty()) {
        out << "<polyline fill=\"none\" stroke=\"#2255cc\" stroke-width=\"2\" points=\"";
        auto center = [&](Cell c) {
            out << c.x * kCell + kCell / 2 << ',' << c.y * kCell + kCell / 2;
        };
        for (std::size_t k = 0; k < trace.size(); ++k) {
            center(trace.pairs[k].state);
            out << ' ';
        }
        Cell last = *transition(map, trace.back().state, trace.back().action);
        center(last);
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string trace_csv(const ObservationSequence& trace,
                      const std::vector<PosteriorSnapshot>& snapshots) {
    if (trace.size() != snapshots.size())
        throw HarnessError("trace and snapshot stream lengths differ");
    std::ostringstream out;
    out << "step,x,y,action";
    if (!snapshots.empty())
        for (Eigen::Index i = 0; i < snapshots.front().probabilities.size(); ++i)
            out << ",p_" << i;
    out << '\n';
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << (k + 1) << ',' << trace.pairs[k].state.x << ','
            << trace.pairs[k].state.y << ',' << action_name(trace.pairs[k].action);
        for (Eigen::Index i = 0; i < snapshots[k].probabilities.size(); ++i)
            out << ',' << fmt(snapshots[k].probabilities[i], "%.9f");
        out << '\n';
    }
    return out.str();
}

ObservationSequence parse_trace_csv(const std::string& text) {
    ObservationSequence obs;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("step,x,y,action", 0) != 0)
        throw HarnessError("trace CSV missing header");
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::istringstream row(line);
        std::string step, x, y, action;
        if (!std::getline(row, step, ',') || !std::getline(row, x, ',') ||
            !std::getline(row, y, ',') || !std::getline(row, action, ','))
            throw HarnessError("malformed trace CSV row: " + line);
        auto a = action_from_name(trim(action));
        if (!a) throw HarnessError("unknown action in trace CSV: " + action);
        obs.push({std::stoi(x), std::stoi(y)}, *a);
    }
    return obs;
}

}  // namespace dmdp
