// Acceptance suite: one pass/fail line per criterion, exit 1 on any failure.
// argv[1] is the CLI binary, exercised by the determinism criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "dmdp/harness.hpp"
#include "oracles.hpp"

using namespace dmdp;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool ok,
            const std::string& detail = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << number << ". " << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++g_failures;
}

double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Desk batch: 10 distinct generated maps, 3 goals each, with a fixed true
// goal per map, evaluated at gamma = 0.6 (the discounted regime where the
// q-gain constraint and the delta-pruning rule are active).
constexpr double kDeskGamma = 0.6;

struct DeskCase {
    GridMap map;
    std::size_t true_goal;
};

std::vector<DeskCase> desk_cases() {
    const LayoutFamily families[] = {LayoutFamily::empty, LayoutFamily::large_obstacles,
                                     LayoutFamily::random_dense, LayoutFamily::archipelago,
                                     LayoutFamily::rooms_corridors};
    // (layout index, true goal); specs derive deterministically from the index
    const std::pair<int, std::size_t> picks[] = {
        {17, 2}, {27, 2}, {16, 2}, {11, 2}, {3, 0},
        {14, 2}, {29, 1}, {28, 1}, {9, 1},  {21, 1}};
    std::vector<DeskCase> cases;
    for (auto [k, tg] : picks) {
        LayoutSpec spec;
        spec.family = families[k % 5];
        spec.width = 17 + (k % 3) * 4;
        spec.height = 17 + ((k / 3) % 3) * 4;
        spec.obstacle_density = 0.2;
        spec.n_goals = 3;
        spec.seed = 100 + static_cast<std::uint64_t>(k);
        cases.push_back({generate_layout(spec), tg});
    }
    return cases;
}

struct AgentRun {
    EpisodeResult episode;
    std::vector<PosteriorSnapshot> snapshots;
    double simulation = 0;
    double cost_ratio = 0;
    std::vector<double> checkpoints;
};

AgentRun run_agent(const Mdp& mdp, const std::vector<QTable>& tables,
                   const PolicyConfig& cfg, double optimal_cost) {
    auto prior = PriorDistribution::uniform(tables.size());
    AgentRun run;
    run.episode = run_episode(mdp, tables, prior, cfg);
    run.snapshots = posterior_stream(tables, mdp.map, prior, run.episode.trace);
    run.simulation = simulation_value(run.snapshots, mdp.true_index);
    run.cost_ratio = run.episode.trace.path_cost() / optimal_cost;
    for (auto [f, p] :
         checkpoint_posteriors(run.snapshots, mdp.true_index, default_checkpoints()))
        run.checkpoints.push_back(p);
    return run;
}

PolicyConfig agent_cfg(PolicyConfig::Kind kind, double alpha = 0.3) {
    PolicyConfig cfg;
    cfg.kind = kind;
    cfg.alpha = alpha;
    return cfg;
}

// ---------------------------------------------------------------------------

void criterion_1_solver_oracle() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    const LayoutFamily families[] = {LayoutFamily::empty, LayoutFamily::large_obstacles,
                                     LayoutFamily::random_dense, LayoutFamily::archipelago,
                                     LayoutFamily::rooms_corridors};
    int checked = 0;
    for (int k = 0; k < 20 && ok; ++k) {
        LayoutSpec spec;
        spec.family = families[k % 5];
        spec.width = 14 + (k % 7);
        spec.height = 14 + (k % 5);
        spec.obstacle_density = 0.2;
        spec.n_goals = 2 + (k % 2);
        spec.seed = 500 + static_cast<std::uint64_t>(k);
        GridMap map = generate_layout(spec);
        Mdp mdp = make_mdp(std::move(map), 0, 1.0);
        for (std::size_t g = 0; g < mdp.rewards.size() && ok; ++g) {
            QTable q = value_iteration(mdp, g);
            auto dist = oracles::octile_dijkstra(mdp.map, mdp.rewards[g].goal);
            for (int i = 0; i < mdp.map.num_cells() && ok; ++i) {
                Cell s = mdp.map.cell_at(i);
                if (!mdp.map.free(s) || s == mdp.rewards[g].goal) continue;
                double want = 10000.0 - dist[i];
                if (std::abs(q.state_value(s) - want) > 1e-6) {
                    ok = false;
                    detail = "mismatch at map " + std::to_string(k);
                }
                ++checked;
            }
        }
    }
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 10.0) {
        ok = false;
        detail = "runtime " + fmt(secs) + "s";
    }
    if (ok) detail = std::to_string(checked) + " cells, " + fmt(secs) + "s";
    report(1, "solver matches the octile-Dijkstra oracle on 20 maps", ok, detail);
}

void criteria_2_to_5_desk_batch() {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<double> sim_honest, sim_amb, sim_ir3, sim_ir5;
    std::vector<double> cr_honest, cr_amb, cr_ir5;
    std::vector<std::vector<double>> cp_honest, cp_amb, cp_ir3, cp_ir5;
    bool honest_nonpositive = true;
    bool honest_optimal = true;

    for (const DeskCase& dc : desk_cases()) {
        Mdp mdp = make_mdp(dc.map, dc.true_goal, kDeskGamma);
        auto tables = train_all(mdp);

        // optimal cost = the greedy walk's cost, the harness' own definition
        PolicyConfig honest_cfg = agent_cfg(PolicyConfig::Kind::honest);
        double optimal =
            run_episode(mdp, tables, PriorDistribution::uniform(tables.size()),
                        honest_cfg)
                .trace.path_cost();
        AgentRun honest = run_agent(mdp, tables, honest_cfg, optimal);
        AgentRun amb =
            run_agent(mdp, tables, agent_cfg(PolicyConfig::Kind::ambiguity), optimal);
        AgentRun ir3 = run_agent(
            mdp, tables, agent_cfg(PolicyConfig::Kind::irrationality, 0.3), optimal);
        AgentRun ir5 = run_agent(
            mdp, tables, agent_cfg(PolicyConfig::Kind::irrationality, 0.5), optimal);

        honest_nonpositive &= honest.simulation <= 1e-9;
        honest_optimal &= std::abs(honest.cost_ratio - 1.0) <= 1e-9;

        sim_honest.push_back(honest.simulation);
        sim_amb.push_back(amb.simulation);
        sim_ir3.push_back(ir3.simulation);
        sim_ir5.push_back(ir5.simulation);
        cr_honest.push_back(honest.cost_ratio);
        cr_amb.push_back(amb.cost_ratio);
        cr_ir5.push_back(ir5.cost_ratio);
        cp_honest.push_back(honest.checkpoints);
        cp_amb.push_back(amb.checkpoints);
        cp_ir3.push_back(ir3.checkpoints);
        cp_ir5.push_back(ir5.checkpoints);
    }
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    report(2, "honest simulation value is non-positive on every desk episode",
           honest_nonpositive, "mean " + fmt(mean(sim_honest)));

    bool c3 = mean(sim_honest) < mean(sim_amb) && mean(sim_honest) < mean(sim_ir3) &&
              mean(sim_ir5) >= mean(sim_amb) - 0.02 && secs < 300.0;
    report(3, "deception ordering honest < ambiguity, honest < IR",
           c3,
           "honest " + fmt(mean(sim_honest)) + ", ambiguity " + fmt(mean(sim_amb)) +
               ", ir0.3 " + fmt(mean(sim_ir3)) + ", ir0.5 " + fmt(mean(sim_ir5)) +
               ", " + fmt(secs) + "s");

    bool c4 = honest_optimal && mean(cr_amb) >= 1.0 && mean(cr_ir5) >= mean(cr_amb);
    report(4, "cost ordering honest = 1 <= ambiguity <= IR(0.5)", c4,
           "ambiguity " + fmt(mean(cr_amb)) + ", ir0.5 " + fmt(mean(cr_ir5)));

    auto cp_mean = [](const std::vector<std::vector<double>>& rows, std::size_t col) {
        std::vector<double> xs;
        for (const auto& row : rows) xs.push_back(row[col]);
        return mean(xs);
    };
    bool c5 = cp_mean(cp_honest, 8) > cp_mean(cp_honest, 0);
    std::string c5_detail = "honest cp10 " + fmt(cp_mean(cp_honest, 0)) + " -> cp90 " +
                            fmt(cp_mean(cp_honest, 8));
    for (std::size_t col = 0; col < 9; ++col) {
        double h = cp_mean(cp_honest, col);
        for (const auto* rows : {&cp_amb, &cp_ir3, &cp_ir5}) {
            if (cp_mean(*rows, col) > h + 0.05) {
                c5 = false;
                c5_detail = "deceptive cp exceeds honest at checkpoint " +
                            std::to_string((col + 1) * 10) + "%";
            }
        }
    }
    report(5, "true-goal posterior rises for honest; deceptive agents stay below",
           c5, c5_detail);
}

void criterion_6_policy_properties() {
    bool ok = true;
    std::string detail;
    auto fail = [&](const std::string& what) {
        ok = false;
        if (detail.empty()) detail = what;
    };

    std::vector<DeskCase> cases = desk_cases();
    cases.erase(cases.begin() + 4, cases.end());
    for (const DeskCase& dc : cases) {
        Mdp mdp = make_mdp(dc.map, dc.true_goal, kDeskGamma);
        auto tables = train_all(mdp);
        auto prior = PriorDistribution::uniform(tables.size());

        // (a) alpha = 0 equals honest
        auto honest = run_episode(mdp, tables, prior, agent_cfg(PolicyConfig::Kind::honest));
        auto ir0 = run_episode(mdp, tables, prior,
                               agent_cfg(PolicyConfig::Kind::irrationality, 0.0));
        if (honest.trace.pairs != ir0.trace.pairs) fail("alpha=0 trace differs from honest");

        // (b) kappa invariance
        ObservationSequence kappa_ref;
        for (double kappa : {0.5, 1.0, 2.0}) {
            PolicyConfig cfg = agent_cfg(PolicyConfig::Kind::ambiguity);
            cfg.kappa = kappa;
            auto trace = run_episode(mdp, tables, prior, cfg).trace;
            if (kappa == 0.5) kappa_ref = trace;
            else if (trace.pairs != kappa_ref.pairs) fail("kappa changed the trace");
        }

        // (c) replay ambiguity: true retained, floor held, candidate soundness
        PolicyConfig amb = agent_cfg(PolicyConfig::Kind::ambiguity);
        PolicyState state = PolicyState::initial(tables.size());
        Cell s = mdp.map.start();
        std::size_t cap = 10 * honest_path_steps(mdp, tables[mdp.true_index]);
        while (s != mdp.true_goal() && state.obs.size() < cap) {
            ObservationSequence before = state.obs;
            Action a = ambiguity_action(mdp, tables, prior, state, s, amb);
            bool in_aplus = q_gain(tables[mdp.true_index], before, s, a) >= 0.0;
            if (!in_aplus) {
                // must be the documented fallback: max true q-gain action
                Action best = available_actions(mdp.map, s).front();
                for (Action cand : available_actions(mdp.map, s))
                    if (tables[mdp.true_index].q(s, cand) > tables[mdp.true_index].q(s, best))
                        best = cand;
                if (a != best) fail("ambiguity action outside A+ and not the fallback");
            }
            if (state.active_set.size() < amb.min_active) fail("active set below floor");
            bool has_true = false;
            for (std::size_t i : state.active_set) has_true |= i == mdp.true_index;
            if (!has_true) fail("true reward pruned");
            s = *transition(mdp.map, s, a);
        }

        // (d) IM bounds on prefixes of every agent's trace
        for (auto kind : {PolicyConfig::Kind::honest, PolicyConfig::Kind::ambiguity,
                          PolicyConfig::Kind::irrationality}) {
            auto episode = run_episode(mdp, tables, prior, agent_cfg(kind, 0.5));
            ObservationSequence prefix;
            // cap prefix length: past ~40 accumulated divergence exp()
            // underflows and IM rounds to exactly 1.0
            std::size_t limit = std::min<std::size_t>(episode.trace.size(), 10);
            for (std::size_t j = 0; j < limit; ++j) {
                prefix.pairs.push_back(episode.trace.pairs[j]);
                double im = irrationality_measure(tables, mdp.map, prefix);
                if (im < 0.0 || im >= 1.0) fail("IM out of [0, 1)");
            }
        }
        ObservationSequence greedy_prefix;
        Cell gs = mdp.map.start();
        for (int k = 0; k < 5 && gs != mdp.true_goal(); ++k) {
            Action a = greedy_action(tables[mdp.true_index], mdp.map, gs);
            greedy_prefix.push(gs, a);
            gs = *transition(mdp.map, gs, a);
            if (irrationality_measure(tables, mdp.map, greedy_prefix) > 1e-12)
                fail("IM nonzero on a greedy prefix");
        }

        // (e) posterior normalization and prior identity
        auto amb_run = run_episode(mdp, tables, prior, agent_cfg(PolicyConfig::Kind::ambiguity));
        for (const auto& snap :
             posterior_stream(tables, mdp.map, prior, amb_run.trace)) {
            if (std::abs(snap.probabilities.sum() - 1.0) > 1e-9)
                fail("posterior does not sum to 1");
        }
        auto empty_snap = posterior(tables, mdp.map, prior, ObservationSequence{});
        if ((empty_snap.probabilities - prior.weights).cwiseAbs().maxCoeff() > 1e-12)
            fail("empty-trace posterior differs from the prior");
    }
    report(6, "policy property suite (alpha-0, kappa, pruning, IM, posteriors)", ok,
           detail);
}

void criterion_7_metrics_oracles() {
    bool ok = true;
    std::string detail;
    std::mt19937_64 rng(1234);
    for (int episode = 0; episode < 100 && ok; ++episode) {
        std::size_t n_rewards = 2 + rng() % 3;
        std::size_t true_index = rng() % n_rewards;
        std::size_t steps = 1 + rng() % 40;
        std::vector<PosteriorSnapshot> stream;
        for (std::size_t j = 0; j < steps; ++j) {
            Eigen::VectorXd p(static_cast<Eigen::Index>(n_rewards));
            double z = 0;
            for (Eigen::Index i = 0; i < p.size(); ++i) {
                p[i] = 1 + static_cast<double>(rng() % 1000);
                z += p[i];
            }
            p /= z;
            PosteriorSnapshot snap;
            snap.step_index = j + 1;
            snap.probabilities = p;
            snap.divergences = Eigen::VectorXd::Zero(p.size());
            stream.push_back(std::move(snap));
        }

        // brute-force recomputation from raw snapshots
        double sim_sum = 0;
        std::size_t ldp = 0, clear = 0;
        std::vector<bool> flags;
        for (std::size_t j = 0; j < steps; ++j) {
            double best_bogus = -1, truth = 0;
            for (std::size_t i = 0; i < n_rewards; ++i) {
                double p = stream[j].probabilities[static_cast<Eigen::Index>(i)];
                if (i == true_index) truth = p;
                else best_bogus = std::max(best_bogus, p);
            }
            sim_sum += best_bogus - truth;
            bool deceptive = truth <= best_bogus;
            flags.push_back(deceptive);
            if (deceptive) ldp = j + 1;
            else ++clear;
        }
        double sim_expected = sim_sum / static_cast<double>(steps);
        double ndf_expected = static_cast<double>(clear) / static_cast<double>(steps);

        if (std::abs(simulation_value(stream, true_index) - sim_expected) > 1e-12)
            ok = false, detail = "simulation_value mismatch";
        if (last_deceptive_point(stream, true_index) != ldp)
            ok = false, detail = "ldp mismatch";
        if (std::abs(non_deceptive_fraction(stream, true_index) - ndf_expected) > 1e-12)
            ok = false, detail = "non_deceptive_fraction mismatch";
        for (std::size_t j = 0; j < steps; ++j) {
            if (deceptive_step(stream[j], true_index) != flags[j])
                ok = false, detail = "deceptive_step mismatch";
        }
    }
    report(7, "metrics match brute-force recomputation on 100 random episodes", ok,
           detail);
}

void criterion_8_cli_determinism(const std::string& cli) {
    bool ok = true;
    std::string detail;
    fs::path dir = fs::temp_directory_path() / "dmdp_acceptance_cli";
    std::error_code ec;
    fs::remove_all(dir, ec);
    fs::create_directories(dir);

    auto shell = [&](const std::string& cmd) {
        int rc = std::system(cmd.c_str());
        if (rc != 0 && ok) {
            ok = false;
            detail = "command failed: " + cmd;
        }
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    auto same = [&](const fs::path& a, const fs::path& b, const std::string& what) {
        if (ok && slurp(a) != slurp(b)) {
            ok = false;
            detail = what + " outputs differ";
        }
    };

    std::ofstream(dir / "layout.txt") << "family = random-dense\nwidth = 15\n"
                                      << "height = 15\nobstacle_density = 0.2\n"
                                      << "n_goals = 3\nseed = 9\n";
    shell(cli + " gen-map " + (dir / "layout.txt").string() + " -o " +
          (dir / "map_a.txt").string());
    shell(cli + " gen-map " + (dir / "layout.txt").string() + " -o " +
          (dir / "map_b.txt").string());
    same(dir / "map_a.txt", dir / "map_b.txt", "gen-map");

    std::ofstream(dir / "scenario.txt")
        << "map = map_a.txt\ntrue_goal = 0\nagent = ambiguity\nseed = 7\n";
    std::ofstream(dir / "sweep.txt")
        << "map = map_a.txt\nagent = honest\nagent = ambiguity\n"
        << "agent = irrationality:0.3\nagent = irrationality:0.5\nseed = 7\n";

    for (char tag : {'a', 'b'}) {
        std::string cache = (dir / (std::string("cache_") + tag)).string();
        std::string env = "DECEPTIVE_MDP_CACHE=" + cache + " ";
        shell(env + cli + " train " + (dir / "scenario.txt").string());
        shell(env + cli + " run " + (dir / "scenario.txt").string() + " --svg " +
              (dir / (std::string("out_") + tag + ".svg")).string() + " --trace " +
              (dir / (std::string("trace_") + tag + ".csv")).string() + " > " +
              (dir / (std::string("row_") + tag + ".csv")).string());
        shell(env + cli + " batch " + (dir / "sweep.txt").string() + " -o " +
              (dir / (std::string("batch_") + tag + ".csv")).string());
    }
    same(dir / "out_a.svg", dir / "out_b.svg", "run --svg");
    same(dir / "trace_a.csv", dir / "trace_b.csv", "run --trace");
    same(dir / "row_a.csv", dir / "row_b.csv", "run stdout");
    same(dir / "batch_a.csv", dir / "batch_b.csv", "batch");

    // cache files byte-identical across reruns
    if (ok) {
        std::vector<fs::path> a_files;
        for (const auto& entry : fs::directory_iterator(dir / "cache_a"))
            a_files.push_back(entry.path());
        if (a_files.empty()) {
            ok = false;
            detail = "cache empty";
        }
        for (const fs::path& fa : a_files) {
            fs::path fb = dir / "cache_b" / fa.filename();
            if (!fs::exists(fb)) {
                ok = false;
                detail = "cache file missing on rerun";
                break;
            }
            same(fa, fb, "cache");
        }
    }

    // render from the trace file is deterministic too
    shell(cli + " render " + (dir / "map_a.txt").string() + " " +
          (dir / "trace_a.csv").string() + " -o " + (dir / "render_a.svg").string());
    shell(cli + " render " + (dir / "map_a.txt").string() + " " +
          (dir / "trace_a.csv").string() + " -o " + (dir / "render_b.svg").string());
    same(dir / "render_a.svg", dir / "render_b.svg", "render");

    fs::remove_all(dir, ec);
    report(8, "CLI reruns are byte-identical (CSV, SVG, cache)", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    criterion_1_solver_oracle();
    criteria_2_to_5_desk_batch();
    criterion_6_policy_properties();
    criterion_7_metrics_oracles();
    if (argc > 1) {
        criterion_8_cli_determinism(argv[1]);
    } else {
        report(8, "CLI reruns are byte-identical (CSV, SVG, cache)", false,
               "CLI binary path not supplied");
    }
    std::cout << (g_failures == 0 ? "all criteria passed\n"
                                  : std::to_string(g_failures) + " criteria failed\n");
    return g_failures == 0 ? 0 : 1;
}
