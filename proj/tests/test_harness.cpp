#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "dmdp/harness.hpp"

using namespace dmdp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("dmdp_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()));
        fs::create_directories(path);
        setenv("DECEPTIVE_MDP_CACHE", (path / "cache").c_str(), 1);
    }
    ~TempDir() {
        unsetenv("DECEPTIVE_MDP_CACHE");
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int counter() {
        static int n = 0;
        return n++;
    }
    fs::path file(const std::string& name, const std::string& content) const {
        fs::path p = path / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }
};

const char* kMapText =
    "S....\n"
    ".....\n"
    ".....\n"
    ".....\n"
    "0...1\n";

}  // namespace

TEST_CASE("layout families generate valid deterministic maps") {
    for (auto family : {LayoutFamily::empty, LayoutFamily::large_obstacles,
                        LayoutFamily::random_dense, LayoutFamily::archipelago,
                        LayoutFamily::rooms_corridors}) {
        LayoutSpec spec;
        spec.family = family;
        spec.width = 21;
        spec.height = 21;
        spec.n_goals = 3;
        spec.seed = 42;
        GridMap a = generate_layout(spec);
        GridMap b = generate_layout(spec);
        CHECK(a.to_text() == b.to_text());  // byte-identical per seed
        CHECK(a.num_goals() == 3);
        if (family == LayoutFamily::empty) {
            for (int i = 0; i < a.num_cells(); ++i) CHECK_FALSE(a.blocked(a.cell_at(i)));
        }
    }
}

TEST_CASE("random-dense density lands near the requested value") {
    // measured over raw draws; connectivity repair only raises the count
    LayoutSpec spec;
    spec.family = LayoutFamily::random_dense;
    spec.width = 49;
    spec.height = 49;
    spec.obstacle_density = 0.25;
    spec.n_goals = 2;
    int blocked_total = 0, cells = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        spec.seed = seed;
        GridMap map = generate_layout(spec);
        for (int i = 0; i < map.num_cells(); ++i)
            blocked_total += map.blocked(map.cell_at(i)) ? 1 : 0;
        cells += map.num_cells();
    }
    double fraction = static_cast<double>(blocked_total) / cells;
    CHECK(fraction > 0.15);
    CHECK(fraction < 0.45);
}

TEST_CASE("generated goals are reachable from the start") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        LayoutSpec spec;
        spec.family = LayoutFamily::rooms_corridors;
        spec.width = 25;
        spec.height = 25;
        spec.n_goals = 3;
        spec.seed = seed;
        GridMap map = generate_layout(spec);
        Mdp mdp = make_mdp(std::move(map), 0);
        CHECK_NOTHROW(train_all(mdp));  // throws on unreachable goal
    }
}

TEST_CASE("scenario parsing") {
    Scenario sc = parse_scenario(
        "map = m.txt\n"
        "true_goal = 1\n"
        "agent = irrationality:0.4\n"
        "gamma = 0.99\n"
        "seed = 7\n"
        "delta = -0.5\n"
        "prior = 0.6,0.4\n"
        "# comment line\n"
        "checkpoints = 0.25,0.5,0.75\n");
    CHECK(sc.map_path == "m.txt");
    CHECK(sc.true_goal == 1);
    CHECK(sc.policy.kind == PolicyConfig::Kind::irrationality);
    CHECK(sc.policy.alpha == doctest::Approx(0.4));
    CHECK(sc.policy.delta == doctest::Approx(-0.5));
    CHECK(sc.gamma == doctest::Approx(0.99));
    CHECK(sc.seed == 7);
    CHECK(sc.prior_weights == std::vector<double>{0.6, 0.4});
    CHECK(sc.checkpoints == std::vector<double>{0.25, 0.5, 0.75});

    CHECK_THROWS_AS(parse_scenario("agent = honest\n"), HarnessError);  // no map
    CHECK_THROWS_AS(parse_scenario("map = m\nfoo = 1\n"), HarnessError);
    CHECK_THROWS_AS(parse_scenario("map = m\ncheckpoints = 0.5,0.2\n"), HarnessError);
}

TEST_CASE("scenario run produces coherent metrics") {
    TempDir tmp;
    auto map_path = tmp.file("m.txt", kMapText);
    Scenario sc;
    sc.map_path = map_path.string();
    sc.true_goal = 0;
    sc.policy.kind = PolicyConfig::Kind::honest;

    ScenarioResult result = run_scenario(sc);
    CHECK(result.metrics.cost_ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(result.metrics.path_cost == doctest::Approx(4.0));  // straight south
    CHECK_FALSE(result.metrics.truncated);
    CHECK(result.metrics.checkpoint_posteriors.size() == 9);
    CHECK(result.snapshots.size() == result.trace.size());

    // the q-table cache was populated and is reused
    CHECK(fs::exists(tmp.path / "cache"));
    ScenarioResult again = run_scenario(sc);
    CHECK(csv_row(sc, again) == csv_row(sc, result));
}

TEST_CASE("csv schema") {
    CHECK(csv_header(default_checkpoints()) ==
          "run_id,map,agent,alpha,delta,gamma,seed,truncated,path_cost,"
          "optimal_cost,cost_ratio,simulation,ldp_index,non_deceptive_fraction,"
          "cp_10,cp_20,cp_30,cp_40,cp_50,cp_60,cp_70,cp_80,cp_90\n");
}

TEST_CASE("batch rows, summaries, and error rows") {
    TempDir tmp;
    auto map_path = tmp.file("m.txt", kMapText);
    SweepSpec sweep;
    sweep.maps = {map_path.string(), (tmp.path / "missing.txt").string()};
    sweep.agents = {parse_agent("honest"), parse_agent("ambiguity"),
                    parse_agent("irrationality:0.3"), parse_agent("irrationality:0.5")};

    std::string csv = run_batch(sweep);
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    // header + 2 maps x 4 agents + 2 summary rows per agent
    CHECK(lines == 1 + 8 + 8);
    CHECK(csv.find(",error,") != std::string::npos);
    CHECK(csv.find("summary_mean__honest") != std::string::npos);
    CHECK(csv.find("summary_sd__ir0.5") != std::string::npos);

    // deterministic, and independent of worker count
    CHECK(run_batch(sweep) == csv);
    CHECK(run_batch(sweep, 4) == csv);
}

TEST_CASE("sweep file parsing resolves relative maps") {
    TempDir tmp;
    tmp.file("a.txt", kMapText);
    auto sweep_path = tmp.file("sweep.txt",
                               "map = a.txt\n"
                               "agent = honest\n"
                               "agent = ambiguity\n"
                               "seed = 3\n");
    SweepSpec sweep = load_sweep(sweep_path.string());
    REQUIRE(sweep.maps.size() == 1);
    CHECK(fs::path(sweep.maps[0]).is_absolute());
    CHECK(sweep.agents.size() == 2);
    CHECK(sweep.base.seed == 3);
}

TEST_CASE("svg rendering") {
    GridMap map = parse_map(kMapText);
    ObservationSequence trace;
    trace.push({0, 0}, Action::S);
    trace.push({0, 1}, Action::S);

    std::string svg = render_svg(map, trace, {}, 0);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("#22aa22") != std::string::npos);  // start
    CHECK(svg.find("#e69500") != std::string::npos);  // true goal
    CHECK(svg.find("#cc2222") != std::string::npos);  // bogus goal
    CHECK(render_svg(map, trace, {}, 0) == svg);      // deterministic

    std::string empty_svg = render_svg(map, {}, {}, 0);
    CHECK(empty_svg.find("polyline") == std::string::npos);

    // polyline has steps + 1 points
    auto points = svg.find("points=\"");
    auto end = svg.find('"', points + 8);
    std::string pts = svg.substr(points + 8, end - points - 8);
    CHECK(std::count(pts.begin(), pts.end(), ',') == 3);
}

TEST_CASE("trace csv round-trips") {
    GridMap map = parse_map(kMapText);
    ObservationSequence trace;
    trace.push({0, 0}, Action::SE);
    trace.push({1, 1}, Action::S);

    Mdp mdp = make_mdp(map, 0);
    auto tables = train_all(mdp);
    auto prior = PriorDistribution::uniform(2);
    auto snapshots = posterior_stream(tables, map, prior, trace);

    std::string csv = trace_csv(trace, snapshots);
    ObservationSequence parsed = parse_trace_csv(csv);
    CHECK(parsed.pairs == trace.pairs);
}
