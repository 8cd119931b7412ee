#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dmdp/harness.hpp"

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dmdp::HarnessError("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw dmdp::HarnessError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deceptive grid-world MDP simulator"};
    app.require_subcommand(1);

    std::string scenario_path, sweep_path, out_path, svg_path, trace_path;
    std::string map_path, layout_path;
    unsigned workers = 1;

    auto* train = app.add_subcommand("train", "Train Q-tables into the cache");
    train->add_option("scenario", scenario_path, "Scenario file")->required();

    auto* run = app.add_subcommand("run", "Run one scenario, print its CSV row");
    run->add_option("scenario", scenario_path, "Scenario file")->required();
    run->add_option("--svg", svg_path, "Write a trajectory rendering");
    run->add_option("--trace", trace_path, "Write the per-step trace CSV");

    auto* batch = app.add_subcommand("batch", "Run a sweep of maps x agents");
    batch->add_option("sweep", sweep_path, "Sweep file")->required();
    batch->add_option("-o,--output", out_path, "Results CSV")->required();
    batch->add_option("--workers", workers, "Concurrent scenario workers");

    auto* gen = app.add_subcommand("gen-map", "Generate a map from a layout spec");
    gen->add_option("layout", layout_path, "Layout spec file")->required();
    gen->add_option("-o,--output", out_path, "Map text file")->required();

    auto* render = app.add_subcommand("render", "Render a map and trace to SVG");
    render->add_option("map", map_path, "Map text file")->required();
    render->add_option("trace", trace_path, "Trace CSV from `run --trace`")->required();
    render->add_option("-o,--output", out_path, "SVG file")->required();
    int render_true_goal = 0;
    render->add_option("--true-goal", render_true_goal, "Goal digit drawn as true");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) {
            dmdp::train_scenario(dmdp::load_scenario(scenario_path));
        } else if (run->parsed()) {
            dmdp::Scenario sc = dmdp::load_scenario(scenario_path);
            dmdp::ScenarioResult result = dmdp::run_scenario(sc);
            std::cout << dmdp::csv_header(sc.checkpoints)
                      << dmdp::csv_row(sc, result);
            if (!svg_path.empty())
                write_file(svg_path,
                           dmdp::render_svg(result.mdp.map, result.trace,
                                            result.snapshots, result.mdp.true_index));
            if (!trace_path.empty())
                write_file(trace_path, dmdp::trace_csv(result.trace, result.snapshots));
        } else if (batch->parsed()) {
            write_file(out_path, dmdp::run_batch(dmdp::load_sweep(sweep_path), workers));
        } else if (gen->parsed()) {
            dmdp::GridMap map =
                dmdp::generate_layout(dmdp::load_layout_spec(layout_path));
            write_file(out_path, map.to_text());
        } else if (render->parsed()) {
            dmdp::GridMap map = dmdp::load_map(map_path);
            dmdp::ObservationSequence trace =
                dmdp::parse_trace_csv(read_file(trace_path));
            trace.validate(map);
            write_file(out_path,
                       dmdp::render_svg(map, trace, {},
                                        static_cast<std::size_t>(render_true_goal)));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
