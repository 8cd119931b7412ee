#include "dmdp/layout.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace dmdp {

namespace {

constexpr std::array<const char*, 5> kFamilyNames = {
    "empty", "large-obstacles", "random-dense", "archipelago", "rooms-corridors"};

// modulo draw; keeps the byte stream identical across standard libraries
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

double draw_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Occupancy {
    int width, height;
    std::vector<char> blocked;

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    char& at(int x, int y) { return blocked[y * width + x]; }
    char at(int x, int y) const { return blocked[y * width + x]; }
};

void add_rect(Occupancy& occ, int x0, int y0, int w, int h) {
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x)
            if (occ.in_bounds(x, y)) occ.at(x, y) = 1;
}

void add_blob(Occupancy& occ, int cx, int cy, double radius) {
    int r = static_cast<int>(std::ceil(radius));
    for (int y = cy - r; y <= cy + r; ++y)
        for (int x = cx - r; x <= cx + r; ++x)
            if (occ.in_bounds(x, y) &&
                std::hypot(x - cx, y - cy) <= radius)
                occ.at(x, y) = 1;
}

void fill_family(Occupancy& occ, const LayoutSpec& spec, std::mt19937_64& rng) {
    const int w = spec.width, h = spec.height;
    switch (spec.family) {
        case LayoutFamily::empty:
            break;
        case LayoutFamily::large_obstacles: {
            int count = 3 + static_cast<int>(draw(rng, 3));
            for (int i = 0; i < count; ++i) {
                int bw = std::max(2, w / 6 + static_cast<int>(draw(rng, std::max(1, w / 6))));
                int bh = std::max(2, h / 6 + static_cast<int>(draw(rng, std::max(1, h / 6))));
                add_rect(occ, static_cast<int>(draw(rng, w)), static_cast<int>(draw(rng, h)),
                         bw, bh);
            }
            break;
        }
        case LayoutFamily::random_dense:
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    if (draw_unit(rng) < spec.obstacle_density) occ.at(x, y) = 1;
            break;
        case LayoutFamily::archipelago: {
            int count = 4 + static_cast<int>(draw(rng, 4));
            double r_base = std::min(w, h) / 8.0;
            for (int i = 0; i < count; ++i) {
                add_blob(occ, static_cast<int>(draw(rng, w)), static_cast<int>(draw(rng, h)),
                         r_base * (0.6 + draw_unit(rng)));
            }
            break;
        }
        case LayoutFamily::rooms_corridors: {
            int pitch = std::max(5, std::min(w, h) / 5);
            // interior walls every `pitch` cells with one door per segment
            for (int x = pitch; x < w - 1; x += pitch) {
                for (int y = 0; y < h; ++y) occ.at(x, y) = 1;
                for (int y0 = 0; y0 < h; y0 += pitch) {
                    int span = std::min(pitch, h - y0);
                    occ.at(x, y0 + static_cast<int>(draw(rng, span))) = 0;
                }
            }
            for (int y = pitch; y < h - 1; y += pitch) {
                for (int x = 0; x < w; ++x) occ.at(x, y) = 1;
                for (int x0 = 0; x0 < w; x0 += pitch) {
                    int span = std::min(pitch, w - x0);
                    occ.at(x0 + static_cast<int>(draw(rng, span)), y) = 0;
                }
            }
            break;
        }
    }
}

// Restrict free space to the largest movement-connected component.
void keep_largest_component(Occupancy& occ) {
    const int w = occ.width, h = occ.height;
    std::vector<int> comp(static_cast<std::size_t>(w) * h, -1);
    int best_comp = -1;
    std::size_t best_size = 0;
    int next = 0;
    auto free_at = [&](int x, int y) {
        return occ.in_bounds(x, y) && !occ.at(x, y);
    };
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            if (occ.at(x0, y0) || comp[y0 * w + x0] >= 0) continue;
            int id = next++;
            std::size_t size = 0;
            std::deque<std::pair<int, int>> frontier{{x0, y0}};
            comp[y0 * w + x0] = id;
            while (!frontier.empty()) {
                auto [x, y] = frontier.front();
                frontier.pop_front();
                ++size;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        int nx = x + dx, ny = y + dy;
                        if (!free_at(nx, ny) || comp[ny * w + nx] >= 0) continue;
                        // same corner-cutting rule as transition()
                        if (dx != 0 && dy != 0 &&
                            (!free_at(x + dx, y) || !free_at(x, y + dy)))
                            continue;
                        comp[ny * w + nx] = id;
                        frontier.emplace_back(nx, ny);
                    }
                }
            }
            if (size > best_size) {
                best_size = size;
                best_comp = id;
            }
        }
    }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (!occ.at(x, y) && comp[y * w + x] != best_comp) occ.at(x, y) = 1;
}

}  // namespace

const char* layout_family_name(LayoutFamily family) {
    return kFamilyNames[static_cast<int>(family)];
}

LayoutFamily layout_family_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kFamilyNames.size(); ++i)
        if (name == kFamilyNames[i]) return static_cast<LayoutFamily>(i);
    throw GridError("unknown layout family: " + name);
}

double octile_distance(Cell a, Cell b) {
    double dx = std::abs(a.x - b.x);
    double dy = std::abs(a.y - b.y);
    return std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy);
}

LayoutSpec parse_layout_spec(const std::string& text) {
    LayoutSpec spec;
    std::istringstream in(text);
    std::string line;
    auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
    };
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw GridError("layout spec line missing '=': " + line);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "family") spec.family = layout_family_from_name(value);
        else if (key == "width") spec.width = std::stoi(value);
        else if (key == "height") spec.height = std::stoi(value);
        else if (key == "obstacle_density") spec.obstacle_density = std::stod(value);
        else if (key == "n_goals") spec.n_goals = std::stoi(value);
        else if (key == "seed") spec.seed = std::stoull(value);
        else throw GridError("unknown layout spec key: " + key);
    }
    if (spec.width <= 0 || spec.height <= 0) throw GridError("layout dimensions must be positive");
    if (spec.n_goals < 2 || spec.n_goals > 10) throw GridError("n_goals must be in [2, 10]");
    if (spec.obstacle_density < 0 || spec.obstacle_density >= 1)
        throw GridError("obstacle_density must be in [0, 1)");
    return spec;
}

LayoutSpec load_layout_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GridError("cannot open layout spec: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_layout_spec(buf.str());
}

GridMap generate_layout(const LayoutSpec& spec) {
    constexpr int kMaxAttempts = 64;
    std::mt19937_64 rng(spec.seed);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Occupancy occ{spec.width, spec.height,
                      std::vector<char>(static_cast<std::size_t>(spec.width) * spec.height, 0)};
        fill_family(occ, spec, rng);
        keep_largest_component(occ);

        std::vector<Cell> free_cells;
        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x)
                if (!occ.at(x, y)) free_cells.push_back({x, y});
        if (free_cells.size() < static_cast<std::size_t>(spec.n_goals) + 1) continue;

        // farthest-point sampling for goal spread
        std::vector<Cell> goals;
        goals.push_back(free_cells[draw(rng, free_cells.size())]);
        while (goals.size() < static_cast<std::size_t>(spec.n_goals)) {
            Cell best = free_cells.front();
            double best_d = -1.0;
            for (Cell c : free_cells) {
                double d = std::numeric_limits<double>::infinity();
                for (Cell g : goals) d = std::min(d, octile_distance(c, g));
                if (d > best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (best_d <= 0.0) break;
            goals.push_back(best);
        }
        if (goals.size() != static_cast<std::size_t>(spec.n_goals)) continue;

        // start far from the goal centroid, seed-perturbed among top candidates
        double cx = 0, cy = 0;
        for (Cell g : goals) {
            cx += g.x;
            cy += g.y;
        }
        cx /= goals.size();
        cy /= goals.size();
        Cell centroid{static_cast<int>(std::lround(cx)), static_cast<int>(std::lround(cy))};
        std::vector<Cell> candidates;
        for (Cell c : free_cells)
            if (std::find(goals.begin(), goals.end(), c) == goals.end())
                candidates.push_back(c);
        std::sort(candidates.begin(), candidates.end(), [&](Cell a, Cell b) {
            double da = octile_distance(a, centroid), db = octile_distance(b, centroid);
            if (da != db) return da > db;
            return a < b;
        });
        if (candidates.empty()) continue;
        std::size_t top = std::min<std::size_t>(8, candidates.size());
        Cell start = candidates[draw(rng, top)];

        std::vector<Cell> blocked;
        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x)
                if (occ.at(x, y)) blocked.push_back({x, y});
        try {
            return GridMap(spec.width, spec.height, std::move(blocked), start,
                           std::move(goals));
        } catch (const GridError&) {
            continue;  // degenerate placement; redraw
        }
    }
    throw GridError("layout generation failed after bounded retries (seed " +
                    std::to_string(spec.seed) + ")");
}

}  // namespace dmdp
