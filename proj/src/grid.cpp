#include "dmdp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dmdp {

namespace {
constexpr std::array<Cell, kNumActions> kDisplacements = {{
    {0, -1},   // N
    {1, -1},   // NE
    {1, 0},    // E
    {1, 1},    // SE
    {0, 1},    // S
    {-1, 1},   // SW
    {-1, 0},   // W
    {-1, -1},  // NW
}};

constexpr std::array<const char*, kNumActions> kNames = {
    "N", "NE", "E", "SE", "S", "SW", "W", "NW"};
}  // namespace

Cell displacement(Action a) { return kDisplacements[static_cast<int>(a)]; }

bool is_diagonal(Action a) {
    Cell d = displacement(a);
    return d.x != 0 && d.y != 0;
}

double action_cost(Action a) { return is_diagonal(a) ? std::sqrt(2.0) : 1.0; }

const char* action_name(Action a) { return kNames[static_cast<int>(a)]; }

std::optional<Action> action_from_name(const std::string& name) {
    for (int i = 0; i < kNumActions; ++i) {
        if (name == kNames[i]) return static_cast<Action>(i);
    }
    return std::nullopt;
}

GridMap::GridMap(int width, int height, std::vector<Cell> blocked, Cell start,
                 std::vector<Cell> goals)
    : width_(width), height_(height), start_(start), goals_(std::move(goals)) {
    if (width <= 0 || height <= 0) throw GridError("map dimensions must be positive");
    blocked_.assign(static_cast<std::size_t>(width) * height, 0);
    for (Cell c : blocked) {
        if (!in_bounds(c)) throw GridError("blocked cell out of bounds");
        blocked_[index(c)] = 1;
    }
    if (!in_bounds(start_) || blocked_[index(start_)])
        throw GridError("start cell must be in bounds and unblocked");
    if (goals_.size() < 2) throw GridError("at least 2 goals required");
    std::set<Cell> seen;
    for (Cell g : goals_) {
        if (!in_bounds(g) || blocked_[index(g)])
            throw GridError("goal cell must be in bounds and unblocked");
        if (g == start_) throw GridError("goal coincides with start");
        if (!seen.insert(g).second) throw GridError("duplicate goal cell");
    }
}

std::string GridMap::to_text() const {
    std::string out;
    out.reserve(static_cast<std::size_t>(width_ + 1) * height_);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            Cell c{x, y};
            char ch = blocked(c) ? '#' : '.';
            if (c == start_) ch = 'S';
            for (std::size_t i = 0; i < goals_.size(); ++i) {
                if (goals_[i] == c) ch = static_cast<char>('0' + i);
            }
            out.push_back(ch);
        }
        out.push_back('\n');
    }
    return out;
}

std::uint64_t GridMap::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (char ch : to_text()) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ull;
    }
    return h;
}

GridMap parse_map(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw GridError("empty map");
    const int height = static_cast<int>(lines.size());
    const int width = static_cast<int>(lines[0].size());

    std::vector<Cell> blocked;
    std::optional<Cell> start;
    std::vector<std::optional<Cell>> goals(10);
    int max_digit = -1;
    for (int y = 0; y < height; ++y) {
        if (static_cast<int>(lines[y].size()) != width)
            throw GridError("map lines must have equal length");
        for (int x = 0; x < width; ++x) {
            char ch = lines[y][x];
            Cell c{x, y};
            if (ch == '#') {
                blocked.push_back(c);
            } else if (ch == 'S') {
                if (start) throw GridError("duplicate start cell");
                start = c;
            } else if (ch >= '0' && ch <= '9') {
                int d = ch - '0';
                if (goals[d]) throw GridError("duplicate goal digit");
                goals[d] = c;
                max_digit = std::max(max_digit, d);
            } else if (ch != '.') {
                throw GridError(std::string("unexpected map character '") + ch + "'");
            }
        }
    }
    if (!start) throw GridError("map has no start cell");
    std::vector<Cell> goal_list;
    for (int d = 0; d <= max_digit; ++d) {
        if (!goals[d]) throw GridError("gap in goal digit numbering");
        goal_list.push_back(*goals[d]);
    }
    return GridMap(width, height, std::move(blocked), *start, std::move(goal_list));
}

GridMap load_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GridError("cannot open map file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_map(buf.str());
}

std::optional<Cell> transition(const GridMap& map, Cell s, Action a) {
    Cell d = displacement(a);
    Cell t{s.x + d.x, s.y + d.y};
    if (!map.free(t)) return std::nullopt;
    // No corner cutting: a diagonal needs both adjacent cardinals free.
    if (d.x != 0 && d.y != 0) {
        if (!map.free({s.x + d.x, s.y}) || !map.free({s.x, s.y + d.y}))
            return std::nullopt;
    }
    return t;
}

std::vector<Action> available_actions(const GridMap& map, Cell s) {
    std::vector<Action> out;
    for (Action a : all_actions()) {
        if (transition(map, s, a)) out.push_back(a);
    }
    if (out.empty()) throw IsolatedStateError(s);
    return out;
}

}  // namespace dmdp
