#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmdp {

struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// The 8 compass moves in canonical order. All tie-breaking throughout the
/// library follows this ordering.
enum class Action : int { N = 0, NE, E, SE, S, SW, W, NW };

inline constexpr int kNumActions = 8;

inline constexpr std::array<Action, kNumActions> all_actions() {
    return {Action::N,  Action::NE, Action::E, Action::SE,
            Action::S, Action::SW, Action::W, Action::NW};
}

/// Displacement under screen coordinates: x rightward, y downward, N = (0,-1).
Cell displacement(Action a);

/// Move cost: 1 for cardinal moves, sqrt(2) for diagonals.
double action_cost(Action a);

bool is_diagonal(Action a);

const char* action_name(Action a);

/// Parses a canonical action name ("N".."NW"); returns nullopt on failure.
std::optional<Action> action_from_name(const std::string& name);

class GridError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Occupancy grid with a start cell and an ordered list of candidate goals.
/// Immutable after construction.
class GridMap {
  public:
    GridMap(int width, int height, std::vector<Cell> blocked, Cell start,
            std::vector<Cell> goals);

    int width() const { return width_; }
    int height() const { return height_; }
    Cell start() const { return start_; }
    const std::vector<Cell>& goals() const { return goals_; }
    std::size_t num_goals() const { return goals_.size(); }

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
    }
    bool blocked(Cell c) const { return blocked_[index(c)]; }
    bool free(Cell c) const { return in_bounds(c) && !blocked(c); }

    /// Row-major linear index.
    int index(Cell c) const { return c.y * width_ + c.x; }
    Cell cell_at(int index) const { return {index % width_, index / width_}; }
    int num_cells() const { return width_ * height_; }

    /// Text form: '#' blocked, '.' free, 'S' start, digits goal cells.
    std::string to_text() const;

    /// FNV-1a over the text form; used to key the Q-table cache.
    std::uint64_t hash() const;

  private:
    int width_;
    int height_;
    std::vector<char> blocked_;  // row-major occupancy
    Cell start_;
    std::vector<Cell> goals_;
};

/// Parses the map text format. Throws GridError on malformed input
/// (unequal line lengths, duplicate 'S', duplicate or non-contiguous digits).
GridMap parse_map(const std::string& text);

GridMap load_map(const std::string& path);

/// Deterministic single-step move. Returns nullopt when the target cell is
/// blocked or out of bounds, or when a diagonal would cut a wall corner.
std::optional<Cell> transition(const GridMap& map, Cell s, Action a);

class IsolatedStateError : public GridError {
  public:
    explicit IsolatedStateError(Cell s)
        : GridError("no valid action at (" + std::to_string(s.x) + "," +
                    std::to_string(s.y) + ")") {}
};

/// Valid actions at s in canonical order. Throws IsolatedStateError when empty.
std::vector<Action> available_actions(const GridMap& map, Cell s);

}  // namespace dmdp
