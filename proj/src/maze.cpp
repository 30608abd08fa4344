#include "exdm/maze.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace exdm {

namespace {
constexpr double kWallGap = 1e-9;  // clamp offset keeping states strictly in free cells
}

int MazeSpec::free_cell_count() const {
    return static_cast<int>(std::count(free.begin(), free.end(), std::uint8_t{1}));
}

MazeSpec load_maze_spec(const std::string& text, const std::string& name) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) rows.push_back(line);
    }
    if (rows.size() < 3) throw GridTooSmall(name + ": " + std::to_string(rows.size()) + " rows");
    const std::size_t width = rows.front().size();
    if (width < 3) throw GridTooSmall(name + ": " + std::to_string(width) + " cols");
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != width)
            throw NonRectangular(name + ": row " + std::to_string(r) + " has " +
                                 std::to_string(rows[r].size()) + " cols, expected " +
                                 std::to_string(width));

    MazeSpec spec;
    spec.name = name;
    spec.width = static_cast<int>(width);
    spec.height = static_cast<int>(rows.size());
    spec.cell_size = 1.0 / spec.width;
    spec.free.assign(static_cast<std::size_t>(spec.width) * spec.height, 0);
    // text row 0 is the top: grid row (height-1-r)
    for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
            const char ch = rows[r][c];
            const int gy = spec.height - 1 - r;
            if (ch == '#') continue;
            if (ch == '.' || ch == 'S') {
                spec.free[gy * spec.width + c] = 1;
                if (ch == 'S') spec.start_cells.emplace_back(c, gy);
            } else {
                throw BadMazeChar(name + ": '" + std::string(1, ch) + "' at row " +
                                  std::to_string(r) + " col " + std::to_string(c));
            }
        }
    }
    if (spec.start_cells.empty()) throw NoStart(name);

    // flood fill from the first start cell; every free cell must be reached
    std::vector<std::uint8_t> seen(spec.free.size(), 0);
    std::deque<std::pair<int, int>> queue{spec.start_cells.front()};
    seen[spec.start_cells.front().second * spec.width + spec.start_cells.front().first] = 1;
    while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = cx + dx[k], ny = cy + dy[k];
            if (spec.is_free(nx, ny) && !seen[ny * spec.width + nx]) {
                seen[ny * spec.width + nx] = 1;
                queue.emplace_back(nx, ny);
            }
        }
    }
    for (int gy = 0; gy < spec.height; ++gy)
        for (int gx = 0; gx < spec.width; ++gx)
            if (spec.is_free(gx, gy) && !seen[gy * spec.width + gx])
                throw UnreachableFreeCell(name + ": text row " +
                                          std::to_string(spec.height - 1 - gy) + " col " +
                                          std::to_string(gx));
    return spec;
}

MazeSpec load_maze_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("MazeFileMissing", path);
    std::stringstream ss;
    ss << f.rdbuf();
    std::string name = path;
    if (auto pos = name.find_last_of('/'); pos != std::string::npos) name = name.substr(pos + 1);
    if (auto pos = name.find_last_of('.'); pos != std::string::npos) name = name.substr(0, pos);
    return load_maze_spec(ss.str(), name);
}

Eigen::Vector2d sweep_axis(const MazeSpec& spec, const Eigen::Vector2d& pos, double delta,
                           int axis) {
    if (delta == 0.0) return pos;
    const double cs = spec.cell_size;
    Eigen::Vector2d out = pos;
    const int other_cell = static_cast<int>(std::floor(pos[1 - axis] / cs));
    double cur = pos[axis];
    const double target = cur + delta;
    int cell = static_cast<int>(std::floor(cur / cs));
    const int dir = delta > 0.0 ? 1 : -1;
    while (true) {
        const double boundary = (dir > 0 ? (cell + 1) * cs : cell * cs);
        const bool crosses = dir > 0 ? (target > boundary) : (target < boundary);
        if (!crosses) {
            out[axis] = target;
            return out;
        }
        const int next = cell + dir;
        const bool next_free = (axis == 0) ? spec.is_free(next, other_cell)
                                           : spec.is_free(other_cell, next);
        if (!next_free) {
            out[axis] = boundary - dir * kWallGap;
            return out;
        }
        cell = next;
    }
}

Eigen::Vector2d MazeEnv::reset(Rng& rng) {
    const auto& starts = spec_.start_cells;
    const auto [cx, cy] = starts[starts.size() == 1 ? 0 : uniform_index(starts.size(), rng)];
    state_ = spec_.cell_center(cx, cy);
    step_count_ = 0;
    return state_;
}

StepResult MazeEnv::step(const Eigen::Vector2d& action) {
    if (done()) throw SteppedAfterDone("step " + std::to_string(step_count_));
    const double m = max_action_norm_;
    Eigen::Vector2d a = action.cwiseMax(-m).cwiseMin(m);
    Eigen::Vector2d p = sweep_axis(spec_, state_, a.x(), 0);
    p = sweep_axis(spec_, p, a.y(), 1);
    state_ = p;
    ++step_count_;
    return {state_, done()};
}

TaskReward make_task(const MazeSpec& spec, const Eigen::Vector2d& goal, TaskKind kind,
                     double radius) {
    if (!spec.free_at(goal.x(), goal.y()))
        throw GoalInsideWall("goal (" + std::to_string(goal.x()) + ", " +
                             std::to_string(goal.y()) + ")");
    TaskReward task;
    task.goal = goal;
    task.radius = radius;
    task.kind = kind;
    task.diameter = std::hypot(spec.bound_x(), spec.bound_y());
    return task;
}

}  // namespace exdm
