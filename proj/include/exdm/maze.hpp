#pragma once

#include "exdm/common.hpp"

#include <string>
#include <utility>
#include <vector>

namespace exdm {

EXDM_DEFINE_ERROR(NonRectangular);
EXDM_DEFINE_ERROR(NoStart);
EXDM_DEFINE_ERROR(UnreachableFreeCell);
EXDM_DEFINE_ERROR(SteppedAfterDone);
EXDM_DEFINE_ERROR(GoalInsideWall);
EXDM_DEFINE_ERROR(BadMazeChar);
EXDM_DEFINE_ERROR(GridTooSmall);

// Wall grid in world coordinates: cell_size = 1 / width, so x spans [0, 1]
// and y spans [0, height * cell_size]. Text row 0 is the top of the maze.
struct MazeSpec {
    std::string name;
    int width = 0;
    int height = 0;
    double cell_size = 0.0;
    std::vector<std::uint8_t> free;               // row-major, row 0 at bottom
    std::vector<std::pair<int, int>> start_cells;  // (col, row)

    bool in_grid(int cx, int cy) const { return cx >= 0 && cx < width && cy >= 0 && cy < height; }
    bool is_free(int cx, int cy) const { return in_grid(cx, cy) && free[cy * width + cx] != 0; }
    bool free_at(double x, double y) const {
        return is_free(static_cast<int>(std::floor(x / cell_size)),
                       static_cast<int>(std::floor(y / cell_size)));
    }
    double bound_x() const { return 1.0; }
    double bound_y() const { return height * cell_size; }
    int free_cell_count() const;
    Eigen::Vector2d cell_center(int cx, int cy) const {
        return {(cx + 0.5) * cell_size, (cy + 0.5) * cell_size};
    }
};

// Parses an ASCII grid ('#' wall, '.' free, 'S' start). Validates rectangular
// shape, >= 3x3, at least one start, and 4-connectivity of all free cells.
MazeSpec load_maze_spec(const std::string& text, const std::string& name = "maze");
MazeSpec load_maze_file(const std::string& path);

// Moves pos by delta along one axis, stopping at the first wall boundary
// (exact sweep; the blocked coordinate is clamped a hair before the wall).
Eigen::Vector2d sweep_axis(const MazeSpec& spec, const Eigen::Vector2d& pos, double delta,
                           int axis);

struct StepResult {
    Eigen::Vector2d state;
    bool done = false;
};

class MazeEnv {
  public:
    MazeEnv(MazeSpec spec, double max_action_norm = 0.05, int episode_len = 250)
        : spec_(std::move(spec)), max_action_norm_(max_action_norm), episode_len_(episode_len) {}

    const MazeSpec& spec() const { return spec_; }
    double max_action_norm() const { return max_action_norm_; }
    int episode_len() const { return episode_len_; }
    int step_count() const { return step_count_; }
    const Eigen::Vector2d& state() const { return state_; }
    bool done() const { return step_count_ >= episode_len_; }

    Eigen::Vector2d reset(Rng& rng);
    // Action components are clipped to [-max_action_norm, +max_action_norm];
    // motion is an x-then-y wall sweep.
    StepResult step(const Eigen::Vector2d& action);

  private:
    MazeSpec spec_;
    double max_action_norm_;
    int episode_len_;
    int step_count_ = 0;
    Eigen::Vector2d state_{0.0, 0.0};
};

enum class TaskKind { Sparse, Dense };

struct TaskReward {
    Eigen::Vector2d goal;
    double radius = 0.1;
    TaskKind kind = TaskKind::Sparse;
    double diameter = 0.0;

    double reward(const Eigen::Vector2d& s) const {
        const double dist = (s - goal).norm();
        if (kind == TaskKind::Sparse) return dist <= radius ? 1.0 : 0.0;
        return std::max(0.0, 1.0 - dist / diameter);
    }
};

TaskReward make_task(const MazeSpec& spec, const Eigen::Vector2d& goal, TaskKind kind,
                     double radius = 0.1);

}  // namespace exdm
