#pragma once

#include "exdm/common.hpp"
#include "exdm/maze.hpp"

#include <vector>

namespace exdm {

EXDM_DEFINE_ERROR(PointOutOfBounds);
EXDM_DEFINE_ERROR(TooFewRuns);

// Visited-bin tracker over the maze bounds. A bin counts as free when its
// center lies in free space; the coverage denominator is the free-bin count,
// so a full sweep of free space scores 1.0.
class CoverageGrid {
  public:
    explicit CoverageGrid(const MazeSpec& spec, double bin_size = 0.01);

    void add(double x, double y);
    void add(const Eigen::Vector2d& p) { add(p.x(), p.y()); }

    double coverage() const;
    int free_bin_count() const { return free_bins_; }
    int visited_count() const { return visited_count_; }
    double bin_size() const { return bin_; }

  private:
    int index(double x, double y) const;

    double bin_;
    int nx_ = 0, ny_ = 0;
    double bx_ = 0.0, by_ = 0.0;
    int free_bins_ = 0;
    int visited_count_ = 0;
    std::vector<std::uint8_t> free_;
    std::vector<std::uint8_t> visited_;
};

double coverage_of(const std::vector<Eigen::Vector2d>& points, const MazeSpec& spec,
                   double bin_size = 0.01);

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
};

struct AggregateResult {
    double mean = 0.0;
    double median = 0.0;
    double iqm = 0.0;            // mean of the middle 50% of pooled scores
    double optimality_gap = 0.0;  // mean of max(0, 1 - score)
    ConfidenceInterval mean_ci, median_ci, iqm_ci, gap_ci;
};

// Bootstrap percentile CIs (95%, `n_boot` resamples) over per-run scores.
AggregateResult aggregate(const std::vector<double>& scores, int n_boot = 2000,
                          std::uint64_t seed = 0);

}  // namespace exdm
