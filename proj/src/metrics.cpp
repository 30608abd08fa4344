#include "exdm/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace exdm {

CoverageGrid::CoverageGrid(const MazeSpec& spec, double bin_size) : bin_(bin_size) {
    bx_ = spec.bound_x();
    by_ = spec.bound_y();
    nx_ = static_cast<int>(std::ceil(bx_ / bin_ - 1e-12));
    ny_ = static_cast<int>(std::ceil(by_ / bin_ - 1e-12));
    free_.assign(static_cast<std::size_t>(nx_) * ny_, 0);
    visited_.assign(free_.size(), 0);
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            const double cx = (i + 0.5) * bin_;
            const double cy = (j + 0.5) * bin_;
            if (spec.free_at(cx, cy)) {
                free_[j * nx_ + i] = 1;
                ++free_bins_;
            }
        }
    }
}

int CoverageGrid::index(double x, double y) const {
    if (x < 0.0 || y < 0.0 || x > bx_ || y > by_)
        throw PointOutOfBounds("(" + std::to_string(x) + ", " + std::to_string(y) + ")");
    int i = std::min(static_cast<int>(std::floor(x / bin_)), nx_ - 1);
    int j = std::min(static_cast<int>(std::floor(y / bin_)), ny_ - 1);
    return j * nx_ + i;
}

void CoverageGrid::add(double x, double y) {
    const int k = index(x, y);
    if (free_[k] && !visited_[k]) {
        visited_[k] = 1;
        ++visited_count_;
    }
}

double CoverageGrid::coverage() const {
    return free_bins_ == 0 ? 0.0 : static_cast<double>(visited_count_) / free_bins_;
}

double coverage_of(const std::vector<Eigen::Vector2d>& points, const MazeSpec& spec,
                   double bin_size) {
    CoverageGrid grid(spec, bin_size);
    for (const auto& p : points) grid.add(p);
    return grid.coverage();
}

namespace {

double median_sorted(const std::vector<double>& s) {
    const std::size_t n = s.size();
    return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

double iqm_sorted(const std::vector<double>& s) {
    const std::size_t n = s.size();
    const std::size_t drop = n / 4;
    double acc = 0.0;
    for (std::size_t i = drop; i < n - drop; ++i) acc += s[i];
    return acc / static_cast<double>(n - 2 * drop);
}

double mean_of(const std::vector<double>& s) {
    double acc = 0.0;
    for (double v : s) acc += v;
    return acc / static_cast<double>(s.size());
}

double gap_of(const std::vector<double>& s) {
    double acc = 0.0;
    for (double v : s) acc += std::max(0.0, 1.0 - v);
    return acc / static_cast<double>(s.size());
}

ConfidenceInterval percentile_ci(std::vector<double>& stats) {
    std::sort(stats.begin(), stats.end());
    const auto at = [&](double q) {
        const double idx = q * (stats.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(idx);
        const double frac = idx - lo;
        return lo + 1 < stats.size() ? stats[lo] * (1 - frac) + stats[lo + 1] * frac : stats[lo];
    };
    return {at(0.025), at(0.975)};
}

}  // namespace

AggregateResult aggregate(const std::vector<double>& scores, int n_boot, std::uint64_t seed) {
    if (scores.size() < 2) throw TooFewRuns(std::to_string(scores.size()) + " runs");
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());

    AggregateResult r;
    r.mean = mean_of(sorted);
    r.median = median_sorted(sorted);
    r.iqm = iqm_sorted(sorted);
    r.optimality_gap = gap_of(sorted);

    Rng rng = make_rng(seed);
    std::vector<double> bm, bmed, biqm, bgap;
    bm.reserve(n_boot);
    std::vector<double> resample(scores.size());
    for (int b = 0; b < n_boot; ++b) {
        for (auto& v : resample) v = scores[uniform_index(scores.size(), rng)];
        std::sort(resample.begin(), resample.end());
        bm.push_back(mean_of(resample));
        bmed.push_back(median_sorted(resample));
        biqm.push_back(iqm_sorted(resample));
        bgap.push_back(gap_of(resample));
    }
    r.mean_ci = percentile_ci(bm);
    r.median_ci = percentile_ci(bmed);
    r.iqm_ci = percentile_ci(biqm);
    r.gap_ci = percentile_ci(bgap);
    return r;
}

}  // namespace exdm
