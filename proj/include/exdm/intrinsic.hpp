#pragma once

#include "exdm/common.hpp"
#include "exdm/diffusion.hpp"

#include <cmath>
#include <optional>

namespace exdm {

struct IntrinsicConfig {
    int n_mc = 8;
    bool normalize = true;
    std::optional<double> clip;
};

// Monte-Carlo estimate of E_{t,eps} ||eps_model(s_t|t) - eps||^2 per state.
// High where the state model fits poorly, i.e. in rarely visited regions.
template <typename T>
Vec<T> r_score(const Mat<T>& states, const DiffusionModel<T>& model, int n_mc, Rng& rng) {
    const int B = static_cast<int>(states.cols());
    Vec<T> acc = Vec<T>::Zero(B);
    const Mat<T> no_cond;
    for (int k = 0; k < n_mc; ++k) {
        RowVec<double> t(B);
        for (int c = 0; c < B; ++c) t(c) = uniform<double>(model.t_min(), 1.0, rng);
        Mat<T> noise = gaussian<T>(model.dim(), B, rng);
        Mat<T> x_t = perturb<T>(model.schedule(), states, t, noise);
        Mat<T> pred = model.eps(x_t, t, no_cond);
        acc += (pred - noise).colwise().squaredNorm().transpose();
    }
    return acc / static_cast<T>(n_mc);
}

// Welford accumulator over a scalar reward stream.
struct RunningStd {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void update(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double stddev() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n)) : 0.0; }
};

// Divides by the running std (no mean subtraction, rewards stay nonnegative).
// Statistics are updated with the batch first, then the guarded division.
template <typename T>
Vec<T> normalize_rewards(const Vec<T>& rewards, RunningStd& stats,
                         std::optional<double> clip = std::nullopt) {
    for (int i = 0; i < rewards.size(); ++i) stats.update(static_cast<double>(rewards(i)));
    const double denom = std::max(stats.stddev(), 1e-6);
    Vec<T> out = rewards / static_cast<T>(denom);
    if (clip)
        for (int i = 0; i < out.size(); ++i)
            out(i) = std::min(out(i), static_cast<T>(*clip));
    return out;
}

}  // namespace exdm
