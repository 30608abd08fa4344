#pragma once

#include "exdm/common.hpp"

#include <cmath>

namespace exdm {

EXDM_DEFINE_ERROR(TOutOfRange);

// Variance-preserving schedule over t in [0,1]:
//   alpha_t = exp(-(beta1-beta0) t^2/4 - beta0 t/2),  sigma_t = sqrt(1 - alpha_t^2)
// so alpha_0 = 1, sigma_0 = 0 and alpha_1 << 1. log_snr(t) = log(alpha/sigma)
// is the integration variable of the sampler.
class NoiseSchedule {
  public:
    NoiseSchedule(double beta0 = 0.1, double beta1 = 20.0) : beta0_(beta0), beta1_(beta1) {}

    double beta0() const { return beta0_; }
    double beta1() const { return beta1_; }

    double alpha(double t) const {
        check(t);
        return std::exp(-(beta1_ - beta0_) * t * t / 4.0 - beta0_ * t / 2.0);
    }

    double sigma(double t) const {
        check(t);
        const double a = alpha(t);
        return std::sqrt(std::max(0.0, 1.0 - a * a));
    }

    double log_snr(double t) const { return std::log(alpha(t) / sigma(t)); }

    // Inverse of log_snr on (0, 1]; log_snr is strictly decreasing in t.
    double t_of_log_snr(double lam) const {
        double lo = 1e-9, hi = 1.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (log_snr(mid) > lam ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

  private:
    void check(double t) const {
        if (!(t >= 0.0 && t <= 1.0)) throw TOutOfRange("t = " + std::to_string(t));
    }

    double beta0_;
    double beta1_;
};

// x_t = alpha_t x + sigma_t eps, applied column-wise with one t per column.
template <typename T>
Mat<T> perturb(const NoiseSchedule& sched, const Mat<T>& x, const RowVec<double>& t,
               const Mat<T>& eps) {
    Mat<T> out(x.rows(), x.cols());
    for (int c = 0; c < x.cols(); ++c) {
        const double a = sched.alpha(t(c));
        const double s = sched.sigma(t(c));
        out.col(c) = static_cast<T>(a) * x.col(c) + static_cast<T>(s) * eps.col(c);
    }
    return out;
}

template <typename T>
Vec<T> perturb(const NoiseSchedule& sched, const Vec<T>& x, double t, const Vec<T>& eps) {
    const double a = sched.alpha(t);
    const double s = sched.sigma(t);
    return static_cast<T>(a) * x + static_cast<T>(s) * eps;
}

}  // namespace exdm
