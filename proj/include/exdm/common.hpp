#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace exdm {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

using MatF = Mat<float>;
using MatD = Mat<double>;
using VecF = Vec<float>;
using VecD = Vec<double>;

// All stochastic code draws from an explicitly passed Rng so that a run is a
// pure function of (config, seed).
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

template <typename T>
Mat<T> gaussian(int rows, int cols, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Mat<T> m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = static_cast<T>(n01(rng));
    return m;
}

template <typename T>
T uniform(T lo, T hi, Rng& rng) {
    std::uniform_real_distribution<double> u(static_cast<double>(lo), static_cast<double>(hi));
    return static_cast<T>(u(rng));
}

inline std::size_t uniform_index(std::size_t n, Rng& rng) {
    std::uniform_int_distribution<std::size_t> u(0, n - 1);
    return u(rng);
}

struct Error : std::runtime_error {
    Error(const std::string& name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(name) {}
    const std::string& name() const { return name_; }

  private:
    std::string name_;
};

#define EXDM_DEFINE_ERROR(Name)                                           \
    struct Name : ::exdm::Error {                                         \
        explicit Name(const std::string& what) : Error(#Name, what) {}    \
    }

EXDM_DEFINE_ERROR(DimMismatch);
EXDM_DEFINE_ERROR(ConfigInvalid);

}  // namespace exdm
