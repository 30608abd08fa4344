#pragma once

#include "exdm/common.hpp"

#include <optional>

namespace exdm {

// Phase-I simplex for the feasibility system A w = b, w >= 0 (A is m x n).
// Returns a feasible w when one exists. Bland's rule, dense tableau; meant
// for small m (hull membership) with n up to a few thousand columns.
std::optional<VecD> lp_feasible_point(const MatD& a, const VecD& b, double tol = 1e-9);

inline bool lp_feasible(const MatD& a, const VecD& b, double tol = 1e-9) {
    return lp_feasible_point(a, b, tol).has_value();
}

// Convex-hull membership: target = points * w, w >= 0, sum w = 1.
bool in_convex_hull(const MatD& points, const VecD& target, double tol = 1e-9);
std::optional<VecD> convex_combination(const MatD& points, const VecD& target, double tol = 1e-9);

}  // namespace exdm
