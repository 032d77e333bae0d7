#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "refmon/matrix.hpp"

namespace refmon::detail {

/// Exact rational LP: a point t with g t >= h and lo <= t <= hi minimizing sum |t_k|.
/// Returns nullopt iff the polytope is empty. Two-phase dense simplex with Bland's rule.
std::optional<std::vector<mpq_class>> lp_min_l1(const IntMatrix& g, const IntVector& h,
                                                const IntVector& lo, const IntVector& hi);

}  // namespace refmon::detail
