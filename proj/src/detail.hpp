#pragma once

#include "ustat/error.hpp"
#include "ustat/power_sums.hpp"
#include "ustat/types.hpp"

#include <algorithm>
#include <span>
#include <string>

namespace ustat::detail {

inline int check_finite_orders(std::span<const int> orders, Eigen::Index n) {
    if (orders.empty()) fail(ErrorCode::EmptySet, "no orders requested");
    int amax = 0;
    for (int a : orders) {
        if (a < 1) fail(ErrorCode::InvalidArgument, "finite orders start at 1");
        if (a > kMaxPower / 2) fail(ErrorCode::UnsupportedOrder, "order " + std::to_string(a) + " is too large");
        if (a > n)
            fail(ErrorCode::OrderExceedsSampleSize,
                 "order " + std::to_string(a) + " exceeds sample size " + std::to_string(n));
        amax = std::max(amax, a);
    }
    return amax;
}

}  // namespace ustat::detail
