#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace ustat {

// Orders are positive integers; the maximum-type statistic is order 0
// internally and spelled "inf" at the edges.
inline constexpr int kInfOrder = 0;

std::string order_name(int order);

struct UStatResult {
    int order = 1;
    double value = 0.0;
    double variance = 0.0;  // unused for the maximum-type statistic
    double z = 0.0;
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    Eigen::Index arg1 = -1;  // location of the maximum, when meaningful
    Eigen::Index arg2 = -1;
    std::vector<std::string> warnings;

    bool is_max() const { return order == kInfOrder; }
};

// z = value / sqrt(variance) when variance > 0, otherwise 0
void standardize(UStatResult& r);

}  // namespace ustat
