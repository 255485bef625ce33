#include "ustat/parallel.hpp"
#include "ustat/types.hpp"

#include <cmath>

namespace ustat {

std::string order_name(int order) {
    return order == kInfOrder ? std::string("inf") : std::to_string(order);
}

void standardize(UStatResult& r) {
    r.z = (r.variance > 0.0 && std::isfinite(r.variance)) ? r.value / std::sqrt(r.variance) : 0.0;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace ustat
