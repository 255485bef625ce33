#include "ustat/inference.hpp"

#include "ustat/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ustat {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double chisq_sf(double x, int df) {
    if (df < 1) fail(ErrorCode::InvalidDf, "chi-square degrees of freedom must be >= 1");
    if (std::isnan(x)) fail(ErrorCode::InvalidArgument, "chi-square statistic is NaN");
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void require_p3(double p) {
    if (p < 3) fail(ErrorCode::PTooSmall, "extreme-value calibration needs p >= 3");
}

}  // namespace

PValue gumbel_cov_pvalue(double m, double n, double p) {
    require_p3(p);
    const double lp = std::log(p);
    const double u = n * m * m - 4.0 * lp + std::log(lp);
    // 1 - exp(-c e^{-u/2}) computed as -expm1 to keep small tails accurate
    const double c = 1.0 / std::sqrt(8.0 * std::numbers::pi);
    PValue r;
    r.value = clamp01(-std::expm1(-c * std::exp(-0.5 * u)));
    r.sided = Sided::Upper;
    return r;
}

double gumbel_cov_threshold(double n, double p, double alpha) {
    require_p3(p);
    const double lp = std::log(p);
    const double inner = 4.0 * lp - std::log(lp) - std::log(8.0 * std::numbers::pi) -
                         2.0 * std::log(std::log(1.0 / (1.0 - alpha)));
    return std::sqrt(std::max(inner, 0.0) / n);
}

PValue gumbel_mean_pvalue(double m, double n_eff, double p) {
    require_p3(p);
    const double lp = std::log(p);
    const double u = n_eff * m - (2.0 * lp - std::log(lp));
    const double c = 1.0 / std::sqrt(std::numbers::pi);
    PValue r;
    r.value = clamp01(-std::expm1(-c * std::exp(-0.5 * u)));
    r.sided = Sided::Upper;
    return r;
}

PValue finite_order_pvalue(const UStatResult& r, Sided sided) {
    if (!(r.variance > 0.0) || !std::isfinite(r.variance))
        fail(ErrorCode::ZeroVariance, "order " + order_name(r.order) + ": variance estimate is not positive");
    const double z = r.value / std::sqrt(r.variance);
    PValue out;
    out.sided = sided;
    out.value = sided == Sided::Upper ? normal_sf(z) : clamp01(2.0 * normal_sf(std::fabs(z)));
    return out;
}

double min_combine(std::span<const PValue> ps) {
    if (ps.empty()) fail(ErrorCode::EmptySet, "no p-values to combine");
    double mn = 1.0;
    for (const auto& p : ps) mn = std::min(mn, p.value);
    // 1 - (1 - min)^k without cancellation for tiny min
    return clamp01(-std::expm1(static_cast<double>(ps.size()) * std::log1p(-mn)));
}

double fisher_combine(std::span<const PValue> ps) {
    if (ps.empty()) fail(ErrorCode::EmptySet, "no p-values to combine");
    double stat = 0.0;
    for (const auto& p : ps) {
        if (!(p.value > 0.0)) fail(ErrorCode::ZeroPValue, "Fisher combination got a zero p-value");
        stat += -2.0 * std::log(std::min(p.value, 1.0));
    }
    return chisq_sf(stat, 2 * static_cast<int>(ps.size()));
}

PValue permutation_pvalue(double observed, std::span<const double> draws, Sided sided) {
    std::size_t b = 0;
    if (sided == Sided::Upper) {
        for (double d : draws) b += d >= observed;
    } else {
        const double a = std::fabs(observed);
        for (double d : draws) b += std::fabs(d) >= a;
    }
    PValue r;
    r.sided = sided;
    r.source = PSource::Permutation;
    r.count = static_cast<int>(draws.size());
    r.value = (static_cast<double>(b) + 1.0) / (static_cast<double>(draws.size()) + 1.0);
    return r;
}

AdaptiveResult adaptive_combine(std::vector<int> gamma, std::vector<PValue> per_order) {
    if (gamma.size() != per_order.size())
        fail(ErrorCode::DimensionMismatch, "orders and p-values differ in length");
    AdaptiveResult r;
    r.gamma = std::move(gamma);
    r.per_order = std::move(per_order);
    r.p_min_combined = min_combine(r.per_order);
    // an underflowed p-value makes the Fisher statistic infinite; its limit is 0
    bool zero = false;
    for (const auto& p : r.per_order) zero = zero || p.value <= 0.0;
    r.p_fisher_combined = zero ? 0.0 : fisher_combine(r.per_order);
    return r;
}

std::vector<int> default_gamma() { return {1, 2, 3, 4, 5, 6, kInfOrder}; }

std::vector<int> parse_orders(const std::string& text) {
    std::vector<int> out;
    auto bad = [&](const std::string& why) {
        fail(ErrorCode::InvalidArgument, "orders '" + text + "': " + why);
    };
    auto to_int = [&](const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) bad("'" + s + "' is not an order");
        int v = std::stoi(s);
        if (v < 1) bad("orders start at 1");
        return v;
    };
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        std::string tok = text.substr(start, comma - start);
        tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
        start = comma + 1;
        if (tok.empty()) bad("empty entry");
        if (tok == "inf" || tok == "Inf" || tok == "INF") {
            out.push_back(kInfOrder);
        } else if (auto dash = tok.find('-'); dash != std::string::npos) {
            int lo = to_int(tok.substr(0, dash)), hi = to_int(tok.substr(dash + 1));
            if (hi < lo) bad("descending range");
            for (int a = lo; a <= hi; ++a) out.push_back(a);
        } else {
            out.push_back(to_int(tok));
        }
        if (comma == text.size()) break;
    }
    // finite orders ascending, inf last, no repeats
    std::vector<int> uniq;
    bool has_inf = false;
    for (int o : out) {
        if (o == kInfOrder) has_inf = true;
        else if (std::find(uniq.begin(), uniq.end(), o) == uniq.end()) uniq.push_back(o);
    }
    std::sort(uniq.begin(), uniq.end());
    if (has_inf) uniq.push_back(kInfOrder);
    if (uniq.empty()) bad("no orders");
    return uniq;
}

}  // namespace ustat
