#include "ustat/mixed_sums.hpp"

#include "ustat/error.hpp"

#include <algorithm>
#include <map>

namespace ustat {

namespace {

using Key = std::vector<std::uint8_t>;  // sorted multiset of encoded monomials
using Poly = std::map<Key, double>;     // product of moment factors -> coefficient

class Compiler {
public:
    explicit Compiler(int stride) : stride_(stride) {}

    // S(M) = T[m] S(R) - sum_{t in R} S(R with R_t merged with m), m = last of M
    const Poly& sum(const Key& items) {
        auto it = memo_.find(items);
        if (it != memo_.end()) return it->second;
        Poly out;
        if (items.empty()) {
            out[Key{}] = 1.0;
        } else {
            Key rest(items.begin(), items.end() - 1);
            const std::uint8_t m = items.back();
            const Poly& head = sum(rest);
            for (const auto& [k, c] : head) {
                Key f = k;
                f.insert(std::upper_bound(f.begin(), f.end(), m), m);
                out[f] += c;
            }
            for (std::size_t t = 0; t < rest.size(); ++t) {
                if (t > 0 && rest[t] == rest[t - 1]) continue;
                auto mult = std::count(rest.begin(), rest.end(), rest[t]);
                Key merged = rest;
                merged.erase(merged.begin() + static_cast<long>(t));
                std::uint8_t joined = add(rest[t], m);
                merged.insert(std::upper_bound(merged.begin(), merged.end(), joined), joined);
                const Poly& sub = sum(merged);
                for (const auto& [k, c] : sub) out[k] -= static_cast<double>(mult) * c;
            }
            for (auto e = out.begin(); e != out.end();) {
                if (e->second == 0.0) e = out.erase(e);
                else ++e;
            }
        }
        return memo_.emplace(items, std::move(out)).first->second;
    }

private:
    std::uint8_t add(std::uint8_t a, std::uint8_t b) const {
        int r = a / stride_ + b / stride_;
        int q = a % stride_ + b % stride_;
        return static_cast<std::uint8_t>(r * stride_ + q);
    }

    int stride_;
    std::map<Key, Poly> memo_;
};

}  // namespace

double MixedSumPoly::eval(const double* moments) const {
    double total = 0.0;
    for (const auto& t : terms) {
        double prod = t.coef;
        for (auto f : t.factors) prod *= moments[f];
        total += prod;
    }
    return total;
}

MixedSumPoly compile_mixed_sum(const std::vector<Monomial>& items, int max_exponent) {
    const int stride = max_exponent + 1;
    if (stride * stride > 256) fail(ErrorCode::InvalidArgument, "mixed-sum exponent too large");
    Key key;
    int rs = 0, qs = 0;
    for (const auto& m : items) {
        if (m.r < 0 || m.q < 0 || (m.r == 0 && m.q == 0))
            fail(ErrorCode::InvalidArgument, "mixed-sum monomials must be nonconstant");
        rs += m.r;
        qs += m.q;
        key.push_back(static_cast<std::uint8_t>(m.r * stride + m.q));
    }
    if (rs > max_exponent || qs > max_exponent)
        fail(ErrorCode::InvalidArgument, "mixed-sum total degree exceeds the moment table");
    std::sort(key.begin(), key.end());
    Compiler c(stride);
    const Poly& poly = c.sum(key);
    MixedSumPoly out;
    out.stride = stride;
    out.terms.reserve(poly.size());
    for (const auto& [k, coef] : poly) out.terms.push_back({coef, k});
    return out;
}

}  // namespace ustat
