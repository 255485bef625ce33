#pragma once

#include <cstdint>
#include <vector>

namespace ustat {

// Distinct-index sums of mixed bivariate monomials.
//
// For series pairs (u_i, w_i), a "monomial" (r, q) stands for u^r w^q. The
// sum over ordered distinct index tuples of prod_t u_{i_t}^{r_t} w_{i_t}^{q_t}
// is a polynomial in the moments T[r][q] = sum_i u_i^r w_i^q. MixedSumPoly
// holds that polynomial, built once by the heterogeneous version of the
// power-sum recursion and then evaluated for any number of series pairs.
struct Monomial {
    int r = 0;
    int q = 0;
};

struct MixedSumPoly {
    struct Term {
        double coef = 0.0;
        std::vector<std::uint8_t> factors;  // indices into the moment table, r * stride + q
    };
    int stride = 0;  // max exponent + 1
    std::vector<Term> terms;

    // moments[r * stride + q] = sum_i u^r w^q
    double eval(const double* moments) const;
};

MixedSumPoly compile_mixed_sum(const std::vector<Monomial>& items, int max_exponent);

}  // namespace ustat
