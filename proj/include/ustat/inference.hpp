#pragma once

#include "ustat/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace ustat {

enum class Sided { Two, Upper };
enum class PSource { Asymptotic, Permutation };

struct PValue {
    double value = 1.0;
    Sided sided = Sided::Two;
    PSource source = PSource::Asymptotic;
    int count = 0;  // permutation draws, 0 for asymptotic
};

double normal_sf(double z);
// Regularized upper incomplete gamma Q(df/2, x/2). throws InvalidDf
double chisq_sf(double x, int df);

// Type I extreme-value calibration of the covariance maximum m. throws PTooSmall (p < 3)
PValue gumbel_cov_pvalue(double m, double n, double p);
// Statistic value at which gumbel_cov_pvalue equals alpha.
double gumbel_cov_threshold(double n, double p, double alpha);
// Calibration of mean/score maxima, n_eff = n or nx*ny/(nx+ny). throws PTooSmall
PValue gumbel_mean_pvalue(double m, double n_eff, double p);

// throws ZeroVariance
PValue finite_order_pvalue(const UStatResult& r, Sided sided);
// throws EmptySet
double min_combine(std::span<const PValue> ps);
// throws EmptySet, ZeroPValue
double fisher_combine(std::span<const PValue> ps);
// (#{draws at least as extreme} + 1) / (B + 1); two-sided compares |.|
PValue permutation_pvalue(double observed, std::span<const double> draws, Sided sided);

struct AdaptiveResult {
    std::vector<int> gamma;
    std::vector<PValue> per_order;  // aligned with gamma
    double p_min_combined = 1.0;
    double p_fisher_combined = 1.0;
};

AdaptiveResult adaptive_combine(std::vector<int> gamma, std::vector<PValue> per_order);

// "1-6,inf" style lists. throws InvalidArgument
std::vector<int> parse_orders(const std::string& text);
std::vector<int> default_gamma();

}  // namespace ustat
