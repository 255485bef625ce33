#include "ustat/planner.hpp"

#include "ustat/error.hpp"
#include "ustat/power_sums.hpp"

#include <cmath>

namespace ustat {

namespace {

double sparsity_count(const PlanInput& inp) {
    double s;
    if (inp.sparsity) {
        s = *inp.sparsity;
    } else if (inp.beta && inp.family == PlanFamily::Cov1) {
        if (!(*inp.beta > 0.0 && *inp.beta < 1.0)) fail(ErrorCode::InvalidSparsity, "beta must lie in (0, 1)");
        s = std::pow(inp.p, 2.0 * (1.0 - *inp.beta));
    } else {
        fail(ErrorCode::InvalidSparsity, "a sparsity count is required (beta is accepted for cov1 only)");
    }
    const double cap = inp.family == PlanFamily::Mean2 ? inp.p : inp.p * inp.p;
    if (!(s > 0.0) || s > cap)
        fail(ErrorCode::InvalidSparsity, "sparsity must lie in (0, " + std::to_string(cap) + "]");
    return s;
}

double effective_n(const PlanInput& inp) {
    switch (inp.family) {
    case PlanFamily::Cov1: return inp.n;
    case PlanFamily::Mean2: return inp.nx * inp.ny / (inp.nx + inp.ny);
    case PlanFamily::Cov2: return (inp.nx > 0 && inp.ny > 0 ? inp.nx + inp.ny : inp.n) / 2.0;
    }
    return inp.n;
}

void validate(const PlanInput& inp) {
    if (!(inp.M > 0.0)) fail(ErrorCode::InvalidArgument, "M must be positive");
    if (!(inp.p >= 2)) fail(ErrorCode::InvalidArgument, "p must be at least 2");
    if (inp.family == PlanFamily::Mean2 && !(inp.nx >= 2 && inp.ny >= 2))
        fail(ErrorCode::InvalidArgument, "mean2 planning needs nx and ny");
    if (!(effective_n(inp) > 0.0)) fail(ErrorCode::InvalidArgument, "sample size must be positive");
    if (!(inp.nu2 > 0.0) || !(inp.kappa1 > 0.0) || !(inp.kappa_x > 0.0) || !(inp.kappa_y > 0.0))
        fail(ErrorCode::InvalidArgument, "nu2 and kurtosis parameters must be positive");
}

// 1 + 2 sum_t (h_t / nu^2)^a (1 - t/p)
double band_factor(const PlanInput& inp, int a) {
    double s = 0.0;
    for (std::size_t t = 1; t <= inp.h.size(); ++t)
        s += std::pow(inp.h[t - 1] / inp.nu2, a) * (1.0 - static_cast<double>(t) / inp.p);
    return 1.0 + 2.0 * s;
}

double kappa_ratio(const PlanInput& inp) {
    const double k1 = inp.kappa_x + inp.kappa_y;
    return (inp.kappa_x + inp.kappa_y - 2.0) / k1;
}

double rho_at(const PlanInput& inp, int a, double mt, double neff) {
    const double fa = std::pow(factorial(a), 1.0 / (2.0 * a));
    switch (inp.family) {
    case PlanFamily::Cov1:
        return std::sqrt(inp.kappa1) * fa * inp.nu2 * std::pow(mt, 1.0 / a) / std::sqrt(neff);
    case PlanFamily::Mean2:
        return fa * std::pow(mt, 1.0 / a) / std::sqrt(neff);
    case PlanFamily::Cov2: {
        const double k1 = inp.kappa_x + inp.kappa_y;
        const double kr = kappa_ratio(inp);
        return fa * std::sqrt(k1) * std::sqrt(inp.nu2) / std::sqrt(neff) * std::pow(mt, 1.0 / a) *
               std::pow(2.0 + std::pow(kr, a), 1.0 / (2.0 * a)) * std::pow(band_factor(inp, a), 1.0 / a);
    }
    }
    return 0.0;
}

}  // namespace

double m_tilde(const PlanInput& inp) {
    const double s = sparsity_count(inp);
    return inp.family == PlanFamily::Mean2 ? inp.M * std::sqrt(inp.p) / s : inp.M * inp.p / s;
}

double d_ratio(int a, const PlanInput& inp) {
    if (a < 1) fail(ErrorCode::InvalidArgument, "order must be >= 1");
    const double d1 = std::pow(a + 1.0, a) / factorial(a);
    if (inp.family != PlanFamily::Cov2) return d1;
    const double kr = kappa_ratio(inp);
    const double d2 = std::pow(2.0 + std::pow(kr, a + 1), a) / std::pow(2.0 + std::pow(kr, a), a + 1);
    const double d3 = std::pow(band_factor(inp, a + 1), 2.0 * a) / std::pow(band_factor(inp, a), 2.0 * (a + 1));
    return d1 * d2 * d3;
}

PowerPlan rho_curve(const PlanInput& inp, int a_max) {
    if (a_max < 1 || a_max > 12) fail(ErrorCode::InvalidArgument, "a_max must lie in 1..12");
    validate(inp);
    PowerPlan plan;
    plan.m_tilde = m_tilde(inp);
    plan.n_eff = effective_n(inp);
    double best = 0.0;
    for (int a = 1; a <= a_max; ++a) {
        const double r = rho_at(inp, a, plan.m_tilde, plan.n_eff);
        plan.orders.push_back(a);
        plan.rho.push_back(r);
        if (inp.family == PlanFamily::Cov1)
            plan.g.push_back(std::log(factorial(a)) / (2.0 * a) + std::log(plan.m_tilde) / a);
        if (a == 1 || r < best) {
            best = r;
            plan.a0 = a;
        }
    }
    const double m2 = plan.m_tilde * plan.m_tilde;
    if (plan.a0 == 1)
        plan.regime_note = "dense: the first order is best";
    else if (plan.a0 == a_max && d_ratio(a_max, inp) < m2)
        plan.regime_note = "sparse: the curve is still decreasing at the largest order considered";
    else
        plan.regime_note = "intermediate: an interior finite order is best";
    return plan;
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::FiniteOrderBetter: return "finite_order_better";
    case Verdict::MaxBetter: return "max_better";
    case Verdict::Boundary: return "boundary";
    }
    return "unknown";
}

double max_rate(const PowerPlan& plan, double p, double C) {
    return C * std::sqrt(std::log(p) / plan.n_eff);
}

Verdict compare_with_max(const PowerPlan& plan, double p, double C) {
    const double rf = plan.rho[plan.a0 - 1];
    const double ri = max_rate(plan, p, C);
    if (std::fabs(rf - ri) <= 0.01 * ri) return Verdict::Boundary;
    return rf < ri ? Verdict::FiniteOrderBetter : Verdict::MaxBetter;
}

}  // namespace ustat
