#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ustat {

enum class PlanFamily { Cov1, Mean2, Cov2 };

struct PlanInput {
    PlanFamily family = PlanFamily::Cov1;
    double n = 100;   // cov1 sample size; cov2 total size when nx/ny are unset
    double nx = 0;    // mean2, cov2
    double ny = 0;
    double p = 100;
    // |J_A| (cov1), k0 (mean2) or |J_D| (cov2). For cov1, beta may be given
    // instead, meaning |J_A| = p^{2(1 - beta)}.
    std::optional<double> sparsity;
    std::optional<double> beta;
    double M = 4.0;
    double kappa1 = 1.0;  // cov1
    double nu2 = 1.0;     // nu^2
    double kappa_x = 1.0; // cov2
    double kappa_y = 1.0;
    std::vector<double> h;  // cov2 band values h_1..h_s
};

struct PowerPlan {
    std::vector<int> orders;
    std::vector<double> rho;
    std::vector<double> g;  // cov1 only: log of rho without the n, kappa, nu factors
    int a0 = 1;
    double m_tilde = 0.0;
    double n_eff = 0.0;
    std::string regime_note;
};

// throws InvalidSparsity, InvalidArgument (a_max outside 1..12)
PowerPlan rho_curve(const PlanInput& inp, int a_max = 6);
// cov1/mean2: (a+1)^a / a!; cov2: the product of the three ratio factors
double d_ratio(int a, const PlanInput& inp);
// M p / sparsity (cov1, cov2) or M sqrt(p) / k0 (mean2)
double m_tilde(const PlanInput& inp);

enum class Verdict { FiniteOrderBetter, MaxBetter, Boundary };
const char* verdict_name(Verdict v);
double max_rate(const PowerPlan& plan, double p, double C);
// rho_{a0} against C sqrt(log p / n_eff); within 1% is a boundary call
Verdict compare_with_max(const PowerPlan& plan, double p, double C);

}  // namespace ustat
