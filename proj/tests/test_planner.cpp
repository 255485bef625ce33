#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "check.hpp"
#include "oracles.hpp"
#include "ustat/planner.hpp"

using namespace ustat;

static PlanInput cov1(double p, double beta, double M = 4.0, double n = 100) {
    PlanInput in;
    in.family = PlanFamily::Cov1;
    in.p = p;
    in.n = n;
    in.M = M;
    in.beta = beta;
    return in;
}

// log rho_a without constant factors, evaluated directly
static double g_direct(int a, double M, double p, double beta) {
    return std::log(oracle::fact(a)) / (2.0 * a) + std::log(M * std::pow(p, 2 * beta - 1)) / a;
}

TEST_CASE("discriminant") {
    PlanInput in;
    CHECK(d_ratio(1, in) == doctest::Approx(2.0));
    CHECK(d_ratio(2, in) == doctest::Approx(4.5));
    for (int a = 1; a < 12; ++a) CHECK(d_ratio(a + 1, in) > d_ratio(a, in));
    CHECK_CODE(d_ratio(0, in), ErrorCode::InvalidArgument);
}

TEST_CASE("dense cov1 picks the first order") {
    CHECK(rho_curve(cov1(100, 0.1)).a0 == 1);
    CHECK(rho_curve(cov1(10000, 0.1)).a0 == 1);
}

TEST_CASE("g curve follows the closed form") {
    for (double beta : {0.1, 0.3, 0.45, 0.6, 0.9}) {
        auto plan = rho_curve(cov1(100, beta), 8);
        int best = 1;
        for (int a = 1; a <= 8; ++a) {
            CHECK(plan.g[a - 1] == doctest::Approx(g_direct(a, 4, 100, beta)).epsilon(1e-12));
            if (g_direct(a, 4, 100, beta) < g_direct(best, 4, 100, beta)) best = a;
            // rho = sqrt(kappa1) nu^2 exp(g) / sqrt(n)
            CHECK(plan.rho[a - 1] == doctest::Approx(std::exp(plan.g[a - 1]) / 10.0).epsilon(1e-12));
        }
        CHECK(plan.a0 == best);
    }
}

TEST_CASE("mean2 with many signals picks the first order") {
    PlanInput in;
    in.family = PlanFamily::Mean2;
    in.nx = 50;
    in.ny = 60;
    in.p = 400;
    in.sparsity = 4 * 20.0;
    auto plan = rho_curve(in);
    CHECK(plan.a0 == 1);
    CHECK(plan.n_eff == doctest::Approx(50.0 * 60.0 / 110.0));
    double want = std::sqrt(110.0 / 3000.0) * std::pow(2.0, 0.25) * std::sqrt(4.0 * 20.0 / 80.0);
    CHECK(plan.rho[1] == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("unimodal curves and monotone a0") {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 300; ++rep) {
        PlanInput in;
        int fam = static_cast<int>(g() % 3);
        in.family = static_cast<PlanFamily>(fam);
        in.p = 10 + std::floor(u(g) * 5000);
        in.n = 20 + std::floor(u(g) * 500);
        in.nx = in.n;
        in.ny = in.n + 7;
        in.M = 0.5 + 8 * u(g);
        const double cap = in.family == PlanFamily::Mean2 ? in.p : in.p * in.p;
        in.sparsity = std::max(1.0, std::floor(u(g) * cap));
        if (in.family == PlanFamily::Cov2) {
            in.kappa_x = 1 + u(g);
            in.kappa_y = 1 + u(g);
            in.h = {0.3 * u(g), 0.2 * u(g)};
        }
        auto plan = rho_curve(in, 12);
        bool rising = false;
        for (int a = 1; a < 12; ++a) {
            if (rising) CHECK(plan.rho[a] > plan.rho[a - 1]);
            if (plan.rho[a] >= plan.rho[a - 1]) rising = true;
        }
    }
    int prev = 0;
    for (double beta = 0.05; beta < 0.96; beta += 0.05) {
        int a0 = rho_curve(cov1(100, beta), 12).a0;
        CHECK(a0 >= prev);
        prev = a0;
    }
    CHECK(prev > 1);
}

TEST_CASE("comparison with the maximum") {
    PlanInput sparse;
    sparse.family = PlanFamily::Cov1;
    sparse.p = 10000;
    sparse.sparsity = 2;
    auto ps = rho_curve(sparse);
    CHECK(compare_with_max(ps, 10000, 2.0) == Verdict::MaxBetter);

    PlanInput dense = sparse;
    dense.sparsity = 10000.0 * 10000.0 / 4;
    auto pd = rho_curve(dense);
    CHECK(compare_with_max(pd, 10000, 2.0) == Verdict::FiniteOrderBetter);

    // pick C so the two rates coincide
    double c = pd.rho[pd.a0 - 1] / std::sqrt(std::log(10000.0) / pd.n_eff);
    CHECK(compare_with_max(pd, 10000, c) == Verdict::Boundary);
    CHECK(std::string(verdict_name(Verdict::MaxBetter)) == "max_better");
}

TEST_CASE("bad inputs") {
    PlanInput in;
    in.p = 10;
    in.sparsity = 101;
    CHECK_CODE(rho_curve(in), ErrorCode::InvalidSparsity);
    in.sparsity = 0;
    CHECK_CODE(rho_curve(in), ErrorCode::InvalidSparsity);
    in.sparsity = std::nullopt;
    CHECK_CODE(rho_curve(in), ErrorCode::InvalidSparsity);
    in.sparsity = 5;
    CHECK_CODE(rho_curve(in, 13), ErrorCode::InvalidArgument);
    in.M = 0;
    CHECK_CODE(rho_curve(in), ErrorCode::InvalidArgument);
    CHECK_CODE(rho_curve(cov1(100, 1.0)), ErrorCode::InvalidSparsity);
}
