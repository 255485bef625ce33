#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "check.hpp"
#include "oracles.hpp"
#include "ustat/mean.hpp"

using namespace ustat;

TEST_CASE("one-sample statistic matches the definition") {
    std::mt19937_64 g(1);
    for (int rep = 0; rep < 40; ++rep) {
        int n = 3 + static_cast<int>(g() % 6), p = 2 + static_cast<int>(g() % 3);
        auto x = oracle::random_matrix(g, n, p);
        Eigen::VectorXd mu0 = Eigen::VectorXd::Random(p);
        for (int a = 1; a <= 3; ++a) {
            auto r = one_sample_u(DataMatrix(x), mu0, a);
            CHECK(oracle::rel_err(r.value, oracle::mean1_u(x, mu0, a)) < 1e-9);
            CHECK(oracle::rel_err(r.variance, oracle::mean1_variance(x, a)) < 1e-9);
        }
    }
}

TEST_CASE("two-sample statistic matches the definition") {
    std::mt19937_64 g(2);
    for (int rep = 0; rep < 25; ++rep) {
        int nx = 3 + static_cast<int>(g() % 4), ny = 3 + static_cast<int>(g() % 4);
        auto x = oracle::random_matrix(g, nx, 3);
        auto y = oracle::random_matrix(g, ny, 3);
        y.array() += 0.7;
        GroupedSample gs{DataMatrix(x), DataMatrix(y)};
        for (int a = 1; a <= 3; ++a)
            CHECK(oracle::rel_err(two_sample_u(gs, a).value, oracle::mean2_u(x, y, a)) < 1e-9);
    }
}

TEST_CASE("two-sample variance") {
    std::mt19937_64 g(3);
    auto x = oracle::random_matrix(g, 6, 3), y = oracle::random_matrix(g, 5, 3);
    const int a = 2;
    auto cx = oracle::center(x), cy = oracle::center(y);
    double want = 0.0;
    for (int j1 = 0; j1 < 3; ++j1)
        for (int j2 = 0; j2 < 3; ++j2)
            for (int c = 0; c <= a; ++c) {
                double ex = oracle::distinct_sum(oracle::col_product(cx, j1, j2), c) / oracle::falling(6, c);
                double ey = oracle::distinct_sum(oracle::col_product(cy, j1, j2), a - c) / oracle::falling(5, a - c);
                want += oracle::choose(a, c) * ex * ey / (oracle::falling(6, c) * oracle::falling(5, a - c));
            }
    want *= oracle::fact(a);
    CHECK(oracle::rel_err(two_sample_u(GroupedSample{DataMatrix(x), DataMatrix(y)}, a).variance, want) < 1e-9);
}

TEST_CASE("two-sample statistic ignores a common shift") {
    std::mt19937_64 g(4);
    auto x = oracle::random_matrix(g, 20, 5), y = oracle::random_matrix(g, 15, 5);
    Eigen::RowVectorXd d = Eigen::RowVectorXd::Constant(5, 50.0);
    Eigen::MatrixXd x2 = x.rowwise() + d, y2 = y.rowwise() + d;
    for (int a = 1; a <= 6; ++a) {
        double u0 = two_sample_u(GroupedSample{DataMatrix(x), DataMatrix(y)}, a).value;
        double u1 = two_sample_u(GroupedSample{DataMatrix(x2), DataMatrix(y2)}, a).value;
        CHECK(u1 == doctest::Approx(u0).epsilon(1e-6));
    }
}

TEST_CASE("one-sample order 2 is unbiased for the squared norm") {
    std::mt19937_64 g(5);
    const int n = 15, p = 4, reps = 4000;
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(p, 0.5);
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        Eigen::MatrixXd x = oracle::random_matrix(g, n, p).rowwise() + mu.transpose();
        double v = one_sample_u(DataMatrix(x), Eigen::VectorXd::Zero(p), 2).value;
        sum += v;
        sum2 += v * v;
    }
    double m = sum / reps, se = std::sqrt((sum2 / reps - m * m) / reps);
    CHECK(std::fabs(m - p * 0.25) < 3.5 * se);
}

TEST_CASE("maxima") {
    Eigen::MatrixXd x(4, 3);
    x << 1, 0, 2, 2, 0, 2, 3, 1, 2.5, 4, 1, 2.5;
    auto r = one_sample_max(DataMatrix(x), Eigen::VectorXd::Zero(3));
    // column 3: mean 2.25, variance 0.0625 gives 81
    CHECK(r.value == doctest::Approx(81.0));
    CHECK(r.arg1 == 2);

    Eigen::MatrixXd y = x;
    y.col(0).array() += 1.0;
    auto t = two_sample_max(GroupedSample{DataMatrix(x), DataMatrix(y)});
    // column 1 differs by 1, pooled variance 1.25
    CHECK(t.value == doctest::Approx(1.0 / 1.25));
    CHECK(t.arg1 == 0);
}

TEST_CASE("sigma power totals entry 0 is p squared") {
    std::mt19937_64 g(6);
    auto tot = sigma_power_totals(oracle::random_matrix(g, 10, 4), 3);
    CHECK(tot[0] == doctest::Approx(16.0));
}

TEST_CASE("errors") {
    std::mt19937_64 g(7);
    DataMatrix m(oracle::random_matrix(g, 4, 3));
    CHECK_CODE(one_sample_u(m, Eigen::VectorXd::Zero(2), 1), ErrorCode::DimensionMismatch);
    CHECK_CODE(one_sample_u(m, Eigen::VectorXd::Zero(3), 5), ErrorCode::OrderExceedsSampleSize);
    Eigen::MatrixXd c = Eigen::MatrixXd::Ones(5, 3);
    CHECK_CODE(one_sample_max(DataMatrix(c), Eigen::VectorXd::Zero(3)), ErrorCode::DegenerateColumn);
}
