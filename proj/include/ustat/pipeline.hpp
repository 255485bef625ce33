#pragma once

#include "ustat/cov1.hpp"
#include "ustat/glm.hpp"
#include "ustat/inference.hpp"
#include "ustat/matrix.hpp"
#include "ustat/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ustat {

enum class Family { Cov1, Cov2, Mean1, Mean2, Glm };
enum class Calibration { Asymptotic, Permutation };

const char* family_name(Family f);
Family parse_family(const std::string& s);

struct TestConfig {
    Family family = Family::Cov1;
    std::vector<int> orders = default_gamma();
    Sided sided = Sided::Two;
    // finite orders; cov2 always uses permutation unless `elliptical` is set
    Calibration calib = Calibration::Asymptotic;
    // maximum-type statistic; cov2 ignores Asymptotic (no limit law available)
    Calibration max_calib = Calibration::Permutation;
    int perm_count = 200;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int threads = 1;
    MeanMode mean_mode = MeanMode::Unknown;
    MaxVariant max_variant = MaxVariant::MStar;
    Eigen::VectorXd mu0;  // mean1; empty means zero
    bool elliptical = false;  // cov2 variance from the elliptical approximation
    double kappa_x = 1.0;
    double kappa_y = 1.0;
    Link link = Link::Identity;
    Eigen::VectorXd beta0;  // glm; empty means zero
};

struct TestInput {
    std::optional<DataMatrix> x;  // cov1, mean1, glm covariates, first group
    std::optional<DataMatrix> y;  // second group
    std::optional<Eigen::MatrixXd> z;  // glm nuisance covariates
    Eigen::VectorXd response;     // glm
};

struct OrderOutcome {
    UStatResult stat;
    PValue p;
    double perm_mean = 0.0;  // filled when a permutation null was drawn
    double perm_sd = 0.0;
    bool has_perm = false;
};

struct TestReport {
    TestConfig config;
    std::vector<OrderOutcome> outcomes;  // aligned with config.orders
    AdaptiveResult adaptive;
    std::vector<std::string> warnings;
    Eigen::Index n = 0, p = 0;
};

// throws on invalid input; see Error codes
TestReport run_test(const TestInput& input, const TestConfig& cfg);

}  // namespace ustat
