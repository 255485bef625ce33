#pragma once

#include "ustat/cov1.hpp"
#include "ustat/glm.hpp"
#include "ustat/matrix.hpp"
#include "ustat/pipeline.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ustat {

// Data generators.
//  Setting1   iid N(0,1) or standardized Gamma(2, 0.5) entries
//  Setting2   (1-rho) I + rho 1_{k0} 1_{k0}^T
//  Setting3   unit diagonal, `sparsity` ordered off-diagonal cells equal to rho
//             (placed as sparsity/2 symmetric pairs at random positions)
//  Setting4   as Setting3 with values uniform on (0, 2 rho); redrawn until PD
//  Setting5   x = Xi z + mu; null when rho == 0 (Xi = I, mu = 2)
//  QsNull     two samples, both BlkDiag(MA(1) theta=0.4 of size round(sqrt p), 0.7 I)
//  CovModel   two samples, Sigma_x = I, Sigma_y = I + H(tau0, tau1, r) for model 1..3
//  Glm        y = z alpha + x beta + eps, two N(0,1) nuisance covariates, alpha = 0.3,
//             eps ~ N(0, 0.5); floor(p * glm_s) entries of beta equal to glm_c
//  Mean1      x ~ N(mu, I), first k0 entries of mu equal to rho
//  Mean2      x ~ N(0, I), y ~ N(delta, I), first k0 entries of delta equal to rho
enum class Generator { Setting1, Setting2, Setting3, Setting4, Setting5, QsNull, CovModel, Glm, Mean1, Mean2 };
enum class Dist { Gaussian, Gamma };

const char* generator_name(Generator g);
Generator parse_generator(const std::string& s);  // "setting1".."setting5", "qs-null", "cov-model", "glm", "mean1", "mean2"
const char* dist_name(Dist d);
Dist parse_dist(const std::string& s);

struct Scenario {
    Generator generator = Generator::Setting1;
    Dist dist = Dist::Gaussian;
    int n = 100;
    int ny = 0;  // second group size; 0 means n
    int p = 50;
    double rho = 0.0;
    int k0 = 0;
    int sparsity = 0;  // |J_A|
    int model = 1;     // CovModel
    double glm_s = 0.0;
    double glm_c = 0.0;
    bool glm_ar = false;  // x covariance 0.4^{|i-j|} instead of I
    int reps = 500;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int threads = 1;
    // how each replicate is tested; family, alpha, seed and threads are set by run()
    TestConfig test;
};

// throws InvalidParameters
void validate(const Scenario& scn);
Family scenario_family(const Scenario& scn);

using Sample = std::variant<DataMatrix, GroupedSample, GlmProblem>;

// Deterministic in (scn.seed, replicate). throws NotPositiveDefinite, InvalidParameters
Sample generate(const Scenario& scn, std::uint64_t replicate);

// Population covariance used by the one-sample generators (Settings 1-5).
// `redraws` receives the Setting4 redraw count.
Eigen::MatrixXd population_cov(const Scenario& scn, int* redraws = nullptr);

// Symmetric square root; throws NotPositiveDefinite
Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& sigma);

struct MethodRate {
    std::string method;  // "U(1)".."U(6)", "U(inf)", "adpUmin", "adpUf"
    int rejections = 0;
    double rate = 0.0;
    double se = 0.0;
};

struct RejectionReport {
    Scenario scenario;
    std::vector<MethodRate> methods;
    int reps = 0;
    int redraws = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
    // per replicate p-values, columns aligned with methods
    std::vector<std::vector<double>> pvalues;
};

RejectionReport run(const Scenario& scn);

}  // namespace ustat
