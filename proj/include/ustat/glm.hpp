#pragma once

#include "ustat/matrix.hpp"
#include "ustat/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ustat {

enum class Link { Identity, Logit };

struct GlmProblem {
    DataMatrix x;                  // n x p tested covariates
    std::optional<Eigen::MatrixXd> z;  // n x q nuisance covariates, 1 <= q < n
    Eigen::VectorXd y;             // response
    Link link = Link::Identity;
    Eigen::VectorXd beta0;         // length p; empty means zero
};

struct ScoreMatrix {
    Eigen::MatrixXd s;        // S_ij = (y_i - mu0_i) x_ij
    Eigen::VectorXd mu0;      // fitted null means
    Eigen::VectorXd alpha;    // nuisance estimate (empty without z)
    Eigen::VectorXd residual; // y - mu0
    int iterations = 0;       // Newton steps (logit)
};

// throws SingularDesign, NonConvergence, InvalidResponse, DimensionMismatch
ScoreMatrix fit_nuisance(const GlmProblem& prob);

// Same engine as the one-sample mean statistic on the score columns, mu0 = 0.
std::vector<UStatResult> glm_u_stats(const ScoreMatrix& s, std::span<const int> orders, int threads = 1);
UStatResult glm_u_stat(const ScoreMatrix& s, int a);
// max_j mean(S_j)^2 / sigma_jj
UStatResult glm_max_stat(const ScoreMatrix& s);

// Scores rebuilt after permuting the residuals (identity link).
ScoreMatrix permute_residuals(const ScoreMatrix& s, const DataMatrix& x, const std::vector<int>& perm);

}  // namespace ustat
