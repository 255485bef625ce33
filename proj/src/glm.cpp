#include "ustat/glm.hpp"

#include "ustat/error.hpp"
#include "ustat/mean.hpp"

#include <Eigen/QR>

#include <cmath>

namespace ustat {

namespace {

void validate(const GlmProblem& prob) {
    const Eigen::Index n = prob.x.n();
    if (prob.y.size() != n)
        fail(ErrorCode::DimensionMismatch, "response has " + std::to_string(prob.y.size()) + " entries but x has " +
                                               std::to_string(n) + " rows");
    if (!prob.y.allFinite()) fail(ErrorCode::InvalidResponse, "response contains NaN or Inf");
    if (prob.beta0.size() != 0 && prob.beta0.size() != prob.x.p())
        fail(ErrorCode::DimensionMismatch, "beta0 length does not match p");
    if (prob.z) {
        if (prob.z->rows() != n) fail(ErrorCode::DimensionMismatch, "nuisance matrix row count does not match x");
        if (prob.z->cols() < 1) fail(ErrorCode::Shape, "nuisance matrix has no columns");
        if (prob.z->cols() >= n) fail(ErrorCode::SingularDesign, "nuisance dimension must be below n");
        if (!prob.z->allFinite()) fail(ErrorCode::InvalidArgument, "nuisance matrix contains NaN or Inf");
    }
    if (prob.link == Link::Logit)
        for (Eigen::Index i = 0; i < n; ++i)
            if (prob.y[i] != 0.0 && prob.y[i] != 1.0)
                fail(ErrorCode::InvalidResponse, "logit link needs a 0/1 response (row " + std::to_string(i + 1) + ")");
}

double expit(double t) { return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t)); }

}  // namespace

ScoreMatrix fit_nuisance(const GlmProblem& prob) {
    validate(prob);
    const Eigen::Index n = prob.x.n();
    Eigen::VectorXd offset = Eigen::VectorXd::Zero(n);
    if (prob.beta0.size() != 0) offset = prob.x.values() * prob.beta0;

    ScoreMatrix out;
    if (prob.link == Link::Identity) {
        Eigen::VectorXd target = prob.y - offset;
        out.mu0 = offset;
        if (prob.z) {
            const Eigen::MatrixXd& z = *prob.z;
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
            if (qr.rank() < z.cols()) fail(ErrorCode::SingularDesign, "nuisance design is rank deficient");
            out.alpha = qr.solve(target);
            out.mu0 += z * out.alpha;
        }
    } else {
        Eigen::VectorXd eta = offset;
        if (prob.z) {
            const Eigen::MatrixXd& z = *prob.z;
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
            if (qr.rank() < z.cols()) fail(ErrorCode::SingularDesign, "nuisance design is rank deficient");
            Eigen::VectorXd alpha = Eigen::VectorXd::Zero(z.cols());
            bool converged = false;
            int it = 0;
            for (; it < 50; ++it) {
                Eigen::VectorXd lin = offset + z * alpha;
                Eigen::VectorXd mu = lin.unaryExpr(&expit);
                Eigen::VectorXd grad = z.transpose() * (prob.y - mu);
                if (grad.lpNorm<Eigen::Infinity>() < 1e-8) {
                    converged = true;
                    break;
                }
                Eigen::VectorXd wts = mu.array() * (1.0 - mu.array());
                Eigen::MatrixXd info = z.transpose() * wts.asDiagonal() * z;
                Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
                if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 1e-300).all())
                    fail(ErrorCode::NonConvergence, "logit fit: information matrix became singular (possible separation)");
                alpha += ldlt.solve(grad);
            }
            out.iterations = it;
            Eigen::VectorXd lin = offset + z * alpha;
            if (!converged || lin.cwiseAbs().maxCoeff() > 30.0)
                fail(ErrorCode::NonConvergence,
                     "logit fit did not converge in 50 Newton steps (fitted probabilities reach 0 or 1; the data may be separated)");
            out.alpha = alpha;
            eta = lin;
        }
        out.mu0 = eta.unaryExpr(&expit);
    }
    out.residual = prob.y - out.mu0;
    out.s = prob.x.values().array().colwise() * out.residual.array();
    return out;
}

std::vector<UStatResult> glm_u_stats(const ScoreMatrix& s, std::span<const int> orders, int threads) {
    DataMatrix m(s.s);
    return one_sample_u_stats(m, Eigen::VectorXd::Zero(s.s.cols()), orders, threads);
}

UStatResult glm_u_stat(const ScoreMatrix& s, int a) {
    int ord[1] = {a};
    return glm_u_stats(s, ord).front();
}

UStatResult glm_max_stat(const ScoreMatrix& s) {
    DataMatrix m(s.s);
    return one_sample_max(m, Eigen::VectorXd::Zero(s.s.cols()));
}

ScoreMatrix permute_residuals(const ScoreMatrix& s, const DataMatrix& x, const std::vector<int>& perm) {
    ScoreMatrix out;
    out.mu0 = s.mu0;
    out.alpha = s.alpha;
    out.residual.resize(s.residual.size());
    for (Eigen::Index i = 0; i < s.residual.size(); ++i) out.residual[i] = s.residual[perm[i]];
    out.s = x.values().array().colwise() * out.residual.array();
    return out;
}

}  // namespace ustat
