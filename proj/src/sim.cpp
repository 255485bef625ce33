#include "ustat/sim.hpp"

#include "ustat/error.hpp"
#include "ustat/parallel.hpp"
#include "ustat/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace ustat {

const char* generator_name(Generator g) {
    switch (g) {
    case Generator::Setting1: return "setting1";
    case Generator::Setting2: return "setting2";
    case Generator::Setting3: return "setting3";
    case Generator::Setting4: return "setting4";
    case Generator::Setting5: return "setting5";
    case Generator::QsNull: return "qs-null";
    case Generator::CovModel: return "cov-model";
    case Generator::Glm: return "glm";
    case Generator::Mean1: return "mean1";
    case Generator::Mean2: return "mean2";
    }
    return "unknown";
}

Generator parse_generator(const std::string& s) {
    for (Generator g : {Generator::Setting1, Generator::Setting2, Generator::Setting3, Generator::Setting4,
                        Generator::Setting5, Generator::QsNull, Generator::CovModel, Generator::Glm, Generator::Mean1,
                        Generator::Mean2})
        if (s == generator_name(g)) return g;
    if (s.size() == 1 && s[0] >= '1' && s[0] <= '5') return static_cast<Generator>(s[0] - '1');
    fail(ErrorCode::InvalidParameters, "unknown generator '" + s + "'");
}

const char* dist_name(Dist d) { return d == Dist::Gaussian ? "gaussian" : "gamma"; }

Dist parse_dist(const std::string& s) {
    if (s == "gaussian") return Dist::Gaussian;
    if (s == "gamma") return Dist::Gamma;
    fail(ErrorCode::InvalidParameters, "unknown distribution '" + s + "' (expected gaussian or gamma)");
}

namespace {

constexpr std::uint64_t kTagData = 0x64617461ULL;
constexpr std::uint64_t kTagShape = 0x7368617065ULL;
constexpr std::uint64_t kTagTest = 0x74657374ULL;

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::InvalidParameters, msg); }

Eigen::MatrixXd normals(Eigen::Index rows, Eigen::Index cols, CounterRng& rng) {
    boost::random::normal_distribution<double> nd;
    Eigen::MatrixXd z(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) z(i, j) = nd(rng);
    return z;
}

// Gamma(shape, scale) shifted and scaled to mean 0, variance 1
Eigen::MatrixXd std_gammas(Eigen::Index rows, Eigen::Index cols, double shape, double scale, CounterRng& rng) {
    boost::random::gamma_distribution<double> gd(shape, scale);
    const double mu = shape * scale, sd = std::sqrt(shape) * scale;
    Eigen::MatrixXd z(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) z(i, j) = (gd(rng) - mu) / sd;
    return z;
}

bool is_pd(const Eigen::MatrixXd& s) {
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    return llt.info() == Eigen::Success;
}

// sparsity/2 distinct unordered off-diagonal pairs, deterministic in the stream
std::vector<std::pair<int, int>> random_pairs(int p, int count, CounterRng& rng) {
    std::set<std::pair<int, int>> seen;
    std::vector<std::pair<int, int>> out;
    while (static_cast<int>(out.size()) < count) {
        int a = static_cast<int>(uniform_below(rng, p));
        int b = static_cast<int>(uniform_below(rng, p));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (seen.insert({a, b}).second) out.emplace_back(a, b);
    }
    return out;
}

Eigen::MatrixXd ma1_block(int s, double theta) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(s, s) * (1.0 + theta * theta);
    for (int i = 0; i + 1 < s; ++i) a(i, i + 1) = a(i + 1, i) = theta;
    return a;
}

Eigen::MatrixXd qs_matrix(int p) {
    const int s = std::clamp(static_cast<int>(std::lround(std::sqrt(static_cast<double>(p)))), 1, p);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(p, p) * 0.7;
    q.topLeftCorner(s, s) = ma1_block(s, 0.4);
    return q;
}

// I + H(tau0, tau1, r)
Eigen::MatrixXd cov_model_matrix(int p, int model) {
    double t0, t1;
    int r;
    switch (model) {
    case 1: t0 = 0.04, t1 = 0.2, r = p; break;
    case 2: t0 = 1.0, t1 = 1.5, r = 2; break;
    case 3: t0 = 0.3, t1 = 0.3, r = std::max(2, p / 10); break;
    default: bad("cov-model must be 1, 2 or 3");
    }
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(p, p);
    for (int i = 0; i < r; ++i) s(i, i) += t0;
    for (int i = 0; i + 1 < r; ++i) s(i, i + 1) = s(i + 1, i) = t1;
    return s;
}

Eigen::MatrixXd ar_matrix(int p, double phi) {
    Eigen::MatrixXd s(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) s(i, j) = std::pow(phi, std::abs(i - j));
    return s;
}

Eigen::VectorXd glm_beta(const Scenario& scn) {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(scn.p);
    const int k = static_cast<int>(std::floor(scn.p * scn.glm_s));
    if (k == 0 || scn.glm_c == 0.0) return beta;
    CounterRng rng(derive_seed(scn.seed, kTagShape));
    auto perm = random_permutation(scn.p, rng);
    for (int i = 0; i < k; ++i) beta[perm[i]] = scn.glm_c;
    return beta;
}

}  // namespace

Family scenario_family(const Scenario& scn) {
    switch (scn.generator) {
    case Generator::QsNull:
    case Generator::CovModel: return Family::Cov2;
    case Generator::Glm: return Family::Glm;
    case Generator::Mean1: return Family::Mean1;
    case Generator::Mean2: return Family::Mean2;
    default: return Family::Cov1;
    }
}

void validate(const Scenario& scn) {
    if (scn.reps < 1) bad("reps must be at least 1");
    if (!(scn.alpha > 0.0 && scn.alpha <= 1.0)) bad("alpha must lie in (0, 1]");
    if (scn.n < 2) bad("n must be at least 2");
    if (scn.ny != 0 && scn.ny < 2) bad("ny must be at least 2");
    if (scn.p < 2) bad("p must be at least 2");
    if (!std::isfinite(scn.rho)) bad("rho must be finite");
    switch (scn.generator) {
    case Generator::Setting1: break;
    case Generator::Setting2:
        if (scn.k0 < 0 || scn.k0 > scn.p) bad("k0 must lie in 0..p");
        if (!(scn.rho > -1.0 && scn.rho < 1.0)) bad("setting 2 needs rho in (-1, 1)");
        break;
    case Generator::Setting3:
    case Generator::Setting4: {
        const double cells = static_cast<double>(scn.p) * (scn.p - 1);
        if (scn.sparsity < 0 || scn.sparsity > cells) bad("|J_A| must lie in 0..p(p-1)");
        if (scn.sparsity % 2) bad("|J_A| counts ordered off-diagonal cells and must be even");
        if (scn.generator == Generator::Setting4 && scn.rho < 0.0) bad("setting 4 needs rho >= 0");
        break;
    }
    case Generator::Setting5:
        if (!(scn.rho >= 0.0 && scn.rho <= 1.0)) bad("setting 5 needs rho in [0, 1]");
        break;
    case Generator::QsNull: break;
    case Generator::CovModel:
        if (scn.model < 1 || scn.model > 3) bad("cov-model must be 1, 2 or 3");
        break;
    case Generator::Glm:
        if (!(scn.glm_s >= 0.0 && scn.glm_s <= 1.0)) bad("glm sparsity s must lie in [0, 1]");
        if (scn.n <= 3) bad("glm needs n > 3");
        break;
    case Generator::Mean1:
    case Generator::Mean2:
        if (scn.k0 < 0 || scn.k0 > scn.p) bad("k0 must lie in 0..p");
        break;
    }
    if (scn.dist == Dist::Gamma && scn.generator != Generator::Setting1 && scn.generator != Generator::Setting5)
        bad("the gamma distribution is available for settings 1 and 5 only");
}

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& sigma) {
    if (!is_pd(sigma)) fail(ErrorCode::NotPositiveDefinite, "covariance matrix is not positive definite");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    return es.operatorSqrt();
}

Eigen::MatrixXd population_cov(const Scenario& scn, int* redraws) {
    validate(scn);
    const int p = scn.p;
    if (redraws) *redraws = 0;
    switch (scn.generator) {
    case Generator::Setting1: return Eigen::MatrixXd::Identity(p, p);
    case Generator::Setting2: {
        Eigen::VectorXd one = Eigen::VectorXd::Zero(p);
        one.head(scn.k0).setOnes();
        Eigen::MatrixXd s = (1.0 - scn.rho) * Eigen::MatrixXd::Identity(p, p) + scn.rho * one * one.transpose();
        // the first k0 diagonal entries equal one; the rest 1 - rho
        if (!is_pd(s)) fail(ErrorCode::NotPositiveDefinite, "setting 2 covariance is not positive definite");
        return s;
    }
    case Generator::Setting3:
    case Generator::Setting4: {
        CounterRng rng(derive_seed(scn.seed, kTagShape));
        boost::random::uniform_real_distribution<double> ud(0.0, 2.0 * scn.rho);
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Eigen::MatrixXd s = Eigen::MatrixXd::Identity(p, p);
            for (auto [a, b] : random_pairs(p, scn.sparsity / 2, rng)) {
                const double v = scn.generator == Generator::Setting3 ? scn.rho : ud(rng);
                s(a, b) = s(b, a) = v;
            }
            if (is_pd(s)) return s;
            if (scn.generator == Generator::Setting3)
                fail(ErrorCode::NotPositiveDefinite, "setting 3 covariance is not positive definite; lower rho or |J_A|");
            if (redraws) ++*redraws;
        }
        fail(ErrorCode::NotPositiveDefinite, "setting 4 covariance stayed indefinite after 1000 redraws");
    }
    case Generator::Setting5: {
        Eigen::MatrixXd s = (1.0 - scn.rho) * Eigen::MatrixXd::Identity(p, p);
        s.array() += 2.0 * scn.rho;
        return s;
    }
    default: fail(ErrorCode::InvalidParameters, "population_cov applies to settings 1-5");
    }
}

namespace {

// square root of the covariance a generator multiplies by; empty when none
Eigen::MatrixXd scenario_root(const Scenario& scn) {
    switch (scn.generator) {
    case Generator::Setting2:
    case Generator::Setting3:
    case Generator::Setting4: return sym_sqrt(population_cov(scn));
    case Generator::QsNull: return sym_sqrt(qs_matrix(scn.p));
    case Generator::CovModel: return sym_sqrt(cov_model_matrix(scn.p, scn.model));
    case Generator::Glm: return scn.glm_ar ? sym_sqrt(ar_matrix(scn.p, 0.4)) : Eigen::MatrixXd();
    default: return {};
    }
}

Sample draw_sample(const Scenario& scn, std::uint64_t replicate, const Eigen::MatrixXd& root,
                   const Eigen::VectorXd& beta) {
    const int n = scn.n, p = scn.p;
    CounterRng rng(derive_seed(derive_seed(scn.seed, kTagData), replicate));
    switch (scn.generator) {
    case Generator::Setting1:
        return DataMatrix(scn.dist == Dist::Gaussian ? normals(n, p, rng) : std_gammas(n, p, 2.0, 0.5, rng));
    case Generator::Setting2:
    case Generator::Setting3:
    case Generator::Setting4: return DataMatrix(normals(n, p, rng) * root);
    case Generator::Setting5: {
        const bool alt = scn.rho > 0.0;
        const int m = alt ? p + 1 : p;
        Eigen::MatrixXd z = scn.dist == Dist::Gaussian ? normals(n, m, rng) : std_gammas(n, m, 4.0, 0.5, rng);
        if (!alt) return DataMatrix((z.array() + 2.0).matrix());
        const double a = std::sqrt(1.0 - scn.rho), b = std::sqrt(2.0 * scn.rho);
        Eigen::MatrixXd x = a * z.leftCols(p);
        x.colwise() += b * z.col(p);
        x.array() += 2.0 * (a + b);
        return DataMatrix(std::move(x));
    }
    case Generator::QsNull: {
        const int ny = scn.ny ? scn.ny : n;
        Eigen::MatrixXd x = normals(n, p, rng) * root;
        Eigen::MatrixXd y = normals(ny, p, rng) * root;
        return GroupedSample(DataMatrix(std::move(x)), DataMatrix(std::move(y)));
    }
    case Generator::CovModel: {
        const int ny = scn.ny ? scn.ny : n;
        Eigen::MatrixXd x = normals(n, p, rng);
        Eigen::MatrixXd y = normals(ny, p, rng) * root;
        return GroupedSample(DataMatrix(std::move(x)), DataMatrix(std::move(y)));
    }
    case Generator::Glm: {
        Eigen::MatrixXd x = normals(n, p, rng);
        if (scn.glm_ar) x = x * root;
        Eigen::MatrixXd z = normals(n, 2, rng);
        Eigen::VectorXd eps = normals(n, 1, rng).col(0) * std::sqrt(0.5);
        Eigen::VectorXd y = z * Eigen::Vector2d(0.3, 0.3) + x * beta + eps;
        GlmProblem prob{DataMatrix(std::move(x)), std::move(z), std::move(y), Link::Identity, {}};
        return prob;
    }
    case Generator::Mean1: {
        Eigen::MatrixXd x = normals(n, p, rng);
        x.leftCols(scn.k0).array() += scn.rho;
        return DataMatrix(std::move(x));
    }
    case Generator::Mean2: {
        const int ny = scn.ny ? scn.ny : n;
        Eigen::MatrixXd x = normals(n, p, rng);
        Eigen::MatrixXd y = normals(ny, p, rng);
        y.leftCols(scn.k0).array() += scn.rho;
        return GroupedSample(DataMatrix(std::move(x)), DataMatrix(std::move(y)));
    }
    }
    fail(ErrorCode::InvalidParameters, "unknown generator");
}

}  // namespace

Sample generate(const Scenario& scn, std::uint64_t replicate) {
    validate(scn);
    return draw_sample(scn, replicate, scenario_root(scn), glm_beta(scn));
}

RejectionReport run(const Scenario& scn) {
    validate(scn);
    const auto t0 = std::chrono::steady_clock::now();
    RejectionReport rep;
    rep.scenario = scn;
    rep.reps = scn.reps;

    TestConfig cfg = scn.test;
    cfg.family = scenario_family(scn);
    cfg.alpha = scn.alpha;
    cfg.threads = 1;

    if (scn.generator >= Generator::Setting2 && scn.generator <= Generator::Setting4)
        population_cov(scn, &rep.redraws);
    const Eigen::MatrixXd root = scenario_root(scn);
    const Eigen::VectorXd beta = glm_beta(scn);
    if (scn.generator == Generator::Setting4 && rep.redraws > 0)
        rep.warnings.push_back("setting 4 covariance redrawn " + std::to_string(rep.redraws) +
                               " times to reach positive definiteness");

    for (int o : cfg.orders) rep.methods.push_back({"U(" + order_name(o) + ")"});
    rep.methods.push_back({"adpUmin"});
    rep.methods.push_back({"adpUf"});
    const std::size_t nm = rep.methods.size();

    rep.pvalues.assign(scn.reps, std::vector<double>(nm, 1.0));
    std::vector<std::vector<std::string>> warns(scn.reps);
    const std::uint64_t test_base = derive_seed(scn.seed, kTagTest);

    parallel_for(static_cast<std::size_t>(scn.reps), scn.threads, [&](std::size_t r) {
        Sample s = draw_sample(scn, r, root, beta);
        TestInput in;
        if (auto* m = std::get_if<DataMatrix>(&s)) {
            in.x = *m;
        } else if (auto* g = std::get_if<GroupedSample>(&s)) {
            in.x = g->x;
            in.y = g->y;
        } else {
            auto& prob = std::get<GlmProblem>(s);
            in.x = prob.x;
            in.z = prob.z;
            in.response = prob.y;
        }
        TestConfig c = cfg;
        c.seed = derive_seed(test_base, r);
        TestReport tr = run_test(in, c);
        auto& row = rep.pvalues[r];
        for (std::size_t k = 0; k < tr.outcomes.size(); ++k) row[k] = tr.outcomes[k].p.value;
        row[nm - 2] = tr.adaptive.p_min_combined;
        row[nm - 1] = tr.adaptive.p_fisher_combined;
        warns[r] = tr.warnings;
    });

    for (std::size_t k = 0; k < nm; ++k) {
        auto& mr = rep.methods[k];
        for (int r = 0; r < scn.reps; ++r)
            if (rep.pvalues[r][k] <= scn.alpha) ++mr.rejections;
        mr.rate = static_cast<double>(mr.rejections) / scn.reps;
        mr.se = std::sqrt(mr.rate * (1.0 - mr.rate) / scn.reps);
    }
    for (const auto& w : warns)
        for (const auto& s : w)
            if (std::find(rep.warnings.begin(), rep.warnings.end(), s) == rep.warnings.end()) rep.warnings.push_back(s);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace ustat
