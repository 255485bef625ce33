#include "ustat/pipeline.hpp"

#include "ustat/cov2.hpp"
#include "ustat/error.hpp"
#include "ustat/mean.hpp"
#include "ustat/parallel.hpp"
#include "ustat/power_sums.hpp"
#include "ustat/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ustat {

const char* family_name(Family f) {
    switch (f) {
    case Family::Cov1: return "cov1";
    case Family::Cov2: return "cov2";
    case Family::Mean1: return "mean1";
    case Family::Mean2: return "mean2";
    case Family::Glm: return "glm";
    }
    return "unknown";
}

Family parse_family(const std::string& s) {
    if (s == "cov1") return Family::Cov1;
    if (s == "cov2") return Family::Cov2;
    if (s == "mean1") return Family::Mean1;
    if (s == "mean2") return Family::Mean2;
    if (s == "glm") return Family::Glm;
    fail(ErrorCode::InvalidArgument, "unknown family '" + s + "' (expected cov1, cov2, mean1, mean2 or glm)");
}

namespace {

// stream tags so that different permutation uses never share draws
constexpr std::uint64_t kTagFinite = 0x66696e697465ULL;
constexpr std::uint64_t kTagMax = 0x6d6178ULL;

struct Draws {
    int width = 0;
    int count = 0;
    std::vector<double> v;  // [b * width + k]
    double at(int b, int k) const { return v[static_cast<std::size_t>(b) * width + k]; }
    std::vector<double> column(int k) const {
        std::vector<double> c(count);
        for (int b = 0; b < count; ++b) c[b] = at(b, k);
        return c;
    }
};

Draws draw(int count, std::uint64_t seed, int threads, int width,
           const std::function<void(CounterRng&, double*)>& f) {
    Draws d;
    d.width = width;
    d.count = count;
    d.v.assign(static_cast<std::size_t>(count) * width, 0.0);
    parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t b) {
        CounterRng rng(derive_seed(seed, b));
        f(rng, d.v.data() + b * width);
    });
    return d;
}

double mean_of(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()) / v.size(); }

double sd_of(const std::vector<double>& v, double m) {
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
}

// p-value of a finite order against its permutation draws; two-sided
// compares distances from the permutation mean
void finite_perm_outcome(OrderOutcome& oc, const std::vector<double>& draws, Sided sided) {
    oc.has_perm = true;
    oc.perm_mean = mean_of(draws);
    oc.perm_sd = sd_of(draws, oc.perm_mean);
    if (sided == Sided::Upper) {
        oc.p = permutation_pvalue(oc.stat.value, draws, Sided::Upper);
    } else {
        std::vector<double> dev(draws.size());
        for (std::size_t b = 0; b < draws.size(); ++b) dev[b] = draws[b] - oc.perm_mean;
        oc.p = permutation_pvalue(oc.stat.value - oc.perm_mean, dev, Sided::Two);
    }
}

void max_perm_outcome(OrderOutcome& oc, const std::vector<double>& draws) {
    oc.has_perm = true;
    oc.perm_mean = mean_of(draws);
    oc.perm_sd = sd_of(draws, oc.perm_mean);
    oc.p = permutation_pvalue(oc.stat.value, draws, Sided::Upper);
}

const DataMatrix& need(const std::optional<DataMatrix>& m, const char* what, Family f) {
    if (!m) fail(ErrorCode::InvalidArgument, std::string(family_name(f)) + " needs " + what);
    return *m;
}

DataMatrix permute_columns(const Eigen::MatrixXd& x, CounterRng& rng) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd out(n, x.cols());
    out.col(0) = x.col(0);
    for (Eigen::Index j = 1; j < x.cols(); ++j) {
        auto perm = random_permutation(static_cast<int>(n), rng);
        for (Eigen::Index i = 0; i < n; ++i) out(i, j) = x(perm[i], j);
    }
    return DataMatrix(std::move(out));
}

GroupedSample relabel(const Eigen::MatrixXd& pooled, Eigen::Index nx, CounterRng& rng) {
    const Eigen::Index nt = pooled.rows(), p = pooled.cols();
    auto perm = random_permutation(static_cast<int>(nt), rng);
    Eigen::MatrixXd xb(nx, p), yb(nt - nx, p);
    for (Eigen::Index i = 0; i < nx; ++i) xb.row(i) = pooled.row(perm[i]);
    for (Eigen::Index i = nx; i < nt; ++i) yb.row(i - nx) = pooled.row(perm[i]);
    return GroupedSample(DataMatrix(std::move(xb)), DataMatrix(std::move(yb)));
}

std::vector<double> values_of(const std::vector<UStatResult>& r) {
    std::vector<double> v;
    for (const auto& s : r) v.push_back(s.value);
    return v;
}

void validate_config(const TestConfig& cfg) {
    if (cfg.orders.empty()) fail(ErrorCode::EmptySet, "no orders requested");
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
    if (cfg.perm_count < 100) fail(ErrorCode::InvalidArgument, "permutation count must be at least 100");
}

}  // namespace

TestReport run_test(const TestInput& input, const TestConfig& cfg) {
    validate_config(cfg);
    TestReport rep;
    rep.config = cfg;
    std::vector<int> finite;
    bool has_inf = false;
    for (int o : cfg.orders) {
        if (o == kInfOrder) has_inf = true;
        else finite.push_back(o);
    }
    const bool finite_perm = cfg.calib == Calibration::Permutation;
    const bool max_perm = cfg.max_calib == Calibration::Permutation || cfg.family == Family::Cov2;
    const std::uint64_t seed_f = derive_seed(cfg.seed, kTagFinite);
    const std::uint64_t seed_m = derive_seed(cfg.seed, kTagMax);
    const int nf = static_cast<int>(finite.size());

    std::vector<OrderOutcome> fin(nf);
    OrderOutcome inf;

    // recompute(rng, out) fills nf finite values (when finite_perm) then the max (when has_inf && max_perm)
    std::function<void(CounterRng&, double*)> recompute;
    int width = (finite_perm ? nf : 0) + (has_inf && max_perm ? 1 : 0);

    switch (cfg.family) {
    case Family::Cov1: {
        const DataMatrix& x = need(input.x, "a data matrix", cfg.family);
        rep.n = x.n();
        rep.p = x.p();
        if (nf) {
            auto st = cov1_u_stats(x, finite, cfg.mean_mode, cfg.threads);
            for (int k = 0; k < nf; ++k) fin[k].stat = st[k];
        }
        if (has_inf) inf.stat = max_stat(x, cfg.max_variant);
        if (finite_perm && nf) {
            auto d = draw(cfg.perm_count, seed_f, cfg.threads, nf, [&](CounterRng& rng, double* out) {
                auto st = cov1_u_stats(permute_columns(x.values(), rng), finite, cfg.mean_mode, 1);
                for (int k = 0; k < nf; ++k) out[k] = st[k].value;
            });
            for (int k = 0; k < nf; ++k) finite_perm_outcome(fin[k], d.column(k), cfg.sided);
        }
        if (has_inf) {
            if (max_perm)
                max_perm_outcome(inf, max_permutation_draws(x, cfg.max_variant, cfg.perm_count, seed_m, cfg.threads));
            else
                inf.p = gumbel_cov_pvalue(inf.stat.value, static_cast<double>(x.n()), static_cast<double>(x.p()));
        }
        break;
    }
    case Family::Mean1: {
        const DataMatrix& x = need(input.x, "a data matrix", cfg.family);
        rep.n = x.n();
        rep.p = x.p();
        Eigen::VectorXd mu0 = cfg.mu0;
        if (mu0.size() == 0) mu0 = Eigen::VectorXd::Zero(x.p());
        if (mu0.size() != x.p()) fail(ErrorCode::DimensionMismatch, "mu0 length does not match p");
        if (nf) {
            auto st = one_sample_u_stats(x, mu0, finite, cfg.threads);
            for (int k = 0; k < nf; ++k) fin[k].stat = st[k];
        }
        if (has_inf) inf.stat = one_sample_max(x, mu0);
        const Eigen::MatrixXd dev = x.values().rowwise() - mu0.transpose();
        recompute = [dev, &finite, finite_perm, nf, has_inf, max_perm](CounterRng& rng, double* out) {
            Eigen::MatrixXd flipped = dev;
            for (Eigen::Index i = 0; i < flipped.rows(); ++i)
                if (rng() >> 63) flipped.row(i) = -flipped.row(i);
            DataMatrix fm(std::move(flipped));
            Eigen::VectorXd zero = Eigen::VectorXd::Zero(fm.p());
            int k = 0;
            if (finite_perm && nf)
                for (double v : values_of(one_sample_u_stats(fm, zero, finite, 1))) out[k++] = v;
            if (has_inf && max_perm) out[k] = one_sample_max(fm, zero).value;
        };
        if (has_inf && !max_perm)
            inf.p = gumbel_mean_pvalue(inf.stat.value, static_cast<double>(x.n()), static_cast<double>(x.p()));
        break;
    }
    case Family::Mean2: {
        GroupedSample g(need(input.x, "two samples", cfg.family), need(input.y, "two samples", cfg.family));
        rep.n = g.x.n() + g.y.n();
        rep.p = g.x.p();
        if (nf) {
            auto st = two_sample_u_stats(g, finite, cfg.threads);
            for (int k = 0; k < nf; ++k) fin[k].stat = st[k];
        }
        if (has_inf) inf.stat = two_sample_max(g);
        Eigen::MatrixXd pooled(rep.n, rep.p);
        pooled << g.x.values(), g.y.values();
        const Eigen::Index nx = g.x.n();
        recompute = [pooled, nx, &finite, finite_perm, nf, has_inf, max_perm](CounterRng& rng, double* out) {
            GroupedSample gb = relabel(pooled, nx, rng);
            int k = 0;
            if (finite_perm && nf)
                for (double v : values_of(two_sample_u_stats(gb, finite, 1))) out[k++] = v;
            if (has_inf && max_perm) out[k] = two_sample_max(gb).value;
        };
        if (has_inf && !max_perm) {
            const double nxd = static_cast<double>(g.x.n()), nyd = static_cast<double>(g.y.n());
            inf.p = gumbel_mean_pvalue(inf.stat.value, nxd * nyd / (nxd + nyd), static_cast<double>(g.x.p()));
        }
        break;
    }
    case Family::Glm: {
        GlmProblem prob{need(input.x, "covariates", cfg.family), input.z, input.response, cfg.link, cfg.beta0};
        ScoreMatrix sm = fit_nuisance(prob);
        rep.n = prob.x.n();
        rep.p = prob.x.p();
        if (nf) {
            auto st = glm_u_stats(sm, finite, cfg.threads);
            for (int k = 0; k < nf; ++k) fin[k].stat = st[k];
        }
        if (has_inf) inf.stat = glm_max_stat(sm);
        if ((finite_perm || (has_inf && max_perm)) && cfg.link != Link::Identity)
            fail(ErrorCode::InvalidArgument, "residual permutation is available for the identity link only; use asymptotic calibration");
        const DataMatrix xm = prob.x;
        recompute = [sm, xm, &finite, finite_perm, nf, has_inf, max_perm](CounterRng& rng, double* out) {
            auto perm = random_permutation(static_cast<int>(sm.residual.size()), rng);
            ScoreMatrix sb = permute_residuals(sm, xm, perm);
            int k = 0;
            if (finite_perm && nf)
                for (double v : values_of(glm_u_stats(sb, finite, 1))) out[k++] = v;
            if (has_inf && max_perm) out[k] = glm_max_stat(sb).value;
        };
        if (has_inf && !max_perm)
            inf.p = gumbel_mean_pvalue(inf.stat.value, static_cast<double>(rep.n), static_cast<double>(rep.p));
        break;
    }
    case Family::Cov2: {
        GroupedSample g(need(input.x, "two samples", cfg.family), need(input.y, "two samples", cfg.family));
        rep.n = g.x.n() + g.y.n();
        rep.p = g.x.p();
        if (nf) {
            auto st = cov2_u_stats(g, finite, cfg.threads);
            for (int k = 0; k < nf; ++k) fin[k].stat = st[k];
            if (cfg.elliptical) {
                cov2_elliptical_variance(g, st, cfg.kappa_x, cfg.kappa_y, cfg.threads);
                for (int k = 0; k < nf; ++k) fin[k].stat = st[k];
            } else {
                auto nulls = cov2_permutation_null(g, finite, cfg.perm_count, seed_f, cfg.threads);
                for (int k = 0; k < nf; ++k) {
                    std::vector<double> d = nulls[k].draws;
                    finite_perm_outcome(fin[k], d, cfg.sided);
                    // the permutation spread stands in for the variance
                    fin[k].stat.variance = nulls[k].sd * nulls[k].sd;
                    fin[k].stat.z = nulls[k].sd > 0 ? (fin[k].stat.value - nulls[k].mean) / nulls[k].sd : 0.0;
                }
            }
        }
        if (has_inf) {
            inf.stat = cov2_max_stat(g);
            inf.stat.warnings.push_back("the two-sample covariance maximum is experimental and calibrated by permutation only");
            Eigen::MatrixXd pooled(rep.n, rep.p);
            pooled << g.x.values(), g.y.values();
            const Eigen::Index nx = g.x.n();
            auto d = draw(cfg.perm_count, seed_m, cfg.threads, 1, [&](CounterRng& rng, double* out) {
                out[0] = cov2_max_stat(relabel(pooled, nx, rng)).value;
            });
            max_perm_outcome(inf, d.column(0));
        }
        break;
    }
    }

    // generic permutation path for the mean and glm families
    if (recompute && width > 0) {
        std::uint64_t s = (finite_perm && nf) ? seed_f : seed_m;
        auto d = draw(cfg.perm_count, s, cfg.threads, width, recompute);
        int k = 0;
        if (finite_perm && nf)
            for (; k < nf; ++k) finite_perm_outcome(fin[k], d.column(k), cfg.sided);
        if (has_inf && max_perm) max_perm_outcome(inf, d.column(k));
    }

    // asymptotic finite-order p-values
    const bool cov2_perm = cfg.family == Family::Cov2 && !cfg.elliptical;
    if (!finite_perm && !cov2_perm)
        for (auto& oc : fin) oc.p = finite_order_pvalue(oc.stat, cfg.sided);

    int k = 0;
    std::vector<PValue> ps;
    for (int o : cfg.orders) {
        if (o == kInfOrder) rep.outcomes.push_back(inf);
        else rep.outcomes.push_back(fin[k++]);
        ps.push_back(rep.outcomes.back().p);
    }
    for (const auto& oc : rep.outcomes)
        for (const auto& w : oc.stat.warnings)
            if (std::find(rep.warnings.begin(), rep.warnings.end(), w) == rep.warnings.end()) rep.warnings.push_back(w);
    rep.adaptive = adaptive_combine(cfg.orders, ps);
    return rep;
}

}  // namespace ustat
