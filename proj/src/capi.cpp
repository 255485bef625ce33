#include "ustat/ustat.h"

#include "ustat/cov1.hpp"
#include "ustat/error.hpp"
#include "ustat/power_sums.hpp"
#include "ustat/report.hpp"
#include "ustat/rng.hpp"

#include <atomic>
#include <cstring>
#include <new>
#include <string>

struct ustat_matrix {
    ustat::DataMatrix m;
};

struct ustat_report {
    std::string json;
    std::string tsv;
    std::vector<std::string> warnings;
};

static_assert(static_cast<int>(ustat::ErrorCode::Io) == USTAT_E_IO);
static_assert(static_cast<int>(ustat::ErrorCode::InvalidArgument) == USTAT_E_INVALID_ARGUMENT);
static_assert(static_cast<int>(ustat::ErrorCode::NotPositiveDefinite) == USTAT_E_NOT_POSITIVE_DEFINITE);

namespace {

thread_local std::string g_last_error;
std::atomic<int> g_threads{1};

template <class F>
int guard(F&& f) {
    try {
        f();
        g_last_error.clear();
        return USTAT_OK;
    } catch (const ustat::Error& e) {
        g_last_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return USTAT_E_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return USTAT_E_INTERNAL;
    }
}

int null_arg(const char* what) {
    g_last_error = std::string(what) + " is NULL";
    return USTAT_E_INVALID_ARGUMENT;
}

ustat_report* make_report(const ustat::TestReport& rep, const ustat::InputPaths& in) {
    return new ustat_report{ustat::to_json(rep, in), ustat::to_tsv(rep), rep.warnings};
}

}  // namespace

extern "C" {

const char* ustat_version(void) { return ustat::version(); }

const char* ustat_last_error(void) { return g_last_error.c_str(); }

const char* ustat_error_name(int code) {
    if (code == USTAT_OK) return "Ok";
    if (code == USTAT_E_INTERNAL) return "Internal";
    if (code < USTAT_E_IO || code > USTAT_E_INVALID_ARGUMENT) return "Unknown";
    return ustat::error_name(static_cast<ustat::ErrorCode>(code));
}

int ustat_error_is_validation(int code) {
    if (code < USTAT_E_IO || code > USTAT_E_INVALID_ARGUMENT) return 0;
    return ustat::is_validation_error(static_cast<ustat::ErrorCode>(code)) ? 1 : 0;
}

uint64_t ustat_entropy_seed(void) { return ustat::entropy_seed(); }

int ustat_matrix_from_csv(const char* path, int has_header, ustat_matrix** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] { *out = new ustat_matrix{ustat::load_csv(path, has_header != 0)}; });
}

int ustat_matrix_from_data(const double* values, size_t n, size_t p, ustat_matrix** out) {
    if (!values) return null_arg("values");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < p; ++j) m(i, j) = values[i * p + j];
        *out = new ustat_matrix{ustat::DataMatrix(std::move(m))};
    });
}

size_t ustat_matrix_rows(const ustat_matrix* m) { return m ? static_cast<size_t>(m->m.n()) : 0; }
size_t ustat_matrix_cols(const ustat_matrix* m) { return m ? static_cast<size_t>(m->m.p()) : 0; }
void ustat_matrix_free(ustat_matrix* m) { delete m; }

int ustat_cov1_stat(const ustat_matrix* m, int order, int mean_mode, double* value, double* variance) {
    if (!m) return null_arg("matrix");
    return guard([&] {
        if (mean_mode < 0 || mean_mode > 2) ustat::fail(ustat::ErrorCode::InvalidArgument, "mean_mode must be 0, 1 or 2");
        if (order < 1) ustat::fail(ustat::ErrorCode::InvalidArgument, "order must be at least 1");
        int ord[1] = {order};
        auto r = ustat::cov1_u_stats(m->m, ord, static_cast<ustat::MeanMode>(mean_mode), g_threads.load()).front();
        if (value) *value = r.value;
        if (variance) *variance = r.variance;
    });
}

int ustat_distinct_sums(const double* s, size_t n, int a_max, double* out) {
    if (!s) return null_arg("series");
    if (!out) return null_arg("out");
    return guard([&] {
        auto t = ustat::power_sums(std::span<const double>(s, n), a_max);
        auto u = ustat::distinct_index_sums(t);
        for (int a = 0; a <= a_max; ++a) out[a] = u.u[a];
    });
}

void ustat_set_threads(int threads) { g_threads.store(threads < 0 ? 1 : threads); }

int ustat_test(const char* config_json, ustat_report** out) {
    if (!config_json) return null_arg("config");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        ustat::TestRequest req = ustat::parse_test_request(config_json);
        req.config.threads = g_threads.load();
        *out = make_report(ustat::run_request(req), req.inputs);
    });
}

int ustat_test_data(const char* config_json, const ustat_matrix* x, const ustat_matrix* y, const ustat_matrix* z,
                    const double* response, size_t response_len, ustat_report** out) {
    if (!config_json) return null_arg("config");
    if (!x) return null_arg("x");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        ustat::TestRequest req = ustat::parse_test_request(config_json);
        req.config.threads = g_threads.load();
        ustat::TestInput in;
        in.x = x->m;
        if (y) in.y = y->m;
        if (z) in.z = z->m.values();
        if (response) in.response = Eigen::Map<const Eigen::VectorXd>(response, static_cast<Eigen::Index>(response_len));
        *out = make_report(ustat::run_test(in, req.config), req.inputs);
    });
}

int ustat_simulate(const char* config_json, int threads, ustat_report** out) {
    if (!config_json) return null_arg("config");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        ustat::Scenario scn = ustat::parse_scenario(config_json);
        scn.threads = threads;
        auto rep = ustat::run(scn);
        *out = new ustat_report{ustat::to_json(rep), ustat::to_tsv(rep), rep.warnings};
    });
}

int ustat_plan(const char* config_json, ustat_report** out) {
    if (!config_json) return null_arg("config");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        ustat::PlanRequest req = ustat::parse_plan_request(config_json);
        auto plan = ustat::rho_curve(req.input, req.a_max);
        *out = new ustat_report{ustat::to_json(plan, req), ustat::to_tsv(plan, req), {}};
    });
}

const char* ustat_report_json(const ustat_report* r) { return r ? r->json.c_str() : ""; }
const char* ustat_report_tsv(const ustat_report* r) { return r ? r->tsv.c_str() : ""; }
size_t ustat_report_warning_count(const ustat_report* r) { return r ? r->warnings.size() : 0; }
const char* ustat_report_warning(const ustat_report* r, size_t i) {
    return r && i < r->warnings.size() ? r->warnings[i].c_str() : "";
}
void ustat_report_free(ustat_report* r) { delete r; }

}  // extern "C"
