// ustat command line: test, simulate, plan. Talks to the library only through
// the C interface.
#include "ustat/ustat.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

struct Common {
    std::string config_path;
    std::string out;
    std::string format = "json";
    int threads = -1;
};

int finish_error(int code) {
    std::fprintf(stderr, "ustat: %s: %s\n", ustat_error_name(code), ustat_last_error());
    return ustat_error_is_validation(code) ? 2 : 3;
}

int usage_error(const std::string& msg) {
    std::fprintf(stderr, "ustat: %s\n", msg.c_str());
    return 2;
}

// the "config" object of a report file, or the file itself
bool load_config(const std::string& path, json& out, std::string& err) {
    if (path.empty()) {
        out = json::object();
        return true;
    }
    std::ifstream in(path);
    if (!in) {
        err = "cannot open config '" + path + "'";
        return false;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        json doc = json::parse(ss.str());
        out = doc.contains("config") && doc["config"].is_object() ? doc["config"] : doc;
    } catch (const json::exception& e) {
        err = "config '" + path + "' is not valid JSON: " + e.what();
        return false;
    }
    if (!out.is_object()) {
        err = "config '" + path + "' must hold a JSON object";
        return false;
    }
    return true;
}

int resolve_threads(int flag) {
    if (flag >= 0) return flag;
    if (const char* env = std::getenv("USTAT_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 0) return static_cast<int>(v);
        std::fprintf(stderr, "ustat: ignoring USTAT_THREADS='%s'\n", env);
    }
    return 0;
}

void ensure_seed(json& cfg) {
    if (cfg.contains("seed") && !cfg["seed"].is_null()) return;
    const std::uint64_t s = ustat_entropy_seed();
    std::fprintf(stderr, "ustat: seed %llu\n", static_cast<unsigned long long>(s));
    cfg["seed"] = s;
}

json number_list(const std::string& text) {
    json a = json::array();
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        a.push_back(v);
    }
    return a;
}

int emit(ustat_report* rep, const Common& c) {
    for (std::size_t i = 0; i < ustat_report_warning_count(rep); ++i)
        std::fprintf(stderr, "ustat: warning: %s\n", ustat_report_warning(rep, i));
    const char* text = c.format == "tsv" ? ustat_report_tsv(rep) : ustat_report_json(rep);
    int rc = 0;
    if (c.out.empty()) {
        std::fputs(text, stdout);
    } else {
        std::ofstream f(c.out, std::ios::binary);
        f << text;
        if (!f) {
            std::fprintf(stderr, "ustat: Io: cannot write '%s'\n", c.out.c_str());
            rc = 2;
        }
    }
    ustat_report_free(rep);
    return rc;
}

template <class T>
void set_if(json& cfg, const char* key, CLI::Option* opt, const T& v) {
    if (opt->count()) cfg[key] = v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-dimensional U-statistic tests"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(ustat_version()));

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "JSON config or a previous report to re-run");
        sub->add_option("--out", common.out, "output file (default stdout)");
        sub->add_option("--format", common.format, "report format")->check(CLI::IsMember({"json", "tsv"}));
        sub->add_option("--threads", common.threads, "worker threads (0 = all cores; env USTAT_THREADS)")
            ->check(CLI::NonNegativeNumber);
    };

    // ---- test
    auto* test = app.add_subcommand("test", "run a test family on CSV data");
    add_common(test);
    std::string x, y, z, response, family, orders, sided, calib, max_calib, mean_mode, max_variant, link, mu0, beta0;
    int perm_count = 0;
    double alpha = 0, kappa_x = 1, kappa_y = 1;
    std::uint64_t seed = 0;
    bool header = false, elliptical = false;
    auto* o_x = test->add_option("--x,--input", x, "data matrix (first sample, or glm covariates)");
    auto* o_y = test->add_option("--y", y, "second sample");
    auto* o_z = test->add_option("--z", z, "glm nuisance covariates");
    auto* o_resp = test->add_option("--response", response, "glm response, one value per line");
    auto* o_header = test->add_flag("--header", header, "CSV files start with a header row");
    auto* o_family = test->add_option("--family", family)->check(CLI::IsMember({"cov1", "cov2", "mean1", "mean2", "glm"}));
    auto* o_orders = test->add_option("--orders", orders, "e.g. 1-6,inf");
    auto* o_sided = test->add_option("--sided", sided)->check(CLI::IsMember({"two", "upper"}));
    auto* o_calib = test->add_option("--calib", calib, "finite orders")->check(CLI::IsMember({"asym", "perm"}));
    auto* o_mcalib = test->add_option("--max-calib", max_calib, "maximum statistic")->check(CLI::IsMember({"asym", "perm"}));
    auto* o_perm = test->add_option("--perm-count", perm_count)->check(CLI::Range(100, 10000000));
    auto* o_alpha = test->add_option("--alpha", alpha)->check(CLI::Range(0.0, 1.0));
    auto* o_seed = test->add_option("--seed", seed);
    auto* o_mode = test->add_option("--mean-mode", mean_mode)->check(CLI::IsMember({"unknown", "known-zero", "exact"}));
    auto* o_variant = test->add_option("--max-variant", max_variant)->check(CLI::IsMember({"mstar", "mdagger"}));
    auto* o_mu0 = test->add_option("--mu0", mu0, "mean1 null mean, comma separated");
    auto* o_ell = test->add_flag("--elliptical", elliptical, "cov2: elliptical variance instead of permutation");
    auto* o_kx = test->add_option("--kappa-x", kappa_x);
    auto* o_ky = test->add_option("--kappa-y", kappa_y);
    auto* o_link = test->add_option("--link", link)->check(CLI::IsMember({"identity", "logit"}));
    auto* o_beta0 = test->add_option("--beta0", beta0, "glm null coefficients, comma separated");

    // ---- simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo rejection rates for a scenario");
    add_common(sim);
    std::string s_gen, s_dist, s_orders, s_sided, s_calib, s_mcalib, s_mode, s_variant;
    int s_setting = 0, s_n = 0, s_ny = 0, s_p = 0, s_k0 = 0, s_sparsity = 0, s_model = 0, s_reps = 0, s_perm = 0;
    double s_rho = 0, s_alpha = 0, s_glm_s = 0, s_glm_c = 0;
    std::uint64_t s_seed = 0;
    bool s_ar = false;
    auto* so_setting = sim->add_option("--setting", s_setting, "settings 1-5")->check(CLI::Range(1, 5));
    auto* so_gen = sim->add_option("--generator", s_gen, "setting1..setting5, qs-null, cov-model, glm, mean1, mean2");
    auto* so_dist = sim->add_option("--dist", s_dist)->check(CLI::IsMember({"gaussian", "gamma"}));
    auto* so_n = sim->add_option("--n", s_n);
    auto* so_ny = sim->add_option("--ny", s_ny);
    auto* so_p = sim->add_option("--p", s_p);
    auto* so_rho = sim->add_option("--rho", s_rho);
    auto* so_k0 = sim->add_option("--k0", s_k0);
    auto* so_sp = sim->add_option("--sparsity", s_sparsity, "|J_A|, ordered off-diagonal cells");
    auto* so_model = sim->add_option("--model", s_model, "cov-model 1-3");
    auto* so_gs = sim->add_option("--glm-s", s_glm_s);
    auto* so_gc = sim->add_option("--glm-c", s_glm_c);
    auto* so_ar = sim->add_flag("--glm-ar", s_ar);
    auto* so_reps = sim->add_option("--reps", s_reps);
    auto* so_alpha = sim->add_option("--alpha", s_alpha);
    auto* so_seed = sim->add_option("--seed", s_seed);
    auto* so_orders = sim->add_option("--orders", s_orders);
    auto* so_sided = sim->add_option("--sided", s_sided)->check(CLI::IsMember({"two", "upper"}));
    auto* so_calib = sim->add_option("--calib", s_calib)->check(CLI::IsMember({"asym", "perm"}));
    auto* so_mcalib = sim->add_option("--max-calib", s_mcalib)->check(CLI::IsMember({"asym", "perm"}));
    auto* so_perm = sim->add_option("--perm-count", s_perm)->check(CLI::Range(100, 10000000));
    auto* so_mode = sim->add_option("--mean-mode", s_mode)->check(CLI::IsMember({"unknown", "known-zero", "exact"}));
    auto* so_variant = sim->add_option("--max-variant", s_variant)->check(CLI::IsMember({"mstar", "mdagger"}));

    // ---- plan
    auto* plan = app.add_subcommand("plan", "power planner: rho curve and recommended order");
    add_common(plan);
    std::string p_family, p_h;
    double p_n = 0, p_nx = 0, p_ny = 0, p_p = 0, p_sparsity = 0, p_beta = 0, p_M = 0, p_k1 = 0, p_nu2 = 0, p_kx = 0,
           p_ky = 0, p_C = 0;
    int p_amax = 0;
    auto* po_family = plan->add_option("--family", p_family)->check(CLI::IsMember({"cov1", "mean2", "cov2"}));
    auto* po_n = plan->add_option("--n", p_n);
    auto* po_nx = plan->add_option("--nx", p_nx);
    auto* po_ny = plan->add_option("--ny", p_ny);
    auto* po_p = plan->add_option("--p", p_p);
    auto* po_sp = plan->add_option("--sparsity", p_sparsity, "|J_A|, k0 or |J_D|");
    auto* po_beta = plan->add_option("--beta", p_beta, "cov1: |J_A| = p^(2(1-beta))");
    auto* po_M = plan->add_option("--M", p_M);
    auto* po_k1 = plan->add_option("--kappa1", p_k1);
    auto* po_nu2 = plan->add_option("--nu2", p_nu2);
    auto* po_kx = plan->add_option("--kappa-x", p_kx);
    auto* po_ky = plan->add_option("--kappa-y", p_ky);
    auto* po_h = plan->add_option("--band", p_h, "cov2 band values h_1..h_s, comma separated");
    auto* po_amax = plan->add_option("--a-max", p_amax);
    auto* po_C = plan->add_option("--C", p_C, "constant of the maximum-type rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    json cfg;
    std::string err;
    if (!load_config(common.config_path, cfg, err)) return usage_error(err);
    const int threads = resolve_threads(common.threads);

    ustat_report* rep = nullptr;
    int code = USTAT_OK;
    try {
        if (test->parsed()) {
            json& in = cfg["inputs"];
            if (!in.is_object()) in = json::object();
            set_if(in, "x", o_x, x);
            set_if(in, "y", o_y, y);
            set_if(in, "z", o_z, z);
            set_if(in, "response", o_resp, response);
            set_if(in, "header", o_header, header);
            set_if(cfg, "family", o_family, family);
            set_if(cfg, "orders", o_orders, orders);
            set_if(cfg, "sided", o_sided, sided);
            set_if(cfg, "calib", o_calib, calib);
            set_if(cfg, "max_calib", o_mcalib, max_calib);
            set_if(cfg, "perm_count", o_perm, perm_count);
            set_if(cfg, "alpha", o_alpha, alpha);
            set_if(cfg, "seed", o_seed, seed);
            set_if(cfg, "mean_mode", o_mode, mean_mode);
            set_if(cfg, "max_variant", o_variant, max_variant);
            if (o_mu0->count()) cfg["mu0"] = number_list(mu0);
            set_if(cfg, "elliptical", o_ell, elliptical);
            set_if(cfg, "kappa_x", o_kx, kappa_x);
            set_if(cfg, "kappa_y", o_ky, kappa_y);
            set_if(cfg, "link", o_link, link);
            if (o_beta0->count()) cfg["beta0"] = number_list(beta0);
            cfg["command"] = "test";
            ensure_seed(cfg);
            ustat_set_threads(threads);
            code = ustat_test(cfg.dump().c_str(), &rep);
        } else if (sim->parsed()) {
            if (so_setting->count()) cfg["generator"] = "setting" + std::to_string(s_setting);
            set_if(cfg, "generator", so_gen, s_gen);
            set_if(cfg, "dist", so_dist, s_dist);
            set_if(cfg, "n", so_n, s_n);
            set_if(cfg, "ny", so_ny, s_ny);
            set_if(cfg, "p", so_p, s_p);
            set_if(cfg, "rho", so_rho, s_rho);
            set_if(cfg, "k0", so_k0, s_k0);
            set_if(cfg, "sparsity", so_sp, s_sparsity);
            set_if(cfg, "model", so_model, s_model);
            set_if(cfg, "glm_s", so_gs, s_glm_s);
            set_if(cfg, "glm_c", so_gc, s_glm_c);
            set_if(cfg, "glm_ar", so_ar, s_ar);
            set_if(cfg, "reps", so_reps, s_reps);
            set_if(cfg, "alpha", so_alpha, s_alpha);
            set_if(cfg, "seed", so_seed, s_seed);
            json& t = cfg["test"];
            if (!t.is_object()) t = json::object();
            set_if(t, "orders", so_orders, s_orders);
            set_if(t, "sided", so_sided, s_sided);
            set_if(t, "calib", so_calib, s_calib);
            set_if(t, "max_calib", so_mcalib, s_mcalib);
            set_if(t, "perm_count", so_perm, s_perm);
            set_if(t, "mean_mode", so_mode, s_mode);
            set_if(t, "max_variant", so_variant, s_variant);
            cfg["command"] = "simulate";
            ensure_seed(cfg);
            code = ustat_simulate(cfg.dump().c_str(), threads, &rep);
        } else {
            set_if(cfg, "family", po_family, p_family);
            set_if(cfg, "n", po_n, p_n);
            set_if(cfg, "nx", po_nx, p_nx);
            set_if(cfg, "ny", po_ny, p_ny);
            set_if(cfg, "p", po_p, p_p);
            set_if(cfg, "sparsity", po_sp, p_sparsity);
            set_if(cfg, "beta", po_beta, p_beta);
            set_if(cfg, "M", po_M, p_M);
            set_if(cfg, "kappa1", po_k1, p_k1);
            set_if(cfg, "nu2", po_nu2, p_nu2);
            set_if(cfg, "kappa_x", po_kx, p_kx);
            set_if(cfg, "kappa_y", po_ky, p_ky);
            if (po_h->count()) cfg["h"] = number_list(p_h);
            set_if(cfg, "a_max", po_amax, p_amax);
            set_if(cfg, "C", po_C, p_C);
            cfg["command"] = "plan";
            code = ustat_plan(cfg.dump().c_str(), &rep);
        }
    } catch (const std::invalid_argument& e) {
        return usage_error(std::string("not a number list: ") + e.what());
    } catch (const std::out_of_range& e) {
        return usage_error(std::string("number out of range: ") + e.what());
    }
    if (code != USTAT_OK) return finish_error(code);
    return emit(rep, common);
}
