#include "ustat/report.hpp"

#include "ustat/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <set>

namespace ustat {

using nlohmann::json;

const char* version() { return "0.1.0"; }

namespace {

// ---- enum spellings

const char* sided_name(Sided s) { return s == Sided::Two ? "two" : "upper"; }
const char* calib_name(Calibration c) { return c == Calibration::Asymptotic ? "asym" : "perm"; }
const char* source_name(PSource s) { return s == PSource::Asymptotic ? "asymptotic" : "permutation"; }
const char* link_name(Link l) { return l == Link::Identity ? "identity" : "logit"; }
const char* variant_name(MaxVariant v) { return v == MaxVariant::MStar ? "mstar" : "mdagger"; }

const char* mean_mode_name(MeanMode m) {
    switch (m) {
    case MeanMode::KnownZero: return "known-zero";
    case MeanMode::Unknown: return "unknown";
    case MeanMode::UnknownExact: return "exact";
    }
    return "unknown";
}

const char* plan_family_name(PlanFamily f) {
    switch (f) {
    case PlanFamily::Cov1: return "cov1";
    case PlanFamily::Mean2: return "mean2";
    case PlanFamily::Cov2: return "cov2";
    }
    return "cov1";
}

[[noreturn]] void bad_value(const std::string& key, const std::string& v) {
    fail(ErrorCode::InvalidArgument, "config key '" + key + "': unsupported value '" + v + "'");
}

Sided parse_sided(const std::string& s) {
    if (s == "two") return Sided::Two;
    if (s == "upper") return Sided::Upper;
    bad_value("sided", s);
}

Calibration parse_calib(const std::string& key, const std::string& s) {
    if (s == "asym") return Calibration::Asymptotic;
    if (s == "perm") return Calibration::Permutation;
    bad_value(key, s);
}

Link parse_link(const std::string& s) {
    if (s == "identity") return Link::Identity;
    if (s == "logit") return Link::Logit;
    bad_value("link", s);
}

MaxVariant parse_variant(const std::string& s) {
    if (s == "mstar") return MaxVariant::MStar;
    if (s == "mdagger") return MaxVariant::MDagger;
    bad_value("max_variant", s);
}

MeanMode parse_mean_mode(const std::string& s) {
    if (s == "known-zero") return MeanMode::KnownZero;
    if (s == "unknown") return MeanMode::Unknown;
    if (s == "exact") return MeanMode::UnknownExact;
    bad_value("mean_mode", s);
}

PlanFamily parse_plan_family(const std::string& s) {
    if (s == "cov1") return PlanFamily::Cov1;
    if (s == "mean2") return PlanFamily::Mean2;
    if (s == "cov2") return PlanFamily::Cov2;
    bad_value("family", s);
}

// ---- json helpers

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json orders_json(const std::vector<int>& orders) {
    json a = json::array();
    for (int o : orders) a.push_back(o == kInfOrder ? json("inf") : json(o));
    return a;
}

json order_json(int o) { return o == kInfOrder ? json("inf") : json(o); }

json vec_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

std::vector<int> orders_from(const json& j) {
    if (j.is_string()) return parse_orders(j.get<std::string>());
    if (!j.is_array()) fail(ErrorCode::InvalidArgument, "config key 'orders' must be an array or a string");
    std::string text;
    for (const auto& e : j) {
        if (!text.empty()) text += ',';
        if (e.is_string()) text += e.get<std::string>();
        else if (e.is_number_integer()) text += std::to_string(e.get<long long>());
        else fail(ErrorCode::InvalidArgument, "config key 'orders': entries must be integers or \"inf\"");
    }
    return parse_orders(text);
}

Eigen::VectorXd vec_from(const json& j, const std::string& key) {
    if (j.is_null()) return {};
    if (!j.is_array()) fail(ErrorCode::InvalidArgument, "config key '" + key + "' must be an array of numbers");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(ErrorCode::InvalidArgument, "config key '" + key + "' must hold numbers");
        v[i] = j[i].get<double>();
    }
    return v;
}

json parse_doc(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::Parse, std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail(ErrorCode::Parse, "config must be a JSON object");
    if (doc.contains("config") && doc["config"].is_object()) return doc["config"];
    return doc;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) fail(ErrorCode::InvalidArgument, where + ": unknown key '" + it.key() + "'");
}

template <class T>
void take(const json& j, const char* key, T& out) {
    if (!j.contains(key) || j[key].is_null()) return;
    try {
        out = j[key].get<T>();
    } catch (const json::exception&) {
        fail(ErrorCode::InvalidArgument, std::string("config key '") + key + "' has the wrong type");
    }
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return "NA";
    char b[40];
    std::snprintf(b, sizeof b, "%.10g", v);
    return b;
}

// ---- test config

json method_json(const TestConfig& c) {
    return json{{"orders", orders_json(c.orders)},
                {"sided", sided_name(c.sided)},
                {"calib", calib_name(c.calib)},
                {"max_calib", calib_name(c.max_calib)},
                {"perm_count", c.perm_count},
                {"mean_mode", mean_mode_name(c.mean_mode)},
                {"max_variant", variant_name(c.max_variant)},
                {"elliptical", c.elliptical},
                {"kappa_x", c.kappa_x},
                {"kappa_y", c.kappa_y}};
}

void method_from(const json& j, TestConfig& c) {
    if (j.contains("orders")) c.orders = orders_from(j["orders"]);
    std::string s;
    if (j.contains("sided")) { take(j, "sided", s); c.sided = parse_sided(s); }
    if (j.contains("calib")) { take(j, "calib", s); c.calib = parse_calib("calib", s); }
    if (j.contains("max_calib")) { take(j, "max_calib", s); c.max_calib = parse_calib("max_calib", s); }
    take(j, "perm_count", c.perm_count);
    if (j.contains("mean_mode")) { take(j, "mean_mode", s); c.mean_mode = parse_mean_mode(s); }
    if (j.contains("max_variant")) { take(j, "max_variant", s); c.max_variant = parse_variant(s); }
    take(j, "elliptical", c.elliptical);
    take(j, "kappa_x", c.kappa_x);
    take(j, "kappa_y", c.kappa_y);
}

json test_config(const TestRequest& req) {
    const TestConfig& c = req.config;
    json j = method_json(c);
    j["command"] = "test";
    j["family"] = family_name(c.family);
    j["alpha"] = c.alpha;
    j["seed"] = c.seed;
    j["mu0"] = c.mu0.size() ? vec_json(c.mu0) : json(nullptr);
    j["link"] = link_name(c.link);
    j["beta0"] = c.beta0.size() ? vec_json(c.beta0) : json(nullptr);
    j["inputs"] = json{{"x", req.inputs.x},
                       {"y", req.inputs.y},
                       {"z", req.inputs.z},
                       {"response", req.inputs.response},
                       {"header", req.inputs.header}};
    return j;
}

json scenario_config(const Scenario& s) {
    return json{{"command", "simulate"},
                {"generator", generator_name(s.generator)},
                {"dist", dist_name(s.dist)},
                {"n", s.n},
                {"ny", s.ny},
                {"p", s.p},
                {"rho", s.rho},
                {"k0", s.k0},
                {"sparsity", s.sparsity},
                {"model", s.model},
                {"glm_s", s.glm_s},
                {"glm_c", s.glm_c},
                {"glm_ar", s.glm_ar},
                {"reps", s.reps},
                {"alpha", s.alpha},
                {"seed", s.seed},
                {"test", method_json(s.test)}};
}

json plan_config(const PlanRequest& r) {
    const PlanInput& in = r.input;
    json h = json::array();
    for (double v : in.h) h.push_back(v);
    return json{{"command", "plan"},
                {"family", plan_family_name(in.family)},
                {"n", in.n},
                {"nx", in.nx},
                {"ny", in.ny},
                {"p", in.p},
                {"sparsity", in.sparsity ? json(*in.sparsity) : json(nullptr)},
                {"beta", in.beta ? json(*in.beta) : json(nullptr)},
                {"M", in.M},
                {"kappa1", in.kappa1},
                {"nu2", in.nu2},
                {"kappa_x", in.kappa_x},
                {"kappa_y", in.kappa_y},
                {"h", h},
                {"a_max", r.a_max},
                {"C", r.C}};
}

std::string scenario_label(const Scenario& s) {
    std::string l = std::string(generator_name(s.generator)) + ":" + dist_name(s.dist) + ":n=" + std::to_string(s.n);
    if (s.ny) l += ":ny=" + std::to_string(s.ny);
    l += ":p=" + std::to_string(s.p);
    return l;
}

}  // namespace

std::string config_json(const TestRequest& req) { return test_config(req).dump(2); }
std::string config_json(const Scenario& scn) { return scenario_config(scn).dump(2); }
std::string config_json(const PlanRequest& req) { return plan_config(req).dump(2); }

std::string to_json(const TestReport& rep, const InputPaths& inputs) {
    json results = json::array();
    for (const auto& oc : rep.outcomes) {
        const auto& st = oc.stat;
        json r{{"order", order_json(st.order)},
               {"statistic", num(st.value)},
               {"variance", st.is_max() ? json(nullptr) : num(st.variance)},
               {"z", st.is_max() ? json(nullptr) : num(st.z)},
               {"p_value", num(oc.p.value)},
               {"p_source", source_name(oc.p.source)},
               {"sided", sided_name(oc.p.sided)},
               {"perm_count", oc.p.count}};
        r["perm_mean"] = oc.has_perm ? num(oc.perm_mean) : json(nullptr);
        r["perm_sd"] = oc.has_perm ? num(oc.perm_sd) : json(nullptr);
        if (st.arg1 >= 0) {
            json a = json::array({st.arg1 + 1});
            if (st.arg2 >= 0) a.push_back(st.arg2 + 1);
            r["argmax"] = a;
        } else {
            r["argmax"] = nullptr;
        }
        results.push_back(r);
    }
    json doc{{"version", version()},
             {"config", test_config({rep.config, inputs})},
             {"results", results},
             {"adaptive", json{{"gamma", orders_json(rep.adaptive.gamma)},
                               {"p_min", num(rep.adaptive.p_min_combined)},
                               {"p_fisher", num(rep.adaptive.p_fisher_combined)}}},
             {"n", rep.n},
             {"p", rep.p},
             {"warnings", rep.warnings}};
    return doc.dump(2) + "\n";
}

std::string to_tsv(const TestReport& rep) {
    std::string out = "order\tstatistic\tvariance\tz\tp_value\tsource\n";
    for (const auto& oc : rep.outcomes) {
        const auto& st = oc.stat;
        out += order_name(st.order) + "\t" + fmt(st.value) + "\t" + (st.is_max() ? "NA" : fmt(st.variance)) + "\t" +
               (st.is_max() ? "NA" : fmt(st.z)) + "\t" + fmt(oc.p.value) + "\t" + source_name(oc.p.source) + "\n";
    }
    out += "adpUmin\tNA\tNA\tNA\t" + fmt(rep.adaptive.p_min_combined) + "\tcombined\n";
    out += "adpUf\tNA\tNA\tNA\t" + fmt(rep.adaptive.p_fisher_combined) + "\tcombined\n";
    return out;
}

std::string to_json(const RejectionReport& rep) {
    const std::string label = scenario_label(rep.scenario);
    json results = json::array();
    json adaptive = json::object();
    for (const auto& m : rep.methods) {
        json r{{"scenario", label},
               {"method", m.method},
               {"rate", m.rate},
               {"se", m.se},
               {"rejections", m.rejections},
               {"reps", rep.reps},
               {"seed", rep.scenario.seed}};
        if (m.method == "adpUmin" || m.method == "adpUf") adaptive[m.method] = json{{"rate", m.rate}, {"se", m.se}};
        results.push_back(r);
    }
    json doc{{"version", version()},
             {"config", scenario_config(rep.scenario)},
             {"results", results},
             {"adaptive", adaptive},
             {"redraws", rep.redraws},
             {"warnings", rep.warnings},
             {"wall_seconds", rep.wall_seconds}};
    return doc.dump(2) + "\n";
}

std::string to_tsv(const RejectionReport& rep) {
    const std::string label = scenario_label(rep.scenario);
    std::string out = "scenario\tmethod\trate\tse\treps\tseed\n";
    for (const auto& m : rep.methods)
        out += label + "\t" + m.method + "\t" + fmt(m.rate) + "\t" + fmt(m.se) + "\t" + std::to_string(rep.reps) +
               "\t" + std::to_string(rep.scenario.seed) + "\n";
    return out;
}

std::string to_json(const PowerPlan& plan, const PlanRequest& req) {
    json results = json::array();
    for (std::size_t i = 0; i < plan.orders.size(); ++i) {
        json r{{"order", plan.orders[i]}, {"rho", num(plan.rho[i])}, {"d_ratio", num(d_ratio(plan.orders[i], req.input))}};
        r["g"] = i < plan.g.size() ? num(plan.g[i]) : json(nullptr);
        results.push_back(r);
    }
    json doc{{"version", version()},
             {"config", plan_config(req)},
             {"results", results},
             {"adaptive", json{{"a0", plan.a0},
                               {"m_tilde", num(plan.m_tilde)},
                               {"n_eff", num(plan.n_eff)},
                               {"regime", plan.regime_note},
                               {"max_rate", num(max_rate(plan, req.input.p, req.C))},
                               {"verdict", verdict_name(compare_with_max(plan, req.input.p, req.C))}}}};
    return doc.dump(2) + "\n";
}

std::string to_tsv(const PowerPlan& plan, const PlanRequest& req) {
    std::string out = "order\trho\tg\td_ratio\n";
    for (std::size_t i = 0; i < plan.orders.size(); ++i)
        out += std::to_string(plan.orders[i]) + "\t" + fmt(plan.rho[i]) + "\t" +
               (i < plan.g.size() ? fmt(plan.g[i]) : std::string("NA")) + "\t" +
               fmt(d_ratio(plan.orders[i], req.input)) + "\n";
    out += "# a0=" + std::to_string(plan.a0) + " m_tilde=" + fmt(plan.m_tilde) + " n_eff=" + fmt(plan.n_eff) +
           " verdict=" + verdict_name(compare_with_max(plan, req.input.p, req.C)) + "\n";
    out += "# " + plan.regime_note + "\n";
    return out;
}

TestRequest parse_test_request(const std::string& text) {
    const json j = parse_doc(text);
    check_keys(j,
               {"command", "family", "orders", "sided", "calib", "max_calib", "perm_count", "alpha", "seed", "mean_mode",
                "max_variant", "mu0", "elliptical", "kappa_x", "kappa_y", "link", "beta0", "inputs"},
               "test config");
    TestRequest req;
    TestConfig& c = req.config;
    std::string s;
    if (j.contains("family")) { take(j, "family", s); c.family = parse_family(s); }
    method_from(j, c);
    take(j, "alpha", c.alpha);
    take(j, "seed", c.seed);
    if (j.contains("mu0")) c.mu0 = vec_from(j["mu0"], "mu0");
    if (j.contains("link")) { take(j, "link", s); c.link = parse_link(s); }
    if (j.contains("beta0")) c.beta0 = vec_from(j["beta0"], "beta0");
    if (j.contains("inputs")) {
        const json& in = j["inputs"];
        if (!in.is_object()) fail(ErrorCode::InvalidArgument, "config key 'inputs' must be an object");
        check_keys(in, {"x", "y", "z", "response", "header"}, "inputs");
        take(in, "x", req.inputs.x);
        take(in, "y", req.inputs.y);
        take(in, "z", req.inputs.z);
        take(in, "response", req.inputs.response);
        take(in, "header", req.inputs.header);
    }
    return req;
}

Scenario parse_scenario(const std::string& text) {
    const json j = parse_doc(text);
    check_keys(j,
               {"command", "generator", "dist", "n", "ny", "p", "rho", "k0", "sparsity", "model", "glm_s", "glm_c",
                "glm_ar", "reps", "alpha", "seed", "test"},
               "simulate config");
    Scenario s;
    std::string v;
    if (j.contains("generator")) { take(j, "generator", v); s.generator = parse_generator(v); }
    if (j.contains("dist")) { take(j, "dist", v); s.dist = parse_dist(v); }
    take(j, "n", s.n);
    take(j, "ny", s.ny);
    take(j, "p", s.p);
    take(j, "rho", s.rho);
    take(j, "k0", s.k0);
    take(j, "sparsity", s.sparsity);
    take(j, "model", s.model);
    take(j, "glm_s", s.glm_s);
    take(j, "glm_c", s.glm_c);
    take(j, "glm_ar", s.glm_ar);
    take(j, "reps", s.reps);
    take(j, "alpha", s.alpha);
    take(j, "seed", s.seed);
    if (j.contains("test")) {
        const json& t = j["test"];
        if (!t.is_object()) fail(ErrorCode::InvalidArgument, "config key 'test' must be an object");
        check_keys(t,
                   {"orders", "sided", "calib", "max_calib", "perm_count", "mean_mode", "max_variant", "elliptical",
                    "kappa_x", "kappa_y"},
                   "simulate test config");
        method_from(t, s.test);
    }
    validate(s);
    return s;
}

PlanRequest parse_plan_request(const std::string& text) {
    const json j = parse_doc(text);
    check_keys(j,
               {"command", "family", "n", "nx", "ny", "p", "sparsity", "beta", "M", "kappa1", "nu2", "kappa_x",
                "kappa_y", "h", "a_max", "C"},
               "plan config");
    PlanRequest r;
    PlanInput& in = r.input;
    std::string v;
    if (j.contains("family")) { take(j, "family", v); in.family = parse_plan_family(v); }
    take(j, "n", in.n);
    take(j, "nx", in.nx);
    take(j, "ny", in.ny);
    take(j, "p", in.p);
    if (j.contains("sparsity") && !j["sparsity"].is_null()) {
        double x = 0;
        take(j, "sparsity", x);
        in.sparsity = x;
    }
    if (j.contains("beta") && !j["beta"].is_null()) {
        double x = 0;
        take(j, "beta", x);
        in.beta = x;
    }
    take(j, "M", in.M);
    take(j, "kappa1", in.kappa1);
    take(j, "nu2", in.nu2);
    take(j, "kappa_x", in.kappa_x);
    take(j, "kappa_y", in.kappa_y);
    take(j, "h", in.h);
    take(j, "a_max", r.a_max);
    take(j, "C", r.C);
    return r;
}

TestReport run_request(const TestRequest& req) {
    const InputPaths& in = req.inputs;
    const Family f = req.config.family;
    auto need = [&](const std::string& path, const char* flag) {
        if (path.empty())
            fail(ErrorCode::InvalidArgument, std::string(family_name(f)) + " needs --" + flag);
        return load_csv(path, in.header);
    };
    TestInput ti;
    ti.x = need(in.x, "x");
    if (f == Family::Mean2 || f == Family::Cov2) ti.y = need(in.y, "y");
    if (f == Family::Glm) {
        if (!in.z.empty()) ti.z = load_numeric_csv(in.z, in.header);
        if (in.response.empty()) fail(ErrorCode::InvalidArgument, "glm needs --response");
        ti.response = load_vector_csv(in.response, in.header);
    }
    return run_test(ti, req.config);
}

}  // namespace ustat
