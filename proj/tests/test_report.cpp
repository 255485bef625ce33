#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "check.hpp"
#include "oracles.hpp"
#include "ustat/report.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace ustat;
using nlohmann::json;

namespace {

std::string tmp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("ustat_report_" + name)).string();
}

std::string write_matrix(const std::string& name, const Eigen::MatrixXd& m) {
    auto path = tmp(name);
    write_csv(DataMatrix(m), path);
    return path;
}

TestRequest request(Family f) {
    std::mt19937_64 g(static_cast<int>(f) + 10);
    TestRequest req;
    req.config.family = f;
    req.config.seed = 99;
    req.config.perm_count = 100;
    req.inputs.x = write_matrix("x.csv", oracle::random_matrix(g, 25, 6));
    req.inputs.y = write_matrix("y.csv", oracle::random_matrix(g, 20, 6));
    if (f == Family::Glm) {
        auto zp = tmp("z.csv");
        std::ofstream zo(zp);
        for (int i = 0; i < 25; ++i) zo << "1\n";
        req.inputs.z = zp;
        auto rp = tmp("r.csv");
        std::ofstream out(rp);
        for (int i = 0; i < 25; ++i) out << oracle::random_matrix(g, 1, 1)(0, 0) << "\n";
        req.inputs.response = rp;
    }
    return req;
}

}  // namespace

TEST_CASE("test reports reproduce from their own config") {
    for (Family f : {Family::Cov1, Family::Cov2, Family::Mean1, Family::Mean2, Family::Glm}) {
        CAPTURE(family_name(f));
        auto req = request(f);
        auto rep = run_request(req);
        auto text = to_json(rep, req.inputs);
        auto doc = json::parse(text);
        for (const char* k : {"version", "config", "results", "adaptive"}) CHECK(doc.contains(k));
        CHECK(doc["results"].size() == 7);
        CHECK(doc["results"][6]["order"] == "inf");
        auto again = parse_test_request(text);
        CHECK(to_json(run_request(again), again.inputs) == text);
        auto from_config = parse_test_request(config_json(req));
        CHECK(to_json(run_request(from_config), from_config.inputs) == text);
    }
}

TEST_CASE("tsv layout") {
    auto req = request(Family::Cov1);
    auto tsv = to_tsv(run_request(req));
    CHECK(tsv.rfind("order\tstatistic\tvariance\tz\tp_value\tsource\n", 0) == 0);
    CHECK(tsv.find("\nadpUmin\t") != std::string::npos);
    CHECK(tsv.find("\ninf\t") != std::string::npos);
}

TEST_CASE("config parsing") {
    auto r = parse_test_request(R"({"family":"mean1","orders":"2,inf","sided":"upper","calib":"perm","seed":5})");
    CHECK(r.config.family == Family::Mean1);
    CHECK(r.config.orders == std::vector<int>{2, kInfOrder});
    CHECK(r.config.sided == Sided::Upper);
    CHECK(r.config.calib == Calibration::Permutation);
    CHECK(r.config.seed == 5);
    auto r2 = parse_test_request(R"({"orders":[1,3,"inf"],"mu0":[1,2]})");
    CHECK(r2.config.orders == std::vector<int>{1, 3, kInfOrder});
    CHECK(r2.config.mu0.size() == 2);
    CHECK_CODE(parse_test_request("{not json"), ErrorCode::Parse);
    CHECK_CODE(parse_test_request("[1]"), ErrorCode::Parse);
    CHECK_CODE(parse_test_request(R"({"bogus":1})"), ErrorCode::InvalidArgument);
    CHECK_CODE(parse_test_request(R"({"sided":"left"})"), ErrorCode::InvalidArgument);
    CHECK_CODE(parse_test_request(R"({"perm_count":"many"})"), ErrorCode::InvalidArgument);
    CHECK_CODE(parse_test_request(R"({"family":"cov9"})"), ErrorCode::InvalidArgument);
}

TEST_CASE("missing inputs") {
    TestRequest req;
    req.config.family = Family::Mean2;
    req.inputs.x = write_matrix("x.csv", Eigen::MatrixXd::Random(5, 3));
    CHECK_CODE(run_request(req), ErrorCode::InvalidArgument);
    req.inputs.y = tmp("nothing_here.csv");
    CHECK_CODE(run_request(req), ErrorCode::Io);
}

TEST_CASE("simulation reports reproduce") {
    Scenario s;
    s.generator = Generator::Setting3;
    s.n = 30;
    s.p = 10;
    s.sparsity = 4;
    s.rho = 0.4;
    s.reps = 8;
    s.seed = 3;
    s.test.perm_count = 100;
    auto a = json::parse(to_json(run(s)));
    auto again = parse_scenario(a.dump());
    auto b = json::parse(to_json(run(again)));
    a.erase("wall_seconds");
    b.erase("wall_seconds");
    CHECK(a == b);
    CHECK(a["results"][0]["scenario"] == "setting3:gaussian:n=30:p=10");
    CHECK(a["adaptive"].contains("adpUmin"));
    CHECK_CODE(parse_scenario(R"({"generator":"setting3","sparsity":3})"), ErrorCode::InvalidParameters);
    CHECK_CODE(parse_scenario(R"({"test":{"family":"cov1"}})"), ErrorCode::InvalidArgument);
}

TEST_CASE("plan reports") {
    auto req = parse_plan_request(R"({"family":"cov1","p":100,"beta":0.1,"M":4})");
    auto plan = rho_curve(req.input, req.a_max);
    auto doc = json::parse(to_json(plan, req));
    CHECK(doc["adaptive"]["a0"] == 1);
    CHECK(doc["results"].size() == 6);
    auto back = parse_plan_request(doc.dump());
    CHECK(to_json(rho_curve(back.input, back.a_max), back) == doc.dump(2) + "\n");
    auto tsv = to_tsv(plan, req);
    CHECK(tsv.find("# a0=1") != std::string::npos);
}
