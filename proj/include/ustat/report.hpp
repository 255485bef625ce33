#pragma once

#include "ustat/pipeline.hpp"
#include "ustat/planner.hpp"
#include "ustat/sim.hpp"

#include <string>

namespace ustat {

const char* version();

// Where a `test` run read its data. Echoed in the report config.
struct InputPaths {
    std::string x, y, z, response;
    bool header = false;
};

struct TestRequest {
    TestConfig config;
    InputPaths inputs;
};

struct PlanRequest {
    PlanInput input;
    int a_max = 6;
    double C = 2.0;  // constant in the maximum-type rate
};

// Reports. JSON documents carry the keys "version", "config", "results",
// "adaptive"; the config object parses back into the same request.
std::string to_json(const TestReport& rep, const InputPaths& inputs);
std::string to_tsv(const TestReport& rep);
std::string to_json(const RejectionReport& rep);
std::string to_tsv(const RejectionReport& rep);
std::string to_json(const PowerPlan& plan, const PlanRequest& req);
std::string to_tsv(const PowerPlan& plan, const PlanRequest& req);

// Accept either a bare config object or a whole report (its "config" is used).
// Missing keys keep their defaults. throws Parse, InvalidArgument
TestRequest parse_test_request(const std::string& json_text);
Scenario parse_scenario(const std::string& json_text);
PlanRequest parse_plan_request(const std::string& json_text);

// The config objects alone, for embedding elsewhere.
std::string config_json(const TestRequest& req);
std::string config_json(const Scenario& scn);
std::string config_json(const PlanRequest& req);

TestReport run_request(const TestRequest& req);

}  // namespace ustat
