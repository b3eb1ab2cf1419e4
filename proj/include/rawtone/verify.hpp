#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace rawtone {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

struct VerifyOptions {
    std::string data_dir;  // empty: resolve via env / built-in default
};

/// Available suites: one per module plus "acceptance" (the release gate).
std::vector<std::string> verify_suite_names();

SuiteResult run_verify_suite(const std::string& name, const VerifyOptions& options = {});

/// Runs every suite ("all").
std::vector<SuiteResult> run_all_suites(const VerifyOptions& options = {});

nlohmann::json verify_report_json(const std::vector<SuiteResult>& results);

}  // namespace rawtone
