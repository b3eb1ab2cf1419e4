// Acceptance gate: runs every release criterion and prints one pass/fail
// line per criterion. Exits non-zero if any criterion fails.

#include <cstdio>
#include <cstdlib>

#include "rawtone/verify.hpp"

int main(int argc, char** argv) {
    rawtone::VerifyOptions options;
    if (argc > 1) options.data_dir = argv[1];
    if (options.data_dir.empty()) {
        if (const char* env = std::getenv("RAWTONE_DATA"); env && *env)
            options.data_dir = env;
        else
            options.data_dir = RAWTONE_TEST_DATA_DIR;
    }

    rawtone::SuiteResult result;
    try {
        result = rawtone::run_verify_suite("acceptance", options);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
        return 2;
    }

    int failed = 0;
    int index = 0;
    for (const auto& c : result.checks) {
        ++index;
        std::printf("%s  %2d. %s — %s\n", c.pass ? "PASS" : "FAIL", index, c.name.c_str(),
                    c.detail.c_str());
        if (!c.pass) ++failed;
    }
    std::printf("%d/%zu criteria passed\n", index - failed, result.checks.size());
    return failed == 0 ? 0 : 1;
}
