#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spaceform/verify.hpp"

using namespace spaceform;

TEST_CASE("randomized suites pass with a fixed seed") {
    for (const char* suite : {"geometry", "pucci", "lemma21", "sphere64"}) {
        const auto results = run_verify_suite(suite, 20240811, 500);
        for (const auto& r : results) {
            INFO(suite << " / " << r.name << ": " << r.first_counterexample);
            CHECK(r.passed());
            CHECK(r.trials > 0);
        }
    }
}

TEST_CASE("suite dispatch") {
    const auto all = run_verify_suite("all", 7, 50);
    CHECK(all.size() >= 10);
    CHECK_THROWS_AS(run_verify_suite("nonsense", 7, 50), std::invalid_argument);
}

TEST_CASE("pinned parameters flow through") {
    const PucciParams p(1.0, 1.25, 0.5);
    const auto results = verify_lemma21(99, 200, p);
    for (const auto& r : results) CHECK(r.passed());
    // invalid pinned parameters are rejected before any trial runs
    CHECK_THROWS_AS(PucciParams(2.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("violations are reported with a counterexample") {
    // a deliberately wrong suite is not part of the library; instead check
    // the report formatting path on a passing run
    const auto results = verify_sphere64(5, 100);
    const std::string text = format_suite_report(results);
    CHECK(text.find("[PASS]") != std::string::npos);
    CHECK(text.find("100/100") != std::string::npos);
}
