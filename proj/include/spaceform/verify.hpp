#pragma once

#include "spaceform/pucci.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spaceform {

struct SuiteResult {
    std::string name;
    long trials = 0;
    long failures = 0;
    double worst_margin = 0.0; // smallest slack seen (negative = violation)
    std::string first_counterexample;

    bool passed() const { return failures == 0; }
};

/// Randomized property suites. When `fixed` is given, parameter draws are
/// pinned to it instead of being sampled.
std::vector<SuiteResult> verify_geometry(std::uint64_t seed, long trials);
std::vector<SuiteResult> verify_pucci(std::uint64_t seed, long trials,
                                      const std::optional<PucciParams>& fixed = std::nullopt);
std::vector<SuiteResult> verify_lemma21(std::uint64_t seed, long trials,
                                        const std::optional<PucciParams>& fixed = std::nullopt);
std::vector<SuiteResult> verify_sphere64(std::uint64_t seed, long trials,
                                         const std::optional<PucciParams>& fixed = std::nullopt);

/// Dispatch by suite name: geometry, pucci, lemma21, sphere64, all.
std::vector<SuiteResult> run_verify_suite(const std::string& suite, std::uint64_t seed, long trials,
                                          const std::optional<PucciParams>& fixed = std::nullopt);

std::string format_suite_report(const std::vector<SuiteResult>& results);

} // namespace spaceform
