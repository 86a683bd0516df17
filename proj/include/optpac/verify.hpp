#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace optpac {

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::vector<std::string> failures;

  bool passed() const noexcept { return failures.empty(); }
};

/// core, erm, subsample, boost, learner, analysis, experiments.
const std::vector<std::string>& suite_names();

/// Runs one invariant suite; throws BadParams for an unknown name.
SuiteResult run_suite(const std::string& name, std::uint64_t seed = 20240601);

/// All suites, or only those named.
std::vector<SuiteResult> run_verify(const std::vector<std::string>& only = {},
                                    std::uint64_t seed = 20240601);

}  // namespace optpac
