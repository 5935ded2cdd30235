#pragma once

// Identity-verification suites. Each suite runs a family of exact or
// tolerance-pinned checks and returns one record per check instance.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace hofa {

struct CheckRecord {
    std::string check;
    /// Short name of the identity or inequality under test.
    std::string lemma;
    nlohmann::json params;
    /// Digest of (check, params, seed); enough to rerun the instance.
    std::string inputs_digest;
    nlohmann::json lhs;
    nlohmann::json rhs;
    double tolerance = 0;
    bool pass = true;
    nlohmann::json witness;
    double runtime = 0;
};

struct SuiteParams {
    /// 0 (or -1 for degree) selects the suite's default ranges.
    int p = 0;
    int n = 0;
    int degree = -1;
    std::uint64_t seed = 1;
    /// Estimated elementary operations; 0 means unlimited.
    std::uint64_t budget = 0;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CheckRecord> records;

    bool pass() const;
    std::size_t failures() const;
    nlohmann::json to_json(bool timing = false) const;
    /// One row per record: suite,check,lemma,inputs_digest,lhs,rhs,tolerance,pass[,runtime].
    std::string to_csv(bool timing = false) const;
};

const std::vector<std::string>& suite_names();

/// Throws Error for an unknown name and BudgetExceeded past params.budget.
SuiteReport run_suite(const std::string& name, const SuiteParams& params);

}  // namespace hofa
