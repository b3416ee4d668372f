#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rflow {

struct CheckResult {
    std::string id;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

enum class VerifyLevel { quick, full };

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::full;
    unsigned workers = 0;          // 0 -> all hardware threads
    std::string scratch_dir = ""; // empty -> std::filesystem::temp_directory_path()
};

/// The thirteen acceptance checks. quick runs the same checks at reduced
/// sample counts; full runs them as stated.
std::vector<CheckResult> run_acceptance(const VerifyOptions& opts);

/// One line per check; returns 0 iff everything passed.
int report(const std::vector<CheckResult>& results, std::ostream& out);

} // namespace rflow
