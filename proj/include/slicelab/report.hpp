#pragma once

#include "slicelab/harness.hpp"

#include <string>
#include <utility>
#include <vector>

namespace slicelab {

// JSON object for one verdict; scalars are printed with 17 significant
// digits so values round-trip exactly
std::string report_json(const InequalityReport& r);

// one JSON document per check id, in first-appearance order
std::vector<std::pair<std::string, std::string>> check_documents(
    const std::vector<InequalityReport>& reports);

// columns: inequality_id, body, density, n, lhs, rhs, ratio, constant,
// pass, seed
std::string summary_csv(const std::vector<InequalityReport>& reports);

// writes summary.csv, one <check>.json per check and notices.txt (when any)
// into dir, creating it if needed
void write_experiment_reports(const ExperimentRun& run, const std::string& dir);

}  // namespace slicelab
