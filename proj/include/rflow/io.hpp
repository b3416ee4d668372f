#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "rflow/derivative.hpp"
#include "rflow/example2d.hpp"
#include "rflow/excursions.hpp"
#include "rflow/sde.hpp"

// All numeric output uses 17 significant digits so that files round-trip
// doubles exactly and reruns are byte-comparable.

namespace rflow {

std::string fmt17(double v);

std::string path_csv(const ReflectedPath& path);                    // time,x_1..x_d,L
std::string derivative_csv(const DerivativeSolution& sol);          // time,g_11..g_dd,method,residual
std::string scan_csv(const example2d::ScanReport& report);          // x1,f,jump_flag

nlohmann::json decomposition_json(const ExcursionDecomposition& dec);
nlohmann::json derivative_metadata_json(const DerivativeSolution& sol);
nlohmann::json scan_summary_json(const example2d::ScanReport& report);

/// Write atomically enough for our purposes: throws with the path named on
/// any failure, leaving no partial file behind.
void write_file(const std::filesystem::path& path, const std::string& contents);

} // namespace rflow
