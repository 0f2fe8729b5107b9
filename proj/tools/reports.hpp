#pragma once

#include <string>

#include <json.hpp>

#include "marstab/graph.hpp"
#include "marstab/identify.hpp"
#include "marstab/rationalize.hpp"
#include "marstab/simulate.hpp"

namespace marstab::io {

/// 6 significant digits, the table-output convention.
std::string fmt6(double x);

std::string describe_path(const PathOfRemarriages& path);
nlohmann::json path_to_json(const PathOfRemarriages& path);

nlohmann::json index_report_json(const IndexReport& report);
std::string index_report_csv(const IndexReport& report);

nlohmann::json bounds_json(const SharingBounds& model, const SharingBounds& naive);
std::string bounds_csv(const SharingBounds& model, const SharingBounds& naive);

nlohmann::json experiment_json(const sim::ExperimentReport& report);
std::string experiment_csv(const sim::ExperimentReport& report);

}  // namespace marstab::io
