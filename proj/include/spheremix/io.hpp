#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "spheremix/approximator.hpp"
#include "spheremix/sphere_geometry.hpp"
#include "spheremix/vmf.hpp"

namespace spheremix {

using Json = nlohmann::json;

// Mixture: {"m": int, "components": [{"mu": [...], "kappa": real}, ...], "weights": [...]}
// Doubles are written in shortest round-trip form, so parse(dump(x)) == x bit for bit.
Json mixture_to_json(const VmfMixture& mix);
/// Throws FormatError on missing/ill-typed fields and DomainError on invalid values.
VmfMixture mixture_from_json(const Json& j);

// Partition: {"m": int, "blocks": [{"intervals": [[lo, hi], ...]}], "measures": [...]}
Json partition_to_json(const SphericalPartition& p);
SphericalPartition partition_from_json(const Json& j);

Json report_to_json(const ApproximationReport& report);
/// stage,n,levels,blocks,components,fallbacks,sup_error,convolution_term,discretization_term,accepted
std::string history_csv(const std::vector<StageRecord>& history);
/// n,levels,blocks,sup_error,convolution_term,discretization_term
std::string study_csv(const std::vector<StudyRow>& rows);

/// One point per line, comma separated; an optional non-numeric header line is skipped.
/// Every row must have the same number (>= 2) of finite values. Throws FormatError.
std::vector<std::vector<double>> parse_points_csv(std::istream& in);
/// Header x0..xm, 17 significant digits.
std::string points_csv(int m, const std::vector<UnitVector>& points);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace spheremix
