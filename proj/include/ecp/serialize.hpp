#pragma once

#include "ecp/gaussian_process.hpp"
#include "ecp/harness.hpp"
#include "ecp/limit.hpp"
#include "ecp/region.hpp"
#include "ecp/rips.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace ecp
{

/// "all-space" or "box[lo0,lo1..;hi0,hi1..)".
std::string region_label(const RegionSpec& region);

nlohmann::ordered_json to_json(const RegionSpec& region);
nlohmann::ordered_json to_json(const EulerCurve& curve);
nlohmann::ordered_json to_json(const PsiEstimate& estimate);
nlohmann::ordered_json to_json(const SeriesTruncation& truncation);
nlohmann::ordered_json to_json(const CovarianceGrid& grid);
nlohmann::ordered_json to_json(const GPPath& path);
nlohmann::ordered_json to_json(const IncrementReport& report);
nlohmann::ordered_json to_json(const NormalityResult& result);
nlohmann::ordered_json to_json(const ExperimentReport& report);

/// Columns t, chi: the initial value at t = 0, then one row per breakpoint.
void write_curve_csv(std::ostream& out, const EulerCurve& curve);

struct PsiRow
{
    int j = 1;
    int k1 = 0;
    int k2 = 0;
    double t = 0.0;
    double s = 0.0;
    PsiEstimate estimate;
};

/// Columns j, k1, k2, t, s, value, std_error, samples.
void write_psi_csv(std::ostream& out, const std::vector<PsiRow>& rows);

/// Columns n, t, s, statistic, empirical, predicted, pooled_se, z.
void write_report_csv(std::ostream& out, const ExperimentReport& report);

/// Columns: t followed by one column per path.
void write_paths_csv(std::ostream& out, const std::vector<GPPath>& paths);

/// JSON text with a trailing newline.
std::string dump(const nlohmann::ordered_json& value);

} // namespace ecp
