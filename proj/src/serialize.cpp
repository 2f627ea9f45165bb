#include "ecp/serialize.hpp"

#include <cmath>
#include <ostream>

namespace ecp
{

namespace
{

using json = nlohmann::ordered_json;

// Non-finite values have no JSON literal; they are written as null.
json number(double x)
{
    if (!std::isfinite(x))
        return nullptr;
    return x;
}

json matrix_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
    {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(number(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_field(const std::string& text)
{
    if (text.find_first_of(",\"\n") == std::string::npos)
        return text;
    std::string quoted = "\"";
    for (char c : text)
    {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

} // namespace

std::string region_label(const RegionSpec& region)
{
    if (region.is_all_space())
        return "all-space";
    std::string label = "box[";
    const auto& box = region.bounds();
    for (std::size_t i = 0; i < box.lo.size(); ++i)
        label += (i ? " " : "") + format_double(box.lo[i]);
    label += ";";
    for (std::size_t i = 0; i < box.hi.size(); ++i)
        label += (i ? " " : "") + format_double(box.hi[i]);
    return label + ")";
}

json to_json(const RegionSpec& region)
{
    if (region.is_all_space())
        return {{"kind", "all-space"}};
    return {{"kind", "box"}, {"lo", region.bounds().lo}, {"hi", region.bounds().hi}};
}

json to_json(const EulerCurve& curve)
{
    json meta = {{"seed", curve.metadata.seed},
                 {"n", curve.metadata.n},
                 {"d", curve.metadata.dimension},
                 {"dim_cap", curve.metadata.dim_cap ? json(*curve.metadata.dim_cap) : json(nullptr)},
                 {"truncated", curve.metadata.truncated},
                 {"cliques", curve.metadata.cliques}};
    return {{"t_max", curve.t_max},
            {"initial_value", curve.initial_value},
            {"breakpoints", curve.breakpoints},
            {"values", curve.values},
            {"metadata", meta}};
}

json to_json(const PsiEstimate& estimate)
{
    return {{"value", number(estimate.value)},
            {"std_error", number(estimate.std_error)},
            {"samples", estimate.samples},
            {"method", to_string(estimate.method)}};
}

json to_json(const SeriesTruncation& truncation)
{
    return {{"k_max", truncation.k_max},
            {"tail_bound", number(truncation.tail_bound)},
            {"a_t", number(truncation.a_t)},
            {"epsilon", number(truncation.epsilon)}};
}

json to_json(const CovarianceGrid& grid)
{
    return {{"t_grid", grid.t_grid},
            {"matrix", matrix_json(grid.matrix)},
            {"std_error", matrix_json(grid.std_error)},
            {"psd_repair", grid.psd_repair},
            {"min_eigenvalue", number(grid.min_eigenvalue)},
            {"method", to_string(grid.method)},
            {"samples_per_term", grid.samples_per_term},
            {"truncation", to_json(grid.truncation)}};
}

json to_json(const GPPath& path)
{
    return {{"seed", path.seed}, {"t_grid", path.t_grid}, {"values", path.values}};
}

json to_json(const IncrementReport& report)
{
    return {{"increments", report.increments},
            {"increment_std_errors", report.increment_std_errors},
            {"ratios", report.ratios},
            {"C", report.C},
            {"negative_pairs", report.negative_pairs},
            {"negative_flagged", report.negative_flagged()}};
}

json to_json(const NormalityResult& r)
{
    return {{"n", r.n},
            {"skewness", number(r.skewness)},
            {"excess_kurtosis", number(r.excess_kurtosis)},
            {"skew_z", number(r.skew_z)},
            {"kurtosis_z", number(r.kurtosis_z)},
            {"anderson_darling", number(r.anderson_darling)},
            {"ad_critical", number(r.ad_critical)},
            {"skew_pass", r.skew_pass},
            {"kurtosis_pass", r.kurtosis_pass},
            {"ad_pass", r.ad_pass}};
}

json to_json(const ExperimentReport& report)
{
    json summaries = json::array();
    for (const auto& row : report.summaries)
    {
        summaries.push_back({{"n", row.n},
                             {"t", row.t},
                             {"region", row.region},
                             {"replications", row.replications},
                             {"raw_sum", row.raw_sum},
                             {"mean", number(row.mean)},
                             {"mean_se", number(row.mean_se)},
                             {"variance", number(row.variance)},
                             {"variance_se", number(row.variance_se)},
                             {"mean_abs_deviation", number(row.mean_abs_deviation)}});
    }
    json comparisons = json::array();
    for (const auto& row : report.comparisons)
    {
        comparisons.push_back({{"n", row.n},
                               {"t", row.t},
                               {"s", row.s},
                               {"statistic", row.statistic},
                               {"region", row.region},
                               {"empirical", number(row.empirical)},
                               {"empirical_se", number(row.empirical_se)},
                               {"predicted", number(row.predicted)},
                               {"predicted_se", number(row.predicted_se)},
                               {"pooled_se", number(row.pooled_se)},
                               {"z", number(row.z)},
                               {"gated", row.gated},
                               {"pass", row.pass}});
    }
    json normality = json::array();
    for (const auto& row : report.normality)
        normality.push_back({{"label", row.label}, {"result", to_json(row.result)}});
    json gates = json::array();
    for (const auto& gate : report.gates)
        gates.push_back({{"name", gate.name}, {"passed", gate.passed}, {"detail", gate.detail}});
    json truncations = json::array();
    for (const auto& t : report.truncations)
        truncations.push_back(to_json(t));
    return {{"kind", report.kind},
            {"passed", report.passed()},
            {"truncated_curves", report.truncated_curves},
            {"gates", gates},
            {"summaries", summaries},
            {"comparisons", comparisons},
            {"normality", normality},
            {"truncations", truncations}};
}

void write_curve_csv(std::ostream& out, const EulerCurve& curve)
{
    out << "t,chi\n";
    out << "0," << curve.initial_value << '\n';
    for (std::size_t i = 0; i < curve.breakpoints.size(); ++i)
        out << format_double(curve.breakpoints[i]) << ',' << curve.values[i] << '\n';
}

void write_psi_csv(std::ostream& out, const std::vector<PsiRow>& rows)
{
    out << "j,k1,k2,t,s,value,std_error,samples\n";
    for (const auto& row : rows)
    {
        out << row.j << ',' << row.k1 << ',' << row.k2 << ',' << format_double(row.t) << ','
            << format_double(row.s) << ',' << format_double(row.estimate.value) << ','
            << format_double(row.estimate.std_error) << ',' << row.estimate.samples << '\n';
    }
}

void write_report_csv(std::ostream& out, const ExperimentReport& report)
{
    out << "n,t,s,statistic,empirical,predicted,pooled_se,z\n";
    for (const auto& row : report.comparisons)
    {
        std::string statistic = row.statistic;
        if (row.region != "all-space")
            statistic += "@" + row.region;
        out << format_double(row.n) << ',' << format_double(row.t) << ',' << format_double(row.s) << ','
            << csv_field(statistic) << ',' << format_double(row.empirical) << ',' << format_double(row.predicted)
            << ',' << format_double(row.pooled_se) << ',' << format_double(row.z) << '\n';
    }
}

void write_paths_csv(std::ostream& out, const std::vector<GPPath>& paths)
{
    out << "t";
    for (std::size_t p = 0; p < paths.size(); ++p)
        out << ",path" << p;
    out << '\n';
    if (paths.empty())
        return;
    for (std::size_t g = 0; g < paths.front().t_grid.size(); ++g)
    {
        out << format_double(paths.front().t_grid[g]);
        for (const auto& path : paths)
            out << ',' << format_double(path.values[g]);
        out << '\n';
    }
}

std::string dump(const nlohmann::ordered_json& value)
{
    return value.dump(2) + "\n";
}

} // namespace ecp
