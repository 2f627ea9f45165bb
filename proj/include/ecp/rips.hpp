#pragma once

#include "ecp/point_process.hpp"
#include "ecp/region.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ecp
{

/// Ball-radius convention throughout: a simplex is present at radius r when
/// all pairwise distances are <= 2r, so its birth radius is half its diameter.
struct FiltrationSimplex
{
    std::vector<std::uint32_t> vertices; // strictly increasing
    double birth_radius = 0.0;
    std::uint32_t leftmost = 0;          // index of the lexicographically least vertex

    int dimension() const { return static_cast<int>(vertices.size()) - 1; }
};

struct EnumerationOptions
{
    /// Largest simplex dimension emitted; cliques with more than dim_cap+1
    /// vertices are suppressed and flagged.
    std::optional<int> dim_cap;
    std::uint64_t clique_budget = 100'000'000;
};

struct EnumerationSummary
{
    std::uint64_t cliques = 0;
    int max_dimension = -1;
    bool truncated = false;
};

/// Read-only view handed to the enumeration callback; valid only during the call.
struct CliqueView
{
    std::span<const std::uint32_t> vertices;
    double birth_radius;
    std::uint32_t leftmost;
};

/// Enumerates every clique of the graph with edges at distance <= 2 max_radius,
/// each exactly once, by ordered extension through higher-indexed common
/// neighbours. Throws CliqueBudgetExceeded past the budget.
EnumerationSummary enumerate_cliques(const PointCloud& cloud, double max_radius, const EnumerationOptions& options,
                                     const std::function<void(const CliqueView&)>& visit);

std::vector<FiltrationSimplex> collect_cliques(const PointCloud& cloud, double max_radius,
                                               const EnumerationOptions& options = {},
                                               EnumerationSummary* summary = nullptr);

/// Lexicographic order on coordinate vectors.
bool lexicographically_less(std::span<const double> a, std::span<const double> b);

/// Right-continuous integer step function of t (radius s_n t) on [0, t_max].
struct EulerCurve
{
    double t_max = 0.0;
    std::int64_t initial_value = 0;
    std::vector<double> breakpoints;    // strictly increasing, > 0
    std::vector<std::int64_t> values;   // values[i] holds on [breakpoints[i], next)

    struct Metadata
    {
        std::uint64_t seed = 0;
        double n = 0.0;
        int dimension = 0;
        std::optional<int> dim_cap;
        bool truncated = false;
        std::uint64_t cliques = 0;

        bool operator==(const Metadata&) const = default;
    } metadata;

    /// Value at t in [0, t_max]; throws std::out_of_range outside.
    std::int64_t value_at(double t) const;
    bool operator==(const EulerCurve& other) const = default;
};

/// Euler characteristic process restricted to simplices whose left-most point
/// lies in `region`. Each simplex contributes (-1)^dim from its birth time
/// birth_radius / s_n; simultaneous births share one breakpoint and breakpoints
/// with zero net change are dropped.
EulerCurve euler_curve(const PointCloud& cloud, double t_max, const RegionSpec& region = RegionSpec::all_space(),
                       const EnumerationOptions& options = {});

/// One enumeration, one curve per region.
std::vector<EulerCurve> euler_curves(const PointCloud& cloud, double t_max, std::span<const RegionSpec> regions,
                                     const EnumerationOptions& options = {});

/// chi_{n,A}(t) at each t of an increasing grid, for each region: result[r][g].
/// Matches euler_curve(...).value_at(t_grid[g]) exactly.
std::vector<std::vector<std::int64_t>> euler_values(const PointCloud& cloud, std::span<const double> t_grid,
                                                    std::span<const RegionSpec> regions,
                                                    const EnumerationOptions& options = {},
                                                    EnumerationSummary* summary = nullptr);

/// S_k(P_n, r_n(t)) for k = 0.. (trailing zeros trimmed; empty for an empty cloud).
std::vector<std::uint64_t> simplex_counts(const PointCloud& cloud, double t, const EnumerationOptions& options = {});
/// Same, at an explicit ball radius instead of a time parameter.
std::vector<std::uint64_t> simplex_counts_at_radius(const PointCloud& cloud, double radius,
                                                    const EnumerationOptions& options = {});

} // namespace ecp
