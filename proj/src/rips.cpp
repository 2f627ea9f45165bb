#include "ecp/rips.hpp"

#include "ecp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ecp
{

namespace
{

double distance(std::span<const double> a, std::span<const double> b)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        const double delta = a[i] - b[i];
        sum += delta * delta;
    }
    return std::sqrt(sum);
}

// Higher-indexed neighbours of every point in CSR form, ascending.
struct Adjacency
{
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> targets;

    std::span<const std::uint32_t> higher(std::uint32_t v) const
    {
        return {targets.data() + offsets[v], offsets[v + 1] - offsets[v]};
    }
};

Adjacency build_adjacency(const PointCloud& cloud, double max_radius)
{
    const std::size_t count = cloud.size();
    const int d = cloud.dimension;
    const double reach = 2.0 * max_radius;
    std::vector<std::vector<std::uint32_t>> lists(count);

    auto link = [&](std::size_t i, std::size_t j) {
        if (distance(cloud.point(i), cloud.point(j)) <= reach)
            lists[std::min(i, j)].push_back(static_cast<std::uint32_t>(std::max(i, j)));
    };

    bool bucketed = reach > 0.0;
    std::vector<long long> cells;
    if (bucketed)
    {
        cells.resize(count * static_cast<std::size_t>(d));
        for (std::size_t p = 0; p < count && bucketed; ++p)
        {
            for (int i = 0; i < d; ++i)
            {
                const double scaled = std::floor(cloud.point(p)[i] / reach);
                if (!(std::fabs(scaled) < 1e17))
                {
                    bucketed = false;
                    break;
                }
                cells[p * d + i] = static_cast<long long>(scaled);
            }
        }
    }

    if (bucketed)
    {
        auto cell_of = [&](std::size_t p) { return std::span<const long long>(cells.data() + p * d, d); };
        std::vector<std::uint32_t> order(count);
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            const auto ca = cell_of(a);
            const auto cb = cell_of(b);
            if (std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end()))
                return true;
            if (std::lexicographical_compare(cb.begin(), cb.end(), ca.begin(), ca.end()))
                return false;
            return a < b;
        });
        std::vector<long long> probe(static_cast<std::size_t>(d));
        std::vector<int> offset(static_cast<std::size_t>(d), -1);
        auto cell_less = [&](std::uint32_t p, const std::vector<long long>& key) {
            const auto c = cell_of(p);
            return std::lexicographical_compare(c.begin(), c.end(), key.begin(), key.end());
        };
        auto key_less = [&](const std::vector<long long>& key, std::uint32_t p) {
            const auto c = cell_of(p);
            return std::lexicographical_compare(key.begin(), key.end(), c.begin(), c.end());
        };
        for (std::size_t p = 0; p < count; ++p)
        {
            std::fill(offset.begin(), offset.end(), -1);
            // Walk the 3^d neighbouring cells.
            for (;;)
            {
                for (int i = 0; i < d; ++i)
                    probe[i] = cells[p * d + i] + offset[i];
                auto first = std::lower_bound(order.begin(), order.end(), probe, cell_less);
                auto last = std::upper_bound(first, order.end(), probe, key_less);
                for (auto it = first; it != last; ++it)
                    if (*it > p)
                        link(p, *it);
                int axis = 0;
                while (axis < d && offset[axis] == 1)
                    offset[axis++] = -1;
                if (axis == d)
                    break;
                ++offset[axis];
            }
        }
    }
    else
    {
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = i + 1; j < count; ++j)
                link(i, j);
    }

    Adjacency adjacency;
    adjacency.offsets.resize(count + 1, 0);
    for (std::size_t i = 0; i < count; ++i)
    {
        std::sort(lists[i].begin(), lists[i].end());
        adjacency.offsets[i + 1] = adjacency.offsets[i] + lists[i].size();
    }
    adjacency.targets.reserve(adjacency.offsets[count]);
    for (auto& list : lists)
        adjacency.targets.insert(adjacency.targets.end(), list.begin(), list.end());
    return adjacency;
}

class CliqueWalker
{
public:
    CliqueWalker(const PointCloud& cloud, const Adjacency& adjacency, const EnumerationOptions& options,
                 const std::function<void(const CliqueView&)>& visit)
        : cloud_(cloud), adjacency_(adjacency), options_(options), visit_(visit)
    {
    }

    EnumerationSummary run()
    {
        for (std::uint32_t v = 0; v < cloud_.size(); ++v)
        {
            clique_.assign(1, v);
            emit(0.0, v);
            const auto higher = adjacency_.higher(v);
            if (higher.empty())
                continue;
            if (at_cap())
            {
                summary_.truncated = true;
                continue;
            }
            extend(std::vector<std::uint32_t>(higher.begin(), higher.end()), 0.0, v);
        }
        return summary_;
    }

private:
    bool at_cap() const
    {
        return options_.dim_cap && static_cast<int>(clique_.size()) >= *options_.dim_cap + 1;
    }

    void emit(double birth, std::uint32_t leftmost)
    {
        if (++summary_.cliques > options_.clique_budget)
            throw CliqueBudgetExceeded("clique enumeration exceeded the budget of " +
                                       std::to_string(options_.clique_budget) + " cliques");
        summary_.max_dimension = std::max(summary_.max_dimension, static_cast<int>(clique_.size()) - 1);
        visit_(CliqueView{clique_, birth, leftmost});
    }

    // candidates: common higher neighbours of the current clique, ascending.
    void extend(const std::vector<std::uint32_t>& candidates, double birth, std::uint32_t leftmost)
    {
        for (std::size_t idx = 0; idx < candidates.size(); ++idx)
        {
            const std::uint32_t c = candidates[idx];
            double diameter = 2.0 * birth;
            for (std::uint32_t u : clique_)
                diameter = std::max(diameter, distance(cloud_.point(u), cloud_.point(c)));
            const std::uint32_t next_leftmost =
                lexicographically_less(cloud_.point(c), cloud_.point(leftmost)) ? c : leftmost;

            clique_.push_back(c);
            emit(diameter / 2.0, next_leftmost);

            const auto neighbours = adjacency_.higher(c);
            std::vector<std::uint32_t> next;
            std::set_intersection(candidates.begin() + static_cast<std::ptrdiff_t>(idx) + 1, candidates.end(),
                                  neighbours.begin(), neighbours.end(), std::back_inserter(next));
            if (!next.empty())
            {
                if (at_cap())
                    summary_.truncated = true;
                else
                    extend(next, diameter / 2.0, next_leftmost);
            }
            clique_.pop_back();
        }
    }

    const PointCloud& cloud_;
    const Adjacency& adjacency_;
    const EnumerationOptions& options_;
    const std::function<void(const CliqueView&)>& visit_;
    std::vector<std::uint32_t> clique_;
    EnumerationSummary summary_;
};

void check_cloud(const PointCloud& cloud)
{
    if (cloud.size() > 0 && cloud.context.n() == 0.0)
        throw ValidationError("euler curve: a non-empty cloud needs n > 0 for the time scaling");
    if (cloud.size() >= std::numeric_limits<std::uint32_t>::max())
        throw ValidationError("cloud too large for 32-bit vertex indices");
}

// Radius whose clique set is guaranteed to contain every clique with
// birth_radius / s_n <= t_max; the exact cut is applied in time units.
double enumeration_radius(const PointCloud& cloud, double t_max)
{
    return cloud.context.radius(t_max) * (1.0 + 1e-12);
}

double birth_time(const PointCloud& cloud, double birth_radius)
{
    return birth_radius == 0.0 ? 0.0 : birth_radius / cloud.context.s_n();
}

} // namespace

bool lexicographically_less(std::span<const double> a, std::span<const double> b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

EnumerationSummary enumerate_cliques(const PointCloud& cloud, double max_radius, const EnumerationOptions& options,
                                     const std::function<void(const CliqueView&)>& visit)
{
    if (!(max_radius >= 0.0))
        throw ValidationError("enumerate_cliques: max_radius must be >= 0");
    if (options.dim_cap && *options.dim_cap < 0)
        throw ValidationError("enumerate_cliques: dim_cap must be >= 0");
    if (cloud.size() >= std::numeric_limits<std::uint32_t>::max())
        throw ValidationError("cloud too large for 32-bit vertex indices");
    const Adjacency adjacency = build_adjacency(cloud, max_radius);
    return CliqueWalker(cloud, adjacency, options, visit).run();
}

std::vector<FiltrationSimplex> collect_cliques(const PointCloud& cloud, double max_radius,
                                               const EnumerationOptions& options, EnumerationSummary* summary)
{
    std::vector<FiltrationSimplex> out;
    const auto result = enumerate_cliques(cloud, max_radius, options, [&](const CliqueView& view) {
        out.push_back(FiltrationSimplex{{view.vertices.begin(), view.vertices.end()}, view.birth_radius, view.leftmost});
    });
    if (summary)
        *summary = result;
    return out;
}

std::int64_t EulerCurve::value_at(double t) const
{
    if (!(t >= 0.0 && t <= t_max))
        throw std::out_of_range("EulerCurve::value_at: t outside [0, t_max]");
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    if (it == breakpoints.begin())
        return initial_value;
    return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

std::vector<EulerCurve> euler_curves(const PointCloud& cloud, double t_max, std::span<const RegionSpec> regions,
                                     const EnumerationOptions& options)
{
    if (!(t_max >= 0.0) || !std::isfinite(t_max))
        throw ValidationError("euler_curve: t_max must be finite and >= 0");
    check_cloud(cloud);
    struct Event
    {
        double t;
        int sign;
    };
    std::vector<std::vector<Event>> events(regions.size());
    std::vector<std::int64_t> initial(regions.size(), 0);
    const auto summary = enumerate_cliques(cloud, enumeration_radius(cloud, t_max), options, [&](const CliqueView& view) {
        const double t = birth_time(cloud, view.birth_radius);
        if (t > t_max)
            return;
        const int sign = (view.vertices.size() % 2 == 1) ? 1 : -1;
        const auto lmp = cloud.point(view.leftmost);
        for (std::size_t r = 0; r < regions.size(); ++r)
        {
            if (!regions[r].contains(lmp))
                continue;
            if (t == 0.0)
                initial[r] += sign;
            else
                events[r].push_back({t, sign});
        }
    });

    std::vector<EulerCurve> curves(regions.size());
    for (std::size_t r = 0; r < regions.size(); ++r)
    {
        auto& curve = curves[r];
        curve.t_max = t_max;
        curve.initial_value = initial[r];
        curve.metadata = {cloud.seed, cloud.context.n(), cloud.dimension, options.dim_cap, summary.truncated,
                          summary.cliques};
        auto& list = events[r];
        std::sort(list.begin(), list.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
        std::int64_t running = initial[r];
        for (std::size_t i = 0; i < list.size();)
        {
            std::int64_t delta = 0;
            std::size_t j = i;
            for (; j < list.size() && list[j].t == list[i].t; ++j)
                delta += list[j].sign;
            if (delta != 0)
            {
                running += delta;
                curve.breakpoints.push_back(list[i].t);
                curve.values.push_back(running);
            }
            i = j;
        }
    }
    return curves;
}

EulerCurve euler_curve(const PointCloud& cloud, double t_max, const RegionSpec& region,
                       const EnumerationOptions& options)
{
    return std::move(euler_curves(cloud, t_max, std::span<const RegionSpec>(&region, 1), options).front());
}

std::vector<std::vector<std::int64_t>> euler_values(const PointCloud& cloud, std::span<const double> t_grid,
                                                    std::span<const RegionSpec> regions,
                                                    const EnumerationOptions& options, EnumerationSummary* summary)
{
    check_cloud(cloud);
    if (t_grid.empty())
        throw ValidationError("euler_values: empty time grid");
    for (std::size_t g = 0; g < t_grid.size(); ++g)
    {
        if (!(t_grid[g] >= 0.0) || !std::isfinite(t_grid[g]) || (g > 0 && !(t_grid[g] > t_grid[g - 1])))
            throw ValidationError("euler_values: time grid must be finite, non-negative and increasing");
    }
    const double t_max = t_grid.back();
    std::vector<std::vector<std::int64_t>> table(regions.size(), std::vector<std::int64_t>(t_grid.size(), 0));
    const auto result = enumerate_cliques(cloud, enumeration_radius(cloud, t_max), options, [&](const CliqueView& view) {
        const double t = birth_time(cloud, view.birth_radius);
        if (t > t_max)
            return;
        const auto slot = static_cast<std::size_t>(std::lower_bound(t_grid.begin(), t_grid.end(), t) - t_grid.begin());
        const int sign = (view.vertices.size() % 2 == 1) ? 1 : -1;
        const auto lmp = cloud.point(view.leftmost);
        for (std::size_t r = 0; r < regions.size(); ++r)
            if (regions[r].contains(lmp))
                table[r][slot] += sign;
    });
    for (auto& row : table)
        std::partial_sum(row.begin(), row.end(), row.begin());
    if (summary)
        *summary = result;
    return table;
}

namespace
{
std::vector<std::uint64_t> count_by_dimension(const PointCloud& cloud, double radius, const EnumerationOptions& options,
                                              const std::function<bool(double)>& present)
{
    std::vector<std::uint64_t> counts;
    enumerate_cliques(cloud, radius, options, [&](const CliqueView& view) {
        if (!present(view.birth_radius))
            return;
        const std::size_t k = view.vertices.size() - 1;
        if (counts.size() <= k)
            counts.resize(k + 1, 0);
        ++counts[k];
    });
    return counts;
}
} // namespace

std::vector<std::uint64_t> simplex_counts(const PointCloud& cloud, double t, const EnumerationOptions& options)
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw ValidationError("simplex_counts: t must be finite and >= 0");
    check_cloud(cloud);
    return count_by_dimension(cloud, enumeration_radius(cloud, t), options,
                              [&](double birth) { return birth_time(cloud, birth) <= t; });
}

std::vector<std::uint64_t> simplex_counts_at_radius(const PointCloud& cloud, double radius,
                                                    const EnumerationOptions& options)
{
    return count_by_dimension(cloud, radius, options, [](double) { return true; });
}

} // namespace ecp
