#include "ecp/errors.hpp"
#include "ecp/limit.hpp"
#include "ecp/parallel.hpp"
#include "ecp/random.hpp"
#include "limit_detail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ecp
{

namespace detail
{

namespace
{

constexpr std::uint64_t chunk_size = 1u << 16;

double squared_distance(const double* a, const double* b, int d)
{
    double sum = 0.0;
    for (int i = 0; i < d; ++i)
    {
        const double delta = a[i] - b[i];
        sum += delta * delta;
    }
    return sum;
}

double squared_norm(const double* a, int d)
{
    double sum = 0.0;
    for (int i = 0; i < d; ++i)
        sum += a[i] * a[i];
    return sum;
}

int bin_of(double diameter_sq, std::span<const double> thresholds_sq)
{
    return static_cast<int>(std::lower_bound(thresholds_sq.begin(), thresholds_sq.end(), diameter_sq) -
                            thresholds_sq.begin());
}

} // namespace

double absorb(double diameter, const double* y, const double* shared, int shared_count, const double* block,
              int block_count, int d, double cap)
{
    diameter = std::max(diameter, squared_norm(y, d));
    for (int q = 0; q < shared_count && diameter <= cap; ++q)
        diameter = std::max(diameter, squared_distance(y, shared + q * d, d));
    for (int q = 0; q < block_count && diameter <= cap; ++q)
        diameter = std::max(diameter, squared_distance(y, block + q * d, d));
    return diameter;
}

std::vector<std::uint64_t> DiameterBins::cumulative() const
{
    std::vector<std::uint64_t> out(counts);
    const int n = bins;
    for (int a = 0; a < n; ++a)
        for (int b = 1; b < n; ++b)
            out[a * n + b] += out[a * n + b - 1];
    for (int a = 1; a < n; ++a)
        for (int b = 0; b < n; ++b)
            out[a * n + b] += out[(a - 1) * n + b];
    return out;
}

std::uint64_t term_id(int j, int k1, int k2)
{
    return (static_cast<std::uint64_t>(j) << 42) | (static_cast<std::uint64_t>(k1) << 21) |
           static_cast<std::uint64_t>(k2);
}

DiameterBins sample_diameter_bins(int d, int j, int k1, int k2, std::span<const double> t_grid,
                                  std::uint64_t samples, std::uint64_t seed, int jobs)
{
    const int G = static_cast<int>(t_grid.size());
    std::vector<double> thresholds_sq(t_grid.size());
    for (int g = 0; g < G; ++g)
        thresholds_sq[g] = 4.0 * t_grid[g] * t_grid[g];
    const double cap = thresholds_sq.back();
    const double radius = 2.0 * t_grid.back();
    const int shared = j - 1;
    const int extra1 = k1 + 1 - j;
    const int extra2 = k2 + 1 - j;

    const std::uint64_t chunks = (samples + chunk_size - 1) / chunk_size;
    std::vector<std::vector<std::uint64_t>> partial(chunks);
    parallel_for(chunks, jobs, [&](std::size_t c) {
        auto& counts = partial[c];
        counts.assign(static_cast<std::size_t>((G + 1) * (G + 1)), 0);
        Variates rng(seed, c);
        std::vector<double> pts(static_cast<std::size_t>((shared + extra1 + extra2) * d));
        double* sh = pts.data();
        double* b1 = sh + shared * d;
        double* b2 = b1 + extra1 * d;
        const std::uint64_t begin = c * chunk_size;
        const std::uint64_t end = std::min(samples, begin + chunk_size);
        for (std::uint64_t i = begin; i < end; ++i)
        {
            int bin1 = G;
            int bin2 = G;
            double core = 0.0;
            for (int made = 0; made < shared && core <= cap; ++made)
            {
                rng.in_ball({sh + made * d, static_cast<std::size_t>(d)}, radius);
                core = absorb(core, sh + made * d, sh, made, nullptr, 0, d, cap);
            }
            if (core <= cap)
            {
                double diameter = core;
                for (int drawn = 0; drawn < extra1 && diameter <= cap; ++drawn)
                {
                    rng.in_ball({b1 + drawn * d, static_cast<std::size_t>(d)}, radius);
                    diameter = absorb(diameter, b1 + drawn * d, sh, shared, b1, drawn, d, cap);
                }
                if (diameter <= cap)
                    bin1 = bin_of(diameter, thresholds_sq);

                diameter = core;
                for (int drawn = 0; drawn < extra2 && diameter <= cap; ++drawn)
                {
                    rng.in_ball({b2 + drawn * d, static_cast<std::size_t>(d)}, radius);
                    diameter = absorb(diameter, b2 + drawn * d, sh, shared, b2, drawn, d, cap);
                }
                if (diameter <= cap)
                    bin2 = bin_of(diameter, thresholds_sq);
            }
            ++counts[static_cast<std::size_t>(bin1 * (G + 1) + bin2)];
        }
    });

    DiameterBins result;
    result.bins = G + 1;
    result.samples = samples;
    result.counts.assign(static_cast<std::size_t>((G + 1) * (G + 1)), 0);
    for (const auto& counts : partial)
        for (std::size_t i = 0; i < counts.size(); ++i)
            result.counts[i] += counts[i];
    return result;
}

} // namespace detail

std::string to_string(PsiMethod method)
{
    switch (method)
    {
    case PsiMethod::monte_carlo: return "monte-carlo";
    case PsiMethod::closed_form_1d: return "closed-form-1d";
    case PsiMethod::closed_form_trivial: return "closed-form-trivial";
    case PsiMethod::grid_quadrature: return "grid-quadrature";
    }
    return "unknown";
}

VolumePolicy parse_volume_policy(const std::string& name)
{
    if (name == "auto")
        return VolumePolicy::automatic;
    if (name == "monte-carlo")
        return VolumePolicy::monte_carlo;
    if (name == "grid-quadrature")
        return VolumePolicy::grid_quadrature;
    throw ValidationError("unknown volume method '" + name + "' (expected auto, monte-carlo or grid-quadrature)");
}

std::string to_string(VolumePolicy policy)
{
    switch (policy)
    {
    case VolumePolicy::automatic: return "auto";
    case VolumePolicy::monte_carlo: return "monte-carlo";
    case VolumePolicy::grid_quadrature: return "grid-quadrature";
    }
    return "unknown";
}

void IndicatorVolumeQuery::validate() const
{
    if (d < 1)
        throw ValidationError("indicator volume: dimension must be >= 1");
    if (k1 < 0 || k2 < 0)
        throw ValidationError("indicator volume: k1, k2 must be >= 0");
    if (j < 1 || j > std::min(k1, k2) + 1)
        throw ValidationError("indicator volume: j must lie in [1, min(k1,k2)+1]");
    if (!(t >= 0.0) || !(s >= 0.0) || !std::isfinite(t) || !std::isfinite(s))
        throw ValidationError("indicator volume: t and s must be finite and >= 0");
}

double unit_ball_volume(int d)
{
    if (d < 1)
        throw ValidationError("unit_ball_volume: dimension must be >= 1");
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double a_t(double t, int d, double sup_norm)
{
    return std::pow(2.0 * t, d) * unit_ball_volume(d) * sup_norm;
}

double indicator_volume_1d(int j, int k1, int k2, double t, double s)
{
    IndicatorVolumeQuery{1, k1, k2, j, t, s}.validate();
    // Volume of {y in R^m : diam{0, w, y} <= a} for a fixed shared span w is
    // alpha - beta w; integrate against the density of the shared span.
    auto coefficients = [](int m, double a) {
        if (m == 0)
            return std::pair{1.0, 0.0};
        return std::pair{(m + 1) * std::pow(a, m), m * std::pow(a, m - 1)};
    };
    const auto [alpha1, beta1] = coefficients(k1 + 1 - j, 2.0 * t);
    const auto [alpha2, beta2] = coefficients(k2 + 1 - j, 2.0 * s);
    const double A = alpha1 * alpha2;
    const double B = alpha1 * beta2 + alpha2 * beta1;
    const double C = beta1 * beta2;
    const double c = 2.0 * std::min(t, s);
    if (j == 1)
        return A;
    return j * A * std::pow(c, j - 1) - (j - 1) * B * std::pow(c, j) +
           static_cast<double>(j) * (j - 1) / (j + 1) * C * std::pow(c, j + 1);
}

namespace
{

PsiEstimate grid_quadrature(const IndicatorVolumeQuery& q, int resolution)
{
    const int F = q.free_points();
    const int dims = F * q.d;
    if (dims > 3)
        throw ValidationError("grid quadrature supports at most 3 integration dimensions");
    if (resolution < 2 || resolution % 2 != 0)
        throw ValidationError("grid quadrature resolution must be an even integer >= 2");
    const double T = std::max(q.t, q.s);
    if (T == 0.0)
        return {0.0, 0.0, 0, PsiMethod::grid_quadrature};
    const double cap1 = 4.0 * q.t * q.t;
    const double cap2 = 4.0 * q.s * q.s;
    const int shared = q.j - 1;
    const int extra1 = q.k1 + 1 - q.j;

    auto integrate = [&](int m) {
        const double h = 4.0 * T / m;
        std::vector<int> index(static_cast<std::size_t>(dims), 0);
        std::vector<double> pts(static_cast<std::size_t>(dims));
        std::uint64_t hits = 0;
        for (;;)
        {
            for (int i = 0; i < dims; ++i)
                pts[i] = -2.0 * T + (index[i] + 0.5) * h;
            const double inf = std::numeric_limits<double>::infinity();
            auto diameter = [&](int first_extra, int count_extra) {
                const double* sh = pts.data();
                const double* block = pts.data() + first_extra * q.d;
                double diam = 0.0;
                for (int p = 0; p < shared; ++p)
                    diam = detail::absorb(diam, sh + p * q.d, sh, p, nullptr, 0, q.d, inf);
                for (int p = 0; p < count_extra; ++p)
                    diam = detail::absorb(diam, block + p * q.d, sh, shared, block, p, q.d, inf);
                return diam;
            };
            if (diameter(shared, extra1) <= cap1 && diameter(shared + extra1, q.k2 + 1 - q.j) <= cap2)
                ++hits;
            int axis = 0;
            while (axis < dims && index[axis] == m - 1)
                index[axis++] = 0;
            if (axis == dims)
                break;
            ++index[axis];
        }
        return static_cast<double>(hits) * std::pow(h, dims);
    };
    const double fine = integrate(resolution);
    const double coarse = integrate(resolution / 2);
    return {fine, std::fabs(fine - coarse), static_cast<std::uint64_t>(std::pow(resolution, dims)),
            PsiMethod::grid_quadrature};
}

} // namespace

PsiEstimate indicator_volume(const IndicatorVolumeQuery& query, const McOptions& options)
{
    query.validate();
    if (query.k1 == 0 && query.k2 == 0)
        return {1.0, 0.0, 0, PsiMethod::closed_form_trivial};
    if (options.policy == VolumePolicy::automatic && query.d == 1)
        return {indicator_volume_1d(query.j, query.k1, query.k2, query.t, query.s), 0.0, 0,
                PsiMethod::closed_form_1d};
    if (options.policy == VolumePolicy::grid_quadrature)
        return grid_quadrature(query, options.grid_resolution);
    if (options.samples == 0)
        throw ValidationError("indicator volume: mc_samples must be > 0");

    const double lo = std::min(query.t, query.s);
    const double hi = std::max(query.t, query.s);
    std::vector<double> grid{lo};
    if (hi > lo)
        grid.push_back(hi);
    if (hi == 0.0)
        return {0.0, 0.0, options.samples, PsiMethod::monte_carlo};
    const auto bins = detail::sample_diameter_bins(query.d, query.j, query.k1, query.k2, grid, options.samples,
                                                   options.seed, options.jobs);
    const auto cumulative = bins.cumulative();
    const int a = query.t == hi ? static_cast<int>(grid.size()) - 1 : 0;
    const int b = query.s == hi ? static_cast<int>(grid.size()) - 1 : 0;
    const double N = static_cast<double>(options.samples);
    const double hits = static_cast<double>(cumulative[static_cast<std::size_t>(a * bins.bins + b)]);
    const double volume = std::pow(unit_ball_volume(query.d) * std::pow(2.0 * hi, query.d), query.free_points());
    const double laplace = (hits + 1.0) / (N + 2.0);
    return {volume * hits / N, volume * std::sqrt(laplace * (1.0 - laplace) / N), options.samples,
            PsiMethod::monte_carlo};
}

} // namespace ecp
