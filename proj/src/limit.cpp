#include "ecp/errors.hpp"
#include "ecp/limit.hpp"
#include "ecp/random.hpp"
#include "limit_detail.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ecp
{

namespace
{

double factorial(int n)
{
    return std::tgamma(n + 1.0);
}

// sum_{p > m} a^p / p!
double exp_remainder(double a, int m)
{
    if (a == 0.0)
        return 0.0;
    const double log_a = std::log(a);
    double sum = 0.0;
    for (int p = m + 1;; ++p)
    {
        const double term = std::exp(p * log_a - std::lgamma(p + 1.0));
        sum += term;
        if (p > a && term <= 1e-18 * sum)
            break;
        if (p > m + 100000)
            break;
    }
    return sum;
}

void check_epsilon(double epsilon)
{
    if (!(epsilon > 0.0))
        throw ValidationError("truncation: epsilon must be > 0");
}

template <typename Bound>
SeriesTruncation certify(double a, double epsilon, int k_max_cap, Bound&& bound, const char* what)
{
    check_epsilon(epsilon);
    if (!(a >= 0.0) || !std::isfinite(a))
        throw ValidationError("truncation: a_t must be finite and >= 0");
    for (int k = 0; k <= k_max_cap; ++k)
    {
        const double tail = bound(a, k);
        if (tail <= epsilon)
            return {k, tail, a, epsilon};
    }
    throw TruncationCapExceeded(std::string(what) + ": no k_max <= " + std::to_string(k_max_cap) +
                                " brings the tail below epsilon (a_t = " + std::to_string(a) +
                                "); reduce t or raise the cap");
}

void check_model_region(const DensityModel& model, const RegionSpec& region)
{
    if (!region.is_all_space() && static_cast<int>(region.bounds().lo.size()) != model.dimension())
        throw ValidationError("region dimension does not match the density dimension");
}

struct Accumulator
{
    double value = 0.0;
    double variance = 0.0;
    std::uint64_t samples = 0;
    bool monte_carlo = false;
    bool quadrature = false;
    bool closed = false;

    void add(double sign, const PsiEstimate& e)
    {
        value += sign * e.value;
        variance += e.std_error * e.std_error;
        samples += e.samples;
        monte_carlo |= e.method == PsiMethod::monte_carlo;
        quadrature |= e.method == PsiMethod::grid_quadrature;
        closed |= e.method == PsiMethod::closed_form_1d;
    }

    PsiEstimate result() const
    {
        PsiMethod method = PsiMethod::closed_form_trivial;
        if (monte_carlo)
            method = PsiMethod::monte_carlo;
        else if (quadrature)
            method = PsiMethod::grid_quadrature;
        else if (closed)
            method = PsiMethod::closed_form_1d;
        return {value, std::sqrt(variance), samples, method};
    }
};

void check_grid(std::span<const double> grid)
{
    if (grid.empty())
        throw ValidationError("covariance grid: t_grid must be non-empty");
    for (std::size_t g = 0; g < grid.size(); ++g)
    {
        if (!(grid[g] >= 0.0) || !std::isfinite(grid[g]) || (g > 0 && !(grid[g] > grid[g - 1])))
            throw ValidationError("covariance grid: t_grid must be finite, non-negative and strictly increasing");
    }
}

} // namespace

double mean_tail_bound(double a, int k_max)
{
    if (a == 0.0)
        return 0.0;
    return exp_remainder(a, k_max + 1) / a;
}

double covariance_tail_bound(double a, int k_max)
{
    if (a == 0.0)
        return 0.0;
    const double ea = std::exp(a);
    double tail = 0.0;
    for (int j = 1; j <= k_max + 1; ++j)
    {
        const double r = exp_remainder(a, k_max + 1 - j);
        tail += std::pow(a, j - 1) / factorial(j) * r * (2.0 * ea - r);
    }
    tail += ea * ea * exp_remainder(a, k_max + 1) / a;
    return tail;
}

SeriesTruncation mean_truncation(double a, double epsilon, int k_max_cap)
{
    return certify(a, epsilon, k_max_cap, mean_tail_bound, "limit mean");
}

SeriesTruncation covariance_truncation(double a, double epsilon, int k_max_cap)
{
    return certify(a, epsilon, k_max_cap, covariance_tail_bound, "limit covariance");
}

PsiEstimate psi(int j, int k1, int k2, double t, double s, const DensityModel& model, const RegionSpec& region,
                const McOptions& options)
{
    if (k1 < 0 || k2 < 0 || j < 1 || j > std::min(k1, k2) + 1)
        throw ValidationError("psi: invalid (j, k1, k2) = (" + std::to_string(j) + ", " + std::to_string(k1) + ", " +
                              std::to_string(k2) + ")");
    check_model_region(model, region);
    const IndicatorVolumeQuery query{model.dimension(), k1, k2, j, t, s};
    auto estimate = indicator_volume(query, options);
    const double prefactor = model.power_integral(k1 + k2 + 2 - j, region) /
                             (factorial(j) * factorial(k1 + 1 - j) * factorial(k2 + 1 - j));
    estimate.value *= prefactor;
    estimate.std_error *= prefactor;
    return estimate;
}

PsiEstimate Psi(int k1, int k2, double t, double s, const DensityModel& model, const RegionSpec& region,
                const McOptions& options)
{
    if (k1 < 0 || k2 < 0)
        throw ValidationError("Psi: k1, k2 must be >= 0");
    Accumulator total;
    for (int j = 1; j <= std::min(k1, k2) + 1; ++j)
    {
        McOptions term = options;
        term.seed = combine_seed(options.seed, static_cast<std::uint64_t>(j));
        total.add(1.0, psi(j, k1, k2, t, s, model, region, term));
    }
    return total.result();
}

PsiEstimate limit_mean_partial(double t, const DensityModel& model, const RegionSpec& region, int k_max,
                               const McOptions& options)
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw ValidationError("limit mean: t must be finite and >= 0");
    if (k_max < 0)
        throw ValidationError("limit mean: k_max must be >= 0");
    Accumulator total;
    for (int k = 0; k <= k_max; ++k)
    {
        McOptions term = options;
        term.seed = combine_seed(options.seed, detail::term_id(k + 1, k, k));
        total.add(k % 2 == 0 ? 1.0 : -1.0, psi(k + 1, k, k, t, t, model, region, term));
    }
    return total.result();
}

LimitMean limit_mean(double t, const DensityModel& model, const RegionSpec& region, const LimitOptions& options)
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw ValidationError("limit mean: t must be finite and >= 0");
    const auto truncation =
        mean_truncation(a_t(t, model.dimension(), model.sup_norm()), options.epsilon, options.k_max_cap);
    return {limit_mean_partial(t, model, region, truncation.k_max, options.mc), truncation};
}

CovarianceGrid limit_covariance_grid(std::span<const double> t_grid, const DensityModel& model,
                                     const RegionSpec& region, const LimitOptions& options)
{
    check_grid(t_grid);
    check_model_region(model, region);
    const int d = model.dimension();
    const int G = static_cast<int>(t_grid.size());
    const double T = t_grid.back();

    CovarianceGrid out;
    out.t_grid.assign(t_grid.begin(), t_grid.end());
    out.truncation = covariance_truncation(a_t(T, d, model.sup_norm()), options.epsilon, options.k_max_cap);
    const int K = out.truncation.k_max;
    const bool closed = options.mc.policy == VolumePolicy::automatic && d == 1;
    if (options.mc.policy == VolumePolicy::grid_quadrature)
        throw ValidationError("covariance grid: grid quadrature is only available for single indicator volumes");
    if (!closed && options.mc.samples == 0)
        throw ValidationError("covariance grid: mc_samples must be > 0");

    std::map<int, double> power_cache;
    auto power = [&](int p) {
        auto it = power_cache.find(p);
        if (it == power_cache.end())
            it = power_cache.emplace(p, model.power_integral(p, region)).first;
        return it->second;
    };

    Eigen::MatrixXd value = Eigen::MatrixXd::Zero(G, G);
    Eigen::MatrixXd variance = Eigen::MatrixXd::Zero(G, G);
    bool sampled = false;
    for (int k1 = 0; k1 <= K; ++k1)
    {
        for (int k2 = k1; k2 <= K; ++k2)
        {
            const double sign = (k1 + k2) % 2 == 0 ? 1.0 : -1.0;
            for (int j = 1; j <= k1 + 1; ++j)
            {
                const int m1 = k1 + 1 - j;
                const int m2 = k2 + 1 - j;
                const double prefactor = power(k1 + k2 + 2 - j) / (factorial(j) * factorial(m1) * factorial(m2));
                if (k2 == 0)
                {
                    value.array() += prefactor;
                    continue;
                }
                if (closed)
                {
                    for (int a = 0; a < G; ++a)
                    {
                        for (int b = 0; b < G; ++b)
                        {
                            double volume = indicator_volume_1d(j, k1, k2, t_grid[a], t_grid[b]);
                            if (k1 < k2)
                                volume += indicator_volume_1d(j, k1, k2, t_grid[b], t_grid[a]);
                            value(a, b) += sign * prefactor * volume;
                        }
                    }
                    continue;
                }
                if (T == 0.0)
                    continue;
                sampled = true;
                const auto bins =
                    detail::sample_diameter_bins(d, j, k1, k2, t_grid, options.mc.samples,
                                                 combine_seed(options.mc.seed, detail::term_id(j, k1, k2)),
                                                 options.mc.jobs);
                const auto cumulative = bins.cumulative();
                const double N = static_cast<double>(options.mc.samples);
                const double scale =
                    std::pow(unit_ball_volume(d) * std::pow(2.0 * T, d), k1 + k2 + 1 - j) * prefactor;
                auto hits = [&](int a, int b) {
                    return static_cast<double>(cumulative[static_cast<std::size_t>(a * bins.bins + b)]);
                };
                auto adjusted = [&](double h) { return (h + 1.0) / (N + 2.0); };
                for (int a = 0; a < G; ++a)
                {
                    for (int b = 0; b < G; ++b)
                    {
                        const int m = std::min(a, b);
                        const double p_ab = adjusted(hits(a, b));
                        const double p_ba = adjusted(hits(b, a));
                        const double p_mm = adjusted(hits(m, m));
                        double var = p_ab + p_ba + 2.0 * p_mm - (p_ab + p_ba) * (p_ab + p_ba);
                        var = std::max(var, p_ab * (1.0 - p_ab));
                        double estimate = (hits(a, b) + hits(b, a)) / N;
                        if (k1 == k2)
                        {
                            estimate *= 0.5;
                            var *= 0.25;
                        }
                        value(a, b) += sign * scale * estimate;
                        variance(a, b) += scale * scale * var / N;
                    }
                }
            }
        }
    }
    out.matrix = 0.5 * (value + value.transpose());
    out.std_error = variance.cwiseSqrt();
    out.method = sampled ? PsiMethod::monte_carlo : (closed && K > 0 ? PsiMethod::closed_form_1d
                                                                     : PsiMethod::closed_form_trivial);
    out.samples_per_term = sampled ? options.mc.samples : 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.matrix, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = solver.eigenvalues().minCoeff();
    return out;
}

LimitCovariance limit_covariance(double t, double s, const DensityModel& model, const RegionSpec& region,
                                 const LimitOptions& options)
{
    std::vector<double> grid{std::min(t, s)};
    if (std::max(t, s) > grid.front())
        grid.push_back(std::max(t, s));
    const auto cov = limit_covariance_grid(grid, model, region, options);
    const int a = t == grid.back() ? static_cast<int>(grid.size()) - 1 : 0;
    const int b = s == grid.back() ? static_cast<int>(grid.size()) - 1 : 0;
    return {{cov.matrix(a, b), cov.std_error(a, b), cov.samples_per_term, cov.method}, cov.truncation};
}

} // namespace ecp
