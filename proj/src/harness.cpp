#include "ecp/harness.hpp"

#include "ecp/errors.hpp"
#include "ecp/parallel.hpp"
#include "ecp/random.hpp"
#include "ecp/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace ecp
{

namespace
{

constexpr std::uint64_t projection_stream = 0x70726f6aULL;
constexpr std::uint64_t palm_mc_stream = 0x70616c6dULL;

void require_exact(const CampaignConfig& cfg)
{
    if (cfg.dim_cap)
        throw ValidationError("campaigns require exact Euler curves; remove dim_cap");
}

std::vector<RegionSpec> campaign_regions(const CampaignConfig& cfg)
{
    std::vector<RegionSpec> regions{RegionSpec::all_space()};
    if (!cfg.region.is_all_space())
        regions.push_back(cfg.region);
    return regions;
}

std::string format_t(double t)
{
    return "t=" + format_double(t);
}

double binomial(int n, int k)
{
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

ComparisonRow compare(double n, double t, double s, std::string statistic, std::string region, double empirical,
                      double empirical_se, double predicted, double predicted_se, bool gated, double threshold)
{
    ComparisonRow row;
    row.n = n;
    row.t = t;
    row.s = s;
    row.statistic = std::move(statistic);
    row.region = std::move(region);
    row.empirical = empirical;
    row.empirical_se = empirical_se;
    row.predicted = predicted;
    row.predicted_se = predicted_se;
    row.pooled_se = std::sqrt(empirical_se * empirical_se + predicted_se * predicted_se);
    row.z = pooled_z(empirical, empirical_se, predicted, predicted_se);
    row.gated = gated;
    row.pass = std::fabs(row.z) <= threshold;
    return row;
}

Gate comparison_gate(const std::string& name, const std::vector<ComparisonRow>& rows)
{
    int gated = 0;
    int failed = 0;
    double worst = 0.0;
    for (const auto& row : rows)
    {
        if (!row.gated)
            continue;
        ++gated;
        failed += row.pass ? 0 : 1;
        worst = std::max(worst, std::fabs(row.z));
    }
    std::ostringstream detail;
    detail << failed << " of " << gated << " gated comparisons outside the z threshold; max |z| = "
           << format_double(worst);
    return {name, failed == 0 && gated > 0, detail.str()};
}

std::vector<SummaryRow> summarise(const ChiSamples& samples, std::size_t region_index, const std::string& label,
                                  const std::vector<double>* predicted_mean)
{
    std::vector<SummaryRow> rows;
    const auto& reps = samples.values[region_index];
    const double n = samples.n;
    for (std::size_t g = 0; g < samples.t_grid.size(); ++g)
    {
        SummaryRow row;
        row.n = n;
        row.t = samples.t_grid[g];
        row.region = label;
        row.replications = static_cast<int>(reps.size());
        RunningStats stats;
        std::vector<double> scaled;
        double deviation = 0.0;
        for (const auto& rep : reps)
        {
            row.raw_sum += rep[g];
            const double x = static_cast<double>(rep[g]) / n;
            stats.add(x);
            scaled.push_back(static_cast<double>(rep[g]) / std::sqrt(n));
            if (predicted_mean)
                deviation += std::fabs(x - (*predicted_mean)[g]);
        }
        row.mean = stats.mean();
        row.mean_se = stats.std_error();
        row.variance = stats.variance() * n;
        row.variance_se = variance_std_error(scaled);
        row.mean_abs_deviation =
            predicted_mean ? deviation / static_cast<double>(reps.size()) : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd chi_matrix(const std::vector<std::vector<std::int64_t>>& reps, double scale)
{
    const auto R = static_cast<Eigen::Index>(reps.size());
    const auto G = static_cast<Eigen::Index>(reps.empty() ? 0 : reps.front().size());
    Eigen::MatrixXd out(R, G);
    for (Eigen::Index r = 0; r < R; ++r)
        for (Eigen::Index g = 0; g < G; ++g)
            out(r, g) = static_cast<double>(reps[r][g]) * scale;
    return out;
}

std::vector<double> predicted_means(const CampaignConfig& cfg, const RegionSpec& region,
                                    std::vector<double>& std_errors, std::vector<SeriesTruncation>& truncations)
{
    std::vector<double> means;
    std_errors.clear();
    for (double t : cfg.t_grid)
    {
        const auto limit = limit_mean(t, cfg.model, region, cfg.limit_options());
        means.push_back(limit.estimate.value);
        std_errors.push_back(limit.estimate.std_error);
        truncations.push_back(limit.truncation);
    }
    return means;
}

} // namespace

void CampaignConfig::validate() const
{
    if (replications < 2)
        throw ValidationError("campaign: replications must be >= 2");
    if (n_values.empty())
        throw ValidationError("campaign: n_values must be non-empty");
    for (std::size_t i = 0; i < n_values.size(); ++i)
    {
        if (!(n_values[i] > 0.0) || !std::isfinite(n_values[i]) || (i > 0 && !(n_values[i] > n_values[i - 1])))
            throw ValidationError("campaign: n_values must be positive, finite and strictly increasing");
    }
    if (t_grid.empty())
        throw ValidationError("campaign: t_grid must be non-empty");
    for (std::size_t i = 0; i < t_grid.size(); ++i)
    {
        if (!(t_grid[i] >= 0.0) || !std::isfinite(t_grid[i]) || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
            throw ValidationError("campaign: t_grid must be non-negative, finite and strictly increasing");
    }
    if (!(epsilon > 0.0))
        throw ValidationError("campaign: epsilon must be > 0");
    if (jobs < 1)
        throw ValidationError("campaign: jobs must be >= 1");
    if (projections < 0)
        throw ValidationError("campaign: projections must be >= 0");
    if (!(z_threshold > 0.0))
        throw ValidationError("campaign: z_threshold must be > 0");
    if (!(normality_pass_fraction >= 0.0 && normality_pass_fraction <= 1.0))
        throw ValidationError("campaign: normality_pass_fraction must lie in [0, 1]");
    if (!region.is_all_space() && static_cast<int>(region.bounds().lo.size()) != model.dimension())
        throw ValidationError("campaign: region dimension does not match the density");
}

LimitOptions CampaignConfig::limit_options() const
{
    LimitOptions options;
    options.epsilon = epsilon;
    options.k_max_cap = k_max_cap;
    options.mc.samples = mc_samples;
    options.mc.seed = base_seed;
    options.mc.policy = volume_policy;
    options.mc.jobs = jobs;
    return options;
}

bool ExperimentReport::passed() const
{
    return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.passed; });
}

ChiSamples simulate_chi(const CampaignConfig& cfg, double n, std::size_t n_index, std::span<const RegionSpec> regions)
{
    ChiSamples out;
    out.n = n;
    out.t_grid = cfg.t_grid;
    const auto R = static_cast<std::size_t>(cfg.replications);
    out.values.assign(regions.size(), std::vector<std::vector<std::int64_t>>(R));
    out.point_counts.assign(R, 0);
    std::vector<char> truncated(R, 0);
    const ScalingContext ctx(n, cfg.model.dimension());
    EnumerationOptions options;
    options.dim_cap = cfg.dim_cap;
    options.clique_budget = cfg.clique_budget;
    parallel_for(R, cfg.jobs, [&](std::size_t r) {
        SamplingOptions sampling;
        sampling.stream = n_index + 1;
        const auto cloud = sample_poisson(cfg.model, ctx, replication_seed(cfg.base_seed, r), sampling);
        EnumerationSummary summary;
        auto table = euler_values(cloud, cfg.t_grid, regions, options, &summary);
        for (std::size_t a = 0; a < regions.size(); ++a)
            out.values[a][r] = std::move(table[a]);
        out.point_counts[r] = cloud.size();
        truncated[r] = summary.truncated ? 1 : 0;
    });
    out.truncated = std::any_of(truncated.begin(), truncated.end(), [](char c) { return c != 0; });
    return out;
}

ExperimentReport run_slln(const CampaignConfig& cfg)
{
    cfg.validate();
    require_exact(cfg);
    ExperimentReport report;
    report.kind = "slln";
    std::vector<double> predicted_se;
    const auto predicted = predicted_means(cfg, cfg.region, predicted_se, report.truncations);
    const std::string label = region_label(cfg.region);
    const std::size_t G = cfg.t_grid.size();

    std::vector<std::vector<double>> deviation(cfg.n_values.size());
    std::vector<double> sup_deviation(cfg.n_values.size(), 0.0);
    for (std::size_t i = 0; i < cfg.n_values.size(); ++i)
    {
        const double n = cfg.n_values[i];
        const auto samples = simulate_chi(cfg, n, i, std::span<const RegionSpec>(&cfg.region, 1));
        report.truncated_curves |= samples.truncated;
        const auto rows = summarise(samples, 0, label, &predicted);
        const bool gated = i + 1 == cfg.n_values.size();
        for (std::size_t g = 0; g < G; ++g)
        {
            report.comparisons.push_back(compare(n, cfg.t_grid[g], cfg.t_grid[g], "mean_chi_over_n", label,
                                                 rows[g].mean, rows[g].mean_se, predicted[g], predicted_se[g], gated,
                                                 cfg.z_threshold));
            deviation[i].push_back(rows[g].mean_abs_deviation);
        }
        for (const auto& rep : samples.values[0])
        {
            double worst = 0.0;
            for (std::size_t g = 0; g < G; ++g)
                worst = std::max(worst, std::fabs(static_cast<double>(rep[g]) / n - predicted[g]));
            sup_deviation[i] += worst / static_cast<double>(samples.values[0].size());
        }
        report.summaries.insert(report.summaries.end(), rows.begin(), rows.end());
    }
    report.gates.push_back(comparison_gate("largest_n_mean_within_z", report.comparisons));

    if (cfg.n_values.size() >= 2)
    {
        const auto& last = deviation.back();
        const auto& previous = deviation[deviation.size() - 2];
        std::size_t shrinking = 0;
        for (std::size_t g = 0; g < G; ++g)
            shrinking += last[g] < previous[g] ? 1 : 0;
        std::ostringstream detail;
        detail << "pathwise mean deviation shrank at " << shrinking << " of " << G
               << " grid points; mean sup-over-grid deviation "
               << format_double(sup_deviation[sup_deviation.size() - 2]) << " -> "
               << format_double(sup_deviation.back());
        report.gates.push_back({"deviation_shrinks_with_n", 3 * shrinking >= 2 * G, detail.str()});
    }
    return report;
}

ExperimentReport fclt_from_samples(const Eigen::MatrixXd& samples, const CovarianceGrid& predicted,
                                   const CampaignConfig& cfg, double n, bool centered)
{
    const auto R = samples.rows();
    const auto G = samples.cols();
    if (R < 100)
        throw ValidationError("fclt: at least 100 replications are required");
    if (static_cast<std::size_t>(G) != predicted.t_grid.size())
        throw ValidationError("fclt: sample width does not match the prediction grid");

    ExperimentReport report;
    report.kind = "fclt";
    report.truncations.push_back(predicted.truncation);
    const auto estimate =
        centered ? centered_second_moment(samples, Eigen::VectorXd::Zero(G)) : sample_covariance(samples);
    const std::string label = region_label(cfg.region);
    for (Eigen::Index a = 0; a < G; ++a)
    {
        for (Eigen::Index b = a; b < G; ++b)
        {
            report.comparisons.push_back(compare(n, predicted.t_grid[a], predicted.t_grid[b], "covariance", label,
                                                 estimate.covariance(a, b), estimate.std_error(a, b),
                                                 predicted.matrix(a, b), predicted.std_error(a, b), true,
                                                 cfg.z_threshold));
        }
    }
    report.gates.push_back(comparison_gate("covariance_within_z", report.comparisons));

    int tests = 0;
    int passes = 0;
    auto battery = [&](const std::string& name, const Eigen::VectorXd& column) {
        std::vector<double> values(column.data(), column.data() + column.size());
        const auto result = normality_tests(values, cfg.alpha);
        tests += 3;
        passes += result.passes();
        report.normality.push_back({name, result});
    };
    for (Eigen::Index g = 0; g < G; ++g)
        battery("coordinate " + format_t(predicted.t_grid[g]), samples.col(g));
    Variates rng(cfg.base_seed, projection_stream);
    for (int p = 0; p < cfg.projections; ++p)
    {
        Eigen::VectorXd direction(G);
        for (Eigen::Index g = 0; g < G; ++g)
            direction(g) = rng.normal();
        direction.normalize();
        battery("projection " + std::to_string(p), samples * direction);
    }
    std::ostringstream detail;
    detail << passes << " of " << tests << " normality tests passed at alpha " << format_double(cfg.alpha);
    const bool ok = tests > 0 && static_cast<double>(passes) >= cfg.normality_pass_fraction * tests;
    report.gates.push_back({"normality_battery", ok, detail.str()});
    return report;
}

ExperimentReport run_fclt(const CampaignConfig& cfg)
{
    cfg.validate();
    require_exact(cfg);
    if (cfg.replications < 100)
        throw ValidationError("fclt: at least 100 replications are required");
    const double n = cfg.n_values.back();
    const auto predicted = limit_covariance_grid(cfg.t_grid, cfg.model, cfg.region, cfg.limit_options());
    const auto samples = simulate_chi(cfg, n, cfg.n_values.size() - 1, std::span<const RegionSpec>(&cfg.region, 1));

    Eigen::MatrixXd scaled = chi_matrix(samples.values[0], 1.0 / std::sqrt(n));
    ExperimentReport report;
    if (cfg.centering == Centering::limit)
    {
        std::vector<double> se;
        std::vector<SeriesTruncation> truncations;
        const auto means = predicted_means(cfg, cfg.region, se, truncations);
        for (Eigen::Index g = 0; g < scaled.cols(); ++g)
            scaled.col(g).array() -= std::sqrt(n) * means[g];
        report = fclt_from_samples(scaled, predicted, cfg, n, true);
        report.truncations.insert(report.truncations.end(), truncations.begin(), truncations.end());
    }
    else
    {
        report = fclt_from_samples(scaled, predicted, cfg, n, false);
    }
    report.truncated_curves = samples.truncated;
    report.summaries = summarise(samples, 0, region_label(cfg.region), nullptr);
    return report;
}

ExperimentReport run_moment_asymptotics(const CampaignConfig& cfg)
{
    cfg.validate();
    require_exact(cfg);
    ExperimentReport report;
    report.kind = "moments";
    const auto regions = campaign_regions(cfg);
    const std::size_t G = cfg.t_grid.size();

    std::vector<std::vector<double>> means(regions.size());
    std::vector<std::vector<double>> mean_se(regions.size());
    std::vector<CovarianceGrid> covariances;
    for (std::size_t a = 0; a < regions.size(); ++a)
    {
        means[a] = predicted_means(cfg, regions[a], mean_se[a], report.truncations);
        covariances.push_back(limit_covariance_grid(cfg.t_grid, cfg.model, regions[a], cfg.limit_options()));
        report.truncations.push_back(covariances.back().truncation);
    }

    for (std::size_t i = 0; i < cfg.n_values.size(); ++i)
    {
        const double n = cfg.n_values[i];
        const bool gated = i + 1 == cfg.n_values.size();
        const auto samples = simulate_chi(cfg, n, i, regions);
        report.truncated_curves |= samples.truncated;
        for (std::size_t a = 0; a < regions.size(); ++a)
        {
            const std::string label = region_label(regions[a]);
            const auto rows = summarise(samples, a, label, &means[a]);
            for (std::size_t g = 0; g < G; ++g)
                report.comparisons.push_back(compare(n, cfg.t_grid[g], cfg.t_grid[g], "mean_chi_over_n", label,
                                                     rows[g].mean, rows[g].mean_se, means[a][g], mean_se[a][g],
                                                     gated, cfg.z_threshold));
            const auto estimate = sample_covariance(chi_matrix(samples.values[a], 1.0 / std::sqrt(n)));
            for (std::size_t g = 0; g < G; ++g)
            {
                for (std::size_t h = g; h < G; ++h)
                {
                    const auto x = static_cast<Eigen::Index>(g);
                    const auto y = static_cast<Eigen::Index>(h);
                    report.comparisons.push_back(
                        compare(n, cfg.t_grid[g], cfg.t_grid[h], "covariance_over_n", label,
                                estimate.covariance(x, y), estimate.std_error(x, y), covariances[a].matrix(x, y),
                                covariances[a].std_error(x, y), gated, cfg.z_threshold));
                }
            }
            report.summaries.insert(report.summaries.end(), rows.begin(), rows.end());
        }
    }
    report.gates.push_back(comparison_gate("largest_n_moments_within_z", report.comparisons));
    return report;
}

void PalmConfig::validate() const
{
    if (!(n >= 0.0) || !std::isfinite(n))
        throw ValidationError("palm: n must be finite and >= 0");
    if (k < 0)
        throw ValidationError("palm: k must be >= 0");
    if (!(radius >= 0.0) || !std::isfinite(radius))
        throw ValidationError("palm: radius must be finite and >= 0");
    if (replications < 2)
        throw ValidationError("palm: replications must be >= 2");
    if (mc_samples == 0)
        throw ValidationError("palm: mc_samples must be > 0");
    for (int l : overlaps)
        if (l < 0 || l > k + 1)
            throw ValidationError("palm: overlap l must lie in [0, k+1]");
    if (jobs < 1)
        throw ValidationError("palm: jobs must be >= 1");
}

std::vector<std::uint64_t> overlap_pair_counts(const PointCloud& cloud, int k, double radius,
                                               std::uint64_t clique_budget)
{
    EnumerationOptions options;
    options.dim_cap = k;
    options.clique_budget = clique_budget;
    // c[tau] = number of k-simplices containing the vertex set tau.
    std::map<std::vector<std::uint32_t>, std::int64_t> containing;
    std::int64_t simplices = 0;
    enumerate_cliques(cloud, radius, options, [&](const CliqueView& view) {
        if (static_cast<int>(view.vertices.size()) != k + 1)
            return;
        ++simplices;
        const int size = k + 1;
        for (unsigned mask = 1; mask + 1 < (1u << size); ++mask)
        {
            std::vector<std::uint32_t> tau;
            for (int b = 0; b < size; ++b)
                if (mask & (1u << b))
                    tau.push_back(view.vertices[b]);
            ++containing[tau];
        }
    });
    // A_m = sum over |tau| = m of c_tau^2 = sum_l C(l, m) N_l over ordered pairs.
    std::vector<std::int64_t> A(static_cast<std::size_t>(k + 2), 0);
    A[0] = simplices * simplices;
    A[static_cast<std::size_t>(k + 1)] = simplices;
    for (const auto& [tau, c] : containing)
        A[tau.size()] += c * c;
    std::vector<std::int64_t> N(A.size(), 0);
    for (int m = k + 1; m >= 0; --m)
    {
        std::int64_t value = A[m];
        for (int l = m + 1; l <= k + 1; ++l)
            value -= static_cast<std::int64_t>(binomial(l, m)) * N[l];
        N[m] = value;
    }
    return {N.begin(), N.end()};
}

ExperimentReport run_palm_check(const PalmConfig& cfg)
{
    cfg.validate();
    ExperimentReport report;
    report.kind = "palm";
    const int d = cfg.model.dimension();
    const ScalingContext ctx(cfg.n, d);
    const auto R = static_cast<std::size_t>(cfg.replications);
    const bool pairs = cfg.k <= cfg.max_pair_k && !cfg.overlaps.empty();

    std::vector<double> counts(R, 0.0);
    std::vector<std::vector<double>> pair_counts(R);
    parallel_for(R, cfg.jobs, [&](std::size_t r) {
        const auto cloud = sample_poisson(cfg.model, ctx, replication_seed(cfg.seed, r));
        EnumerationOptions options;
        options.dim_cap = cfg.k;
        options.clique_budget = cfg.clique_budget;
        const auto s = simplex_counts_at_radius(cloud, cfg.radius, options);
        counts[r] = static_cast<std::size_t>(cfg.k) < s.size() ? static_cast<double>(s[cfg.k]) : 0.0;
        if (pairs)
        {
            const auto n_l = overlap_pair_counts(cloud, cfg.k, cfg.radius, cfg.clique_budget);
            for (int l : cfg.overlaps)
                pair_counts[r].push_back(static_cast<double>(n_l[l]));
        }
    });

    // i.i.d. side: estimate E[h(Y1) h(Y2)] with l shared points (and E[h] alone).
    const int k = cfg.k;
    const double reach = 2.0 * cfg.radius;
    const std::size_t jobs_count = cfg.overlaps.size() + 1;
    std::vector<std::uint64_t> hits(jobs_count, 0);
    const std::uint64_t chunk = 1u << 15;
    const std::uint64_t chunks = (cfg.mc_samples + chunk - 1) / chunk;
    std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(jobs_count, 0));
    parallel_for(chunks, cfg.jobs, [&](std::size_t c) {
        Variates rng(combine_seed(cfg.seed, palm_mc_stream), c);
        const int max_points = 2 * k + 2;
        std::vector<double> pts(static_cast<std::size_t>(max_points * d));
        auto within = [&](const std::vector<int>& ids) {
            for (std::size_t a = 0; a < ids.size(); ++a)
            {
                for (std::size_t b = 0; b < a; ++b)
                {
                    double sum = 0.0;
                    for (int i = 0; i < d; ++i)
                    {
                        const double delta = pts[ids[a] * d + i] - pts[ids[b] * d + i];
                        sum += delta * delta;
                    }
                    if (std::sqrt(sum) > reach)
                        return false;
                }
            }
            return true;
        };
        const std::uint64_t end = std::min(cfg.mc_samples, (c + 1) * chunk);
        for (std::uint64_t i = c * chunk; i < end; ++i)
        {
            for (int p = 0; p < max_points; ++p)
                cfg.model.sample(rng, std::span<double>(pts.data() + p * d, static_cast<std::size_t>(d)), 10'000);
            std::vector<int> first(static_cast<std::size_t>(k + 1));
            for (int p = 0; p <= k; ++p)
                first[p] = p;
            const bool h1 = within(first);
            partial[c][0] += h1 ? 1 : 0;
            if (!pairs || !h1)
                continue;
            for (std::size_t o = 0; o < cfg.overlaps.size(); ++o)
            {
                const int l = cfg.overlaps[o];
                // Y1 = points 0..k; Y2 = the first l of them plus k+1-l fresh points.
                std::vector<int> second;
                for (int p = 0; p < l; ++p)
                    second.push_back(p);
                for (int p = 0; p < k + 1 - l; ++p)
                    second.push_back(k + 1 + p);
                partial[c][o + 1] += within(second) ? 1 : 0;
            }
        }
    });
    for (const auto& part : partial)
        for (std::size_t i = 0; i < jobs_count; ++i)
            hits[i] += part[i];

    const double M = static_cast<double>(cfg.mc_samples);
    auto iid_side = [&](double coefficient, std::uint64_t h, bool exact) {
        const double p = static_cast<double>(h) / M;
        if (exact)
            return std::pair{coefficient, 0.0};
        return std::pair{coefficient * p, coefficient * std::sqrt(p * (1.0 - p) / M)};
    };

    RunningStats lhs;
    for (double c : counts)
        lhs.add(c);
    const double single_coefficient = std::pow(cfg.n, k + 1) / std::tgamma(k + 2.0);
    const auto [rhs, rhs_se] = iid_side(single_coefficient, hits[0], k == 0);
    report.comparisons.push_back(compare(cfg.n, cfg.radius, cfg.radius, "S_" + std::to_string(k), "all-space",
                                         lhs.mean(), lhs.std_error(), rhs, rhs_se, true, cfg.z_threshold));
    if (pairs)
    {
        for (std::size_t o = 0; o < cfg.overlaps.size(); ++o)
        {
            const int l = cfg.overlaps[o];
            RunningStats stats;
            for (const auto& row : pair_counts)
                stats.add(row[o]);
            const int m = 2 * k + 2 - l;
            const double coefficient =
                std::pow(cfg.n, m) / (std::tgamma(l + 1.0) * std::pow(std::tgamma(k + 2.0 - l), 2));
            const auto [pair_rhs, pair_se] = iid_side(coefficient, hits[o + 1], k == 0);
            report.comparisons.push_back(compare(cfg.n, cfg.radius, cfg.radius,
                                                 "pairs_k" + std::to_string(k) + "_l" + std::to_string(l),
                                                 "all-space", stats.mean(), stats.std_error(), pair_rhs, pair_se,
                                                 true, cfg.z_threshold));
        }
    }
    report.gates.push_back(comparison_gate("palm_identities_within_z", report.comparisons));
    return report;
}

} // namespace ecp
