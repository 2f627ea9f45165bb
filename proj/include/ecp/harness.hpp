#pragma once

#include "ecp/limit.hpp"
#include "ecp/point_process.hpp"
#include "ecp/region.hpp"
#include "ecp/rips.hpp"
#include "ecp/stats.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ecp
{

enum class Centering
{
    empirical, // replication mean, (R-1) denominator
    limit      // n K(t), (R) denominator
};

struct CampaignConfig
{
    DensityModel model = DensityModel::unit_cube(1);
    std::vector<double> n_values{1000.0, 10000.0};
    std::vector<double> t_grid{0.25, 0.5, 1.0};
    int replications = 200;
    std::uint64_t base_seed = 1;
    RegionSpec region = RegionSpec::all_space();
    double epsilon = 1e-4;
    std::uint64_t mc_samples = 1'000'000;
    VolumePolicy volume_policy = VolumePolicy::automatic;
    int k_max_cap = 100;
    std::optional<int> dim_cap;
    std::uint64_t clique_budget = 100'000'000;
    int jobs = 1;
    Centering centering = Centering::empirical;
    int projections = 5;
    double alpha = 0.01;
    double z_threshold = 3.0;
    double normality_pass_fraction = 0.9;

    void validate() const;
    LimitOptions limit_options() const;
};

/// chi_{n,A}(t) for every replication: values[region][replication][grid index].
struct ChiSamples
{
    double n = 0.0;
    std::vector<double> t_grid;
    std::vector<std::vector<std::vector<std::int64_t>>> values;
    std::vector<std::uint64_t> point_counts; // per replication
    bool truncated = false;
};

/// Replication r draws its cloud from seed replication_seed(base_seed, r) and
/// a stream derived from the position of n in the campaign.
ChiSamples simulate_chi(const CampaignConfig& cfg, double n, std::size_t n_index,
                        std::span<const RegionSpec> regions);

struct SummaryRow
{
    double n = 0.0;
    double t = 0.0;
    std::string region;
    int replications = 0;
    std::int64_t raw_sum = 0;         // sum of chi over replications
    double mean = 0.0;                // of chi / n
    double mean_se = 0.0;
    double variance = 0.0;           // of n^{-1/2} (chi - empirical mean)
    double variance_se = 0.0;
    double mean_abs_deviation = 0.0; // average of |chi/n - K(t)|; NaN when no prediction
};

struct ComparisonRow
{
    double n = 0.0;
    double t = 0.0;
    double s = 0.0;
    std::string statistic;
    std::string region;
    double empirical = 0.0;
    double empirical_se = 0.0;
    double predicted = 0.0;
    double predicted_se = 0.0;
    double pooled_se = 0.0;
    double z = 0.0;
    bool gated = false;
    bool pass = true;
};

struct NormalityRow
{
    std::string label;
    NormalityResult result;
};

struct Gate
{
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ExperimentReport
{
    std::string kind;
    std::vector<SummaryRow> summaries;
    std::vector<ComparisonRow> comparisons;
    std::vector<NormalityRow> normality;
    std::vector<Gate> gates;
    std::vector<SeriesTruncation> truncations;
    bool truncated_curves = false;

    bool passed() const;
};

/// Law of large numbers: mean of chi_n(t)/n against K(t) for every n, gated at the
/// largest n, plus the pathwise deviation trace between the two largest n.
ExperimentReport run_slln(const CampaignConfig& cfg);

/// Central limit: covariance and normality of n^{-1/2}(chi_n - centre) at the largest n.
ExperimentReport run_fclt(const CampaignConfig& cfg);

/// Covariance and normality gates for externally supplied scaled vectors
/// (rows = replications); `centered` says whether rows are already centred by
/// the limit mean (otherwise the empirical mean is removed).
ExperimentReport fclt_from_samples(const Eigen::MatrixXd& samples, const CovarianceGrid& predicted,
                                   const CampaignConfig& cfg, double n = 0.0, bool centered = false);

/// Mean and covariance traces over all n for all-space and the configured region.
ExperimentReport run_moment_asymptotics(const CampaignConfig& cfg);

struct PalmConfig
{
    DensityModel model = DensityModel::unit_cube(1);
    double n = 100.0;
    int k = 1;
    double radius = 0.05;
    int replications = 2000;
    std::uint64_t seed = 1;
    std::uint64_t mc_samples = 1'000'000;
    std::vector<int> overlaps{0, 1}; // l values for the pair statistic; needs l <= k + 1
    int max_pair_k = 2;
    std::uint64_t clique_budget = 100'000'000;
    int jobs = 1;
    double z_threshold = 3.0;

    void validate() const;
};

/// Simplex-count identity E[S_k] = n^{k+1}/(k+1)! E[h] and the l-overlap pair identity.
ExperimentReport run_palm_check(const PalmConfig& cfg);

/// Ordered pairs (s1, s2) of k-simplices at the given radius sharing exactly l
/// vertices, for l = 0..k+1.
std::vector<std::uint64_t> overlap_pair_counts(const PointCloud& cloud, int k, double radius,
                                               std::uint64_t clique_budget = 100'000'000);

} // namespace ecp
