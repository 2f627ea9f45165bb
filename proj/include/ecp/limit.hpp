#pragma once

#include "ecp/point_process.hpp"
#include "ecp/region.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ecp
{

enum class PsiMethod
{
    monte_carlo,
    closed_form_1d,
    closed_form_trivial, // k1 = k2 = 0: the integrand is identically 1
    grid_quadrature
};

std::string to_string(PsiMethod method);

enum class VolumePolicy
{
    automatic,     // exact formula when one exists (d = 1, or k1 = k2 = 0), Monte Carlo otherwise
    monte_carlo,   // always sample (except the trivial k1 = k2 = 0 case)
    grid_quadrature
};

VolumePolicy parse_volume_policy(const std::string& name);
std::string to_string(VolumePolicy policy);

/// Integral over (R^d)^{k1+k2+1-j} of h_t^{k1}(0, shared, block1) h_s^{k2}(0, shared, block2),
/// with j-1 shared points.
struct IndicatorVolumeQuery
{
    int d = 1;
    int k1 = 0;
    int k2 = 0;
    int j = 1;
    double t = 0.0;
    double s = 0.0;

    int free_points() const { return k1 + k2 + 1 - j; }
    void validate() const;
};

struct PsiEstimate
{
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    PsiMethod method = PsiMethod::closed_form_1d;
};

struct McOptions
{
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
    VolumePolicy policy = VolumePolicy::automatic;
    /// Points per axis for grid quadrature.
    int grid_resolution = 256;
    int jobs = 1;
};

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);
/// (2t)^d theta_d ||f||_inf.
double a_t(double t, int d, double sup_norm);

/// Exact one-dimensional indicator volume for every (j, k1, k2, t, s).
double indicator_volume_1d(int j, int k1, int k2, double t, double s);

PsiEstimate indicator_volume(const IndicatorVolumeQuery& query, const McOptions& options);

/// psi_{j,k1,k2,A}(t,s) = int_A f^{k1+k2+2-j} / (j!(k1+1-j)!(k2+1-j)!) * indicator volume.
PsiEstimate psi(int j, int k1, int k2, double t, double s, const DensityModel& model, const RegionSpec& region,
                const McOptions& options);

/// Psi_{k1,k2,A}(t,s) = sum over j = 1..min(k1,k2)+1 of psi_j; per-j samples use independent seeds.
PsiEstimate Psi(int k1, int k2, double t, double s, const DensityModel& model, const RegionSpec& region,
                const McOptions& options);

struct SeriesTruncation
{
    int k_max = 0;
    double tail_bound = 0.0;
    double a_t = 0.0;
    double epsilon = 0.0;
};

/// sum_{k > k_max} a^k / (k+1)!
double mean_tail_bound(double a, int k_max);
/// Bound on the omitted part of the (k1, k2) double series when both
/// indices run to K: sum over (k1,k2) not both <= K and j of
/// a^{k1+k2+1-j} / (j!(k1+1-j)!(k2+1-j)!).
double covariance_tail_bound(double a, int k_max);

/// Smallest k_max whose tail bound is <= epsilon; throws TruncationCapExceeded above the cap.
SeriesTruncation mean_truncation(double a, double epsilon, int k_max_cap);
SeriesTruncation covariance_truncation(double a, double epsilon, int k_max_cap);

struct LimitOptions
{
    double epsilon = 1e-6;
    int k_max_cap = 100;
    McOptions mc;
};

struct LimitMean
{
    PsiEstimate estimate;
    SeriesTruncation truncation;
};

/// K_A(t) = sum_k (-1)^k psi_{k+1,k,k,A}(t,t), truncated with a certified tail.
LimitMean limit_mean(double t, const DensityModel& model, const RegionSpec& region, const LimitOptions& options);
/// Same series summed to an explicit k_max (no certification).
PsiEstimate limit_mean_partial(double t, const DensityModel& model, const RegionSpec& region, int k_max,
                               const McOptions& options);

struct LimitCovariance
{
    PsiEstimate estimate;
    SeriesTruncation truncation;
};

LimitCovariance limit_covariance(double t, double s, const DensityModel& model, const RegionSpec& region,
                                 const LimitOptions& options);

struct CovarianceGrid
{
    std::vector<double> t_grid;
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd std_error;
    /// Diagonal jitter added by psd_repair (0 if none was needed).
    double psd_repair = 0.0;
    double min_eigenvalue = 0.0; // before repair
    SeriesTruncation truncation;
    PsiMethod method = PsiMethod::closed_form_1d;
    std::uint64_t samples_per_term = 0;
};

/// Limit covariance on every pair of an increasing grid. Monte Carlo terms
/// share one sample set per (j, k1, k2) across the whole grid.
CovarianceGrid limit_covariance_grid(std::span<const double> t_grid, const DensityModel& model,
                                     const RegionSpec& region, const LimitOptions& options);

} // namespace ecp
