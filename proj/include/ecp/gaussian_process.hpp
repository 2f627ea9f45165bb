#pragma once

#include "ecp/limit.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ecp
{

struct PsdRepair
{
    Eigen::MatrixXd matrix;
    double jitter = 0.0;
    double min_eigenvalue_before = 0.0;
    double min_eigenvalue_after = 0.0;
};

/// Adds the smallest uniform diagonal jitter from {0, 1e-12, 1e-11, ..., 1e-8} x trace
/// that lifts every eigenvalue to >= -1e-10. Throws FactorizationError if none does.
PsdRepair psd_repair(const Eigen::MatrixXd& matrix);

/// Applies psd_repair in place, recording the jitter in grid.psd_repair.
void repair_grid(CovarianceGrid& grid);

struct GPPath
{
    std::vector<double> t_grid;
    std::vector<double> values;
    std::uint64_t seed = 0;
};

/// Zero-mean Gaussian vectors with a fixed (repaired) covariance, factorised once.
class GaussianSampler
{
public:
    explicit GaussianSampler(const CovarianceGrid& grid);

    GPPath sample(std::uint64_t seed) const;
    double jitter() const { return jitter_; }

private:
    std::vector<double> t_grid_;
    Eigen::MatrixXd factor_; // L with factor_ factor_^T equal to the repaired matrix
    double jitter_ = 0.0;
};

GPPath gp_sample(const CovarianceGrid& grid, std::uint64_t seed);
/// Path i uses replication_seed(seed, i).
std::vector<GPPath> gp_sample_paths(const CovarianceGrid& grid, std::uint64_t seed, std::size_t count, int jobs = 1);

struct IncrementReport
{
    std::vector<double> increments; // E[(H(t_{i+1}) - H(t_i))^2]
    std::vector<double> increment_std_errors;
    std::vector<double> ratios;     // increment / (t_{i+1} - t_i)
    double C = 0.0;                 // smallest admissible constant
    std::vector<std::size_t> negative_pairs;

    bool negative_flagged() const { return !negative_pairs.empty(); }
};

IncrementReport gp_increment_check(const CovarianceGrid& grid);

struct RefinementReport
{
    double coarse_C = 0.0;
    double fine_C = 0.0;
    double relative_change = 0.0;
    bool stable = false;
};

/// Stable when |C_fine - C_coarse| <= tolerance * C_coarse (or both are zero).
RefinementReport compare_refinement(const IncrementReport& coarse, const IncrementReport& fine,
                                    double tolerance = 0.25);

} // namespace ecp
