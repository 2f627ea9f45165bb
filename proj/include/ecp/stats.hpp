#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>

namespace ecp
{

/// Single-pass mean/variance accumulator (Welford), mergeable.
class RunningStats
{
public:
    void add(double x);
    void merge(const RunningStats& other);

    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }
    /// Unbiased sample variance (n-1 denominator); 0 for fewer than two values.
    double variance() const;
    double std_dev() const;
    /// Standard error of the mean.
    double std_error() const;

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Standard error of the sample variance, sqrt((m4 - m2^2) / n) with central moments.
double variance_std_error(std::span<const double> x);

struct CovarianceEstimate
{
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance; // (n-1) denominator
    Eigen::MatrixXd std_error;  // per-entry, from fourth moments
};

/// Rows are observations, columns are coordinates.
CovarianceEstimate sample_covariance(const Eigen::MatrixXd& samples);

/// Second-moment matrix around a known centre: (1/n) sum (x - c)(x - c)^T.
CovarianceEstimate centered_second_moment(const Eigen::MatrixXd& samples, const Eigen::VectorXd& centre);

double normal_cdf(double x);
/// log Phi(x), accurate in both tails.
double log_normal_cdf(double x);
/// Two-sided critical value of the standard normal at level alpha.
double normal_critical(double alpha);

struct NormalityResult
{
    std::uint64_t n = 0;
    double skewness = 0.0;        // g1
    double excess_kurtosis = 0.0; // g2
    double skew_z = 0.0;
    double kurtosis_z = 0.0;
    double anderson_darling = 0.0; // A^2 with sample mean and (n-1) standard deviation
    double ad_critical = 0.0;
    bool skew_pass = false;
    bool kurtosis_pass = false;
    bool ad_pass = false;

    int passes() const { return int(skew_pass) + int(kurtosis_pass) + int(ad_pass); }
};

/// Skewness and kurtosis z-tests plus Anderson-Darling for normality with
/// estimated parameters, all at level alpha (alpha = 0.01 supported for AD).
/// Needs n >= 8.
NormalityResult normality_tests(std::span<const double> x, double alpha = 0.01);

/// (a - b) / sqrt(se_a^2 + se_b^2); 0 when both errors vanish and a == b.
double pooled_z(double a, double se_a, double b, double se_b);

} // namespace ecp
