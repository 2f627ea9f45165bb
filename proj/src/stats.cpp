#include "ecp/stats.hpp"

#include "ecp/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ecp
{

void RunningStats::add(double x)
{
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other)
{
    if (other.count_ == 0)
        return;
    if (count_ == 0)
    {
        *this = other;
        return;
    }
    const double total = static_cast<double>(count_ + other.count_);
    const double delta = other.mean_ - mean_;
    mean_ += delta * static_cast<double>(other.count_) / total;
    m2_ += other.m2_ + delta * delta * static_cast<double>(count_) * static_cast<double>(other.count_) / total;
    count_ += other.count_;
}

double RunningStats::variance() const
{
    return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double RunningStats::std_dev() const
{
    return std::sqrt(variance());
}

double RunningStats::std_error() const
{
    return count_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
}

double variance_std_error(std::span<const double> x)
{
    const double n = static_cast<double>(x.size());
    if (x.size() < 2)
        return 0.0;
    double mean = 0.0;
    for (double v : x)
        mean += v;
    mean /= n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : x)
    {
        const double c = (v - mean) * (v - mean);
        m2 += c;
        m4 += c * c;
    }
    m2 /= n;
    m4 /= n;
    return std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
}

namespace
{

CovarianceEstimate second_moments(const Eigen::MatrixXd& samples, const Eigen::VectorXd& centre, double denominator)
{
    const auto R = samples.rows();
    const auto G = samples.cols();
    const Eigen::MatrixXd centred = samples.rowwise() - centre.transpose();
    CovarianceEstimate out;
    out.mean = centre;
    out.covariance = centred.transpose() * centred / denominator;
    out.std_error.resize(G, G);
    for (Eigen::Index a = 0; a < G; ++a)
    {
        for (Eigen::Index b = 0; b < G; ++b)
        {
            const Eigen::ArrayXd product = centred.col(a).array() * centred.col(b).array();
            const double m11 = product.mean();
            const double m22 = product.square().mean();
            out.std_error(a, b) = std::sqrt(std::max(0.0, m22 - m11 * m11) / static_cast<double>(R));
        }
    }
    return out;
}

} // namespace

CovarianceEstimate sample_covariance(const Eigen::MatrixXd& samples)
{
    if (samples.rows() < 2)
        throw ValidationError("sample_covariance: need at least two observations");
    const Eigen::VectorXd mean = samples.colwise().mean().transpose();
    return second_moments(samples, mean, static_cast<double>(samples.rows() - 1));
}

CovarianceEstimate centered_second_moment(const Eigen::MatrixXd& samples, const Eigen::VectorXd& centre)
{
    if (samples.rows() < 1)
        throw ValidationError("centered_second_moment: need at least one observation");
    return second_moments(samples, centre, static_cast<double>(samples.rows()));
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double log_normal_cdf(double x)
{
    if (x > -5.0)
        return std::log(normal_cdf(x));
    // Asymptotic series for the lower tail.
    const double x2 = x * x;
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) + 105.0 / (x2 * x2 * x2 * x2);
    return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * M_PI) + std::log(series);
}

double normal_critical(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("normal_critical: alpha must lie in (0, 1)");
    return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), alpha / 2.0));
}

NormalityResult normality_tests(std::span<const double> x, double alpha)
{
    const std::size_t count = x.size();
    if (count < 8)
        throw ValidationError("normality_tests: need at least 8 observations");
    // Critical values of A^2 for a normal with estimated mean and variance.
    double ad_base = 0.0;
    if (std::fabs(alpha - 0.01) < 1e-12)
        ad_base = 1.092;
    else if (std::fabs(alpha - 0.025) < 1e-12)
        ad_base = 0.918;
    else if (std::fabs(alpha - 0.05) < 1e-12)
        ad_base = 0.787;
    else if (std::fabs(alpha - 0.10) < 1e-12)
        ad_base = 0.656;
    else if (std::fabs(alpha - 0.15) < 1e-12)
        ad_base = 0.576;
    else
        throw ValidationError("normality_tests: alpha must be one of 0.01, 0.025, 0.05, 0.10, 0.15");

    const double n = static_cast<double>(count);
    double mean = 0.0;
    for (double v : x)
        mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x)
    {
        const double c = v - mean;
        m2 += c * c;
        m3 += c * c * c;
        m4 += c * c * c * c;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    NormalityResult out;
    out.n = count;
    const double z_crit = normal_critical(alpha);
    if (m2 <= 0.0)
        return out; // a constant sample fails every test

    out.skewness = m3 / std::pow(m2, 1.5);
    out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    out.skew_z = out.skewness / std::sqrt(6.0 * (n - 2.0) / ((n + 1.0) * (n + 3.0)));
    out.kurtosis_z = (out.excess_kurtosis + 6.0 / (n + 1.0)) /
                     std::sqrt(24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0)));
    out.skew_pass = std::fabs(out.skew_z) <= z_crit;
    out.kurtosis_pass = std::fabs(out.kurtosis_z) <= z_crit;

    const double sd = std::sqrt(m2 * n / (n - 1.0));
    std::vector<double> z(x.begin(), x.end());
    for (double& v : z)
        v = (v - mean) / sd;
    std::sort(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i)
        sum += (2.0 * static_cast<double>(i) + 1.0) * (log_normal_cdf(z[i]) + log_normal_cdf(-z[count - 1 - i]));
    out.anderson_darling = -n - sum / n;
    out.ad_critical = ad_base / (1.0 + 4.0 / n - 25.0 / (n * n));
    out.ad_pass = out.anderson_darling < out.ad_critical;
    return out;
}

double pooled_z(double a, double se_a, double b, double se_b)
{
    const double pooled = std::sqrt(se_a * se_a + se_b * se_b);
    if (pooled == 0.0)
        return a == b ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), a - b);
    return (a - b) / pooled;
}

} // namespace ecp
