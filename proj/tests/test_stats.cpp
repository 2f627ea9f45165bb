#include "ecp/errors.hpp"
#include "ecp/random.hpp"
#include "ecp/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ecp;

TEST_CASE("running statistics")
{
    RunningStats s;
    for (double x : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0})
        s.add(x);
    CHECK(s.count() == 8);
    CHECK(s.mean() == doctest::Approx(5.0));
    CHECK(s.variance() == doctest::Approx(32.0 / 7.0));
    CHECK(s.std_error() == doctest::Approx(std::sqrt(32.0 / 7.0 / 8.0)));

    RunningStats a, b;
    for (double x : {2.0, 4.0, 4.0})
        a.add(x);
    for (double x : {4.0, 5.0, 5.0, 7.0, 9.0})
        b.add(x);
    a.merge(b);
    CHECK(a.mean() == doctest::Approx(s.mean()));
    CHECK(a.variance() == doctest::Approx(s.variance()));
    CHECK(RunningStats{}.variance() == 0.0);
}

TEST_CASE("covariance estimates")
{
    Eigen::MatrixXd x(4, 2);
    x << 1.0, 2.0, 2.0, 4.0, 3.0, 6.0, 4.0, 9.0;
    const auto est = sample_covariance(x);
    CHECK(est.mean(0) == doctest::Approx(2.5));
    CHECK(est.covariance(0, 0) == doctest::Approx(5.0 / 3.0));
    CHECK(est.covariance(0, 1) == doctest::Approx(11.5 / 3.0));
    CHECK(est.covariance(0, 1) == est.covariance(1, 0));

    Eigen::VectorXd centre(2);
    centre << 0.0, 0.0;
    const auto raw = centered_second_moment(x, centre);
    CHECK(raw.covariance(0, 0) == doctest::Approx(30.0 / 4.0));
    CHECK(raw.covariance(0, 1) == doctest::Approx((2.0 + 8.0 + 18.0 + 36.0) / 4.0));

    // Standard error of a covariance entry shrinks like R^{-1/2} with the right constant
    // for independent standard normals: Var(XY) = 1.
    Variates rng(12, 0);
    Eigen::MatrixXd z(40000, 2);
    for (Eigen::Index i = 0; i < z.rows(); ++i)
    {
        z(i, 0) = rng.normal();
        z(i, 1) = rng.normal();
    }
    const auto big = sample_covariance(z);
    CHECK(big.std_error(0, 1) == doctest::Approx(1.0 / 200.0).epsilon(0.05));
    CHECK(big.std_error(0, 0) == doctest::Approx(std::sqrt(2.0) / 200.0).epsilon(0.05));
}

TEST_CASE("normal distribution helpers")
{
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975));
    CHECK(normal_critical(0.01) == doctest::Approx(2.5758293035489004).epsilon(1e-12));
    CHECK(log_normal_cdf(-40.0) == doctest::Approx(-804.6084420137538).epsilon(1e-10));
    CHECK(log_normal_cdf(-3.0) == doctest::Approx(std::log(normal_cdf(-3.0))).epsilon(1e-12));
    CHECK(log_normal_cdf(3.0) == doctest::Approx(std::log(normal_cdf(3.0))).epsilon(1e-12));
    CHECK(pooled_z(1.0, 0.0, 1.0, 0.0) == 0.0);
    CHECK(pooled_z(2.0, 3.0, 1.0, 4.0) == doctest::Approx(0.2));
}

TEST_CASE("normality battery against scipy")
{
    const std::vector<double> x{0.31, -1.2, 2.05, 0.77,  -0.42, 1.6,  -0.05, 0.93,  -2.3,  0.12,
                                0.48, -0.88, 1.15, -0.61, 0.27, 3.1, -0.19, 0.66, -1.45, 0.04};
    const auto r = normality_tests(x, 0.01);
    CHECK(r.n == 20);
    CHECK(r.skewness == doctest::Approx(0.2370494739402114).epsilon(1e-12));
    CHECK(r.excess_kurtosis == doctest::Approx(0.2546861608705857).epsilon(1e-12));
    CHECK(r.anderson_darling == doctest::Approx(0.1585862268578957).epsilon(1e-10));
    CHECK(r.ad_critical == doctest::Approx(0.96).epsilon(1e-3));
    const double n = 20.0;
    CHECK(r.skew_z == doctest::Approx(r.skewness / std::sqrt(6.0 * (n - 2) / ((n + 1) * (n + 3)))));
    CHECK(r.passes() == 3);

    std::vector<double> y;
    for (int i = 0; i < 50; ++i)
        y.push_back(std::exp(-2.0 + 4.0 * i / 49.0));
    const auto skewed = normality_tests(y, 0.01);
    CHECK(skewed.anderson_darling == doctest::Approx(3.408087889189005).epsilon(1e-10));
    CHECK(skewed.skewness == doctest::Approx(1.2876546066685308).epsilon(1e-12));
    CHECK(skewed.excess_kurtosis == doctest::Approx(0.619716271190359).epsilon(1e-12));
    CHECK_FALSE(skewed.ad_pass);
    CHECK_FALSE(skewed.skew_pass);

    CHECK_THROWS_AS(normality_tests(std::vector<double>(5, 1.0)), ValidationError);
    CHECK_THROWS_AS(normality_tests(x, 0.2), ValidationError);
}

TEST_CASE("normality battery size on Gaussian data")
{
    Variates rng(99, 0);
    int rejected = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial)
    {
        std::vector<double> x(200);
        for (auto& v : x)
            v = rng.normal();
        if (!normality_tests(x, 0.01).ad_pass)
            ++rejected;
    }
    // Binomial(200, 0.01): P(X >= 9) < 1e-3.
    CHECK(rejected <= 8);
}
