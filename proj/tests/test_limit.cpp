#include "ecp/errors.hpp"
#include "ecp/limit.hpp"
#include "ecp/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ecp;

namespace
{

// Poisson gap argument on the line: chi counts points whose right gap exceeds 2t/n.
double line_mean(double t)
{
    return std::exp(-2.0 * t);
}

double line_covariance(double t, double s)
{
    return std::exp(-2.0 * std::max(t, s)) - 2.0 * (t + s) * std::exp(-2.0 * (t + s));
}

// Lens area of two radius-a discs at centre distance r.
double lens(double r, double a)
{
    if (r >= 2.0 * a)
        return 0.0;
    return 2.0 * a * a * std::acos(r / (2.0 * a)) - 0.5 * r * std::sqrt(4.0 * a * a - r * r);
}

// Area of {(y1, y2) in R^2 x R^2 : diam{0, y1, y2} <= a}, by Simpson in the radius of y1.
double planar_triangle_volume(double a)
{
    const int m = 20000;
    const double h = a / m;
    double sum = 0.0;
    for (int i = 0; i <= m; ++i)
    {
        const double r = i * h;
        const double w = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * 2.0 * std::numbers::pi * r * lens(r, a);
    }
    return sum * h / 3.0;
}

double factorial(int n)
{
    return std::tgamma(n + 1.0);
}

} // namespace

TEST_CASE("unit ball volumes and a_t")
{
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-15));
    CHECK(a_t(0.5, 1, 1.0) == doctest::Approx(2.0));
    CHECK(a_t(0.5, 2, 2.0) == doctest::Approx(2.0 * std::numbers::pi));
}

TEST_CASE("one-dimensional indicator volumes")
{
    CHECK(indicator_volume_1d(1, 1, 0, 0.3, 0.7) == doctest::Approx(4.0 * 0.3).epsilon(1e-14));
    CHECK(indicator_volume_1d(1, 2, 0, 0.3, 0.7) == doctest::Approx(12.0 * 0.09).epsilon(1e-14));
    CHECK(indicator_volume_1d(2, 1, 1, 0.3, 0.7) == doctest::Approx(4.0 * 0.3).epsilon(1e-14));
    CHECK(indicator_volume_1d(1, 1, 1, 0.3, 0.7) == doctest::Approx(4.0 * 0.3 * 4.0 * 0.7).epsilon(1e-14));
    CHECK(indicator_volume_1d(1, 0, 0, 0.3, 0.7) == 1.0);
    CHECK_THROWS_AS(indicator_volume_1d(3, 1, 1, 0.3, 0.7), ValidationError);
    CHECK_THROWS_AS(indicator_volume_1d(1, -1, 1, 0.3, 0.7), ValidationError);

    McOptions mc;
    const auto trivial = indicator_volume({3, 0, 0, 1, 0.4, 0.4}, mc);
    CHECK(trivial.value == 1.0);
    CHECK(trivial.method == PsiMethod::closed_form_trivial);

    const auto psi_value = psi(2, 1, 1, 0.5, 0.5, DensityModel::unit_cube(1), RegionSpec::all_space(), mc);
    CHECK(psi_value.value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("closed form agrees with grid quadrature")
{
    McOptions grid;
    grid.policy = VolumePolicy::grid_quadrature;
    grid.grid_resolution = 256;
    struct Case
    {
        int j, k1, k2;
        double t, s;
    };
    for (const auto& c : {Case{1, 1, 0, 0.4, 0.4}, Case{1, 2, 0, 0.3, 0.9}, Case{1, 1, 1, 0.2, 0.5},
                          Case{2, 1, 1, 0.6, 0.35}, Case{2, 2, 1, 0.5, 0.25}, Case{3, 2, 2, 0.4, 0.7},
                          Case{2, 2, 2, 0.3, 0.3}})
    {
        CAPTURE(c.j);
        CAPTURE(c.k1);
        CAPTURE(c.k2);
        const double exact = indicator_volume_1d(c.j, c.k1, c.k2, c.t, c.s);
        const auto q = indicator_volume({1, c.k1, c.k2, c.j, c.t, c.s}, grid);
        CHECK(q.method == PsiMethod::grid_quadrature);
        CHECK(std::fabs(q.value - exact) <= 0.02 * exact);
    }
}

TEST_CASE("closed form agrees with Monte Carlo")
{
    McOptions mc;
    mc.policy = VolumePolicy::monte_carlo;
    mc.samples = 200'000;
    Variates rng(31, 0);
    for (int trial = 0; trial < 12; ++trial)
    {
        const int k1 = 1 + static_cast<int>(rng.uniform() * 4);
        const int k2 = static_cast<int>(rng.uniform() * 4);
        const int j = 1 + static_cast<int>(rng.uniform() * (std::min(k1, k2) + 1));
        const double t = rng.uniform(0.05, 1.0);
        const double s = rng.uniform(0.05, 1.0);
        mc.seed = static_cast<std::uint64_t>(trial);
        const double exact = indicator_volume_1d(j, k1, k2, t, s);
        const auto est = indicator_volume({1, k1, k2, j, t, s}, mc);
        CAPTURE(j);
        CAPTURE(k1);
        CAPTURE(k2);
        CHECK(est.method == PsiMethod::monte_carlo);
        CHECK(est.samples == mc.samples);
        CHECK(std::fabs(est.value - exact) <= 4.0 * est.std_error);
    }
}

TEST_CASE("planar volumes")
{
    McOptions mc;
    mc.samples = 400'000;
    mc.seed = 9;
    const double t = 0.35;
    const auto disk = indicator_volume({2, 1, 0, 1, t, t}, mc);
    const double disk_area = std::numbers::pi * 4.0 * t * t;
    CHECK(std::fabs(disk.value - disk_area) <= 4.0 * disk.std_error);

    const auto triangle = indicator_volume({2, 2, 0, 1, t, t}, mc);
    const double exact = planar_triangle_volume(2.0 * t);
    CHECK(exact == doctest::Approx(std::numbers::pi * std::pow(2.0 * t, 4) * (std::numbers::pi - 3.0 * std::sqrt(3.0) / 4.0))
                       .epsilon(1e-8));
    CHECK(std::fabs(triangle.value - exact) <= 4.0 * triangle.std_error);

    McOptions grid;
    grid.policy = VolumePolicy::grid_quadrature;
    grid.grid_resolution = 512;
    const auto disk_q = indicator_volume({2, 1, 0, 1, t, t}, grid);
    CHECK(std::fabs(disk_q.value - disk_area) <= 0.005 * disk_area);
    CHECK_THROWS_AS(indicator_volume({2, 2, 0, 1, t, t}, grid), ValidationError);
}

TEST_CASE("Monte Carlo is independent of the job count")
{
    McOptions mc;
    mc.policy = VolumePolicy::monte_carlo;
    mc.samples = 150'000;
    mc.seed = 4;
    const auto one = indicator_volume({2, 2, 1, 1, 0.3, 0.4}, mc);
    mc.jobs = 3;
    const auto three = indicator_volume({2, 2, 1, 1, 0.3, 0.4}, mc);
    CHECK(one.value == three.value);
    CHECK(one.std_error == three.std_error);
    mc.samples = 0;
    CHECK_THROWS_AS(indicator_volume({2, 2, 1, 1, 0.3, 0.4}, mc), ValidationError);
}

TEST_CASE("tail bounds match direct summation")
{
    for (double a : {0.3, 1.0, 2.5, 6.0})
    {
        for (int K : {0, 1, 3, 8})
        {
            double mean_tail = 0.0;
            for (int k = K + 1; k < 200; ++k)
                mean_tail += std::exp(k * std::log(a) - std::lgamma(k + 2.0));
            CHECK(mean_tail_bound(a, K) == doctest::Approx(mean_tail).epsilon(1e-10));

            double cov_tail = 0.0;
            for (int k1 = 0; k1 < 90; ++k1)
                for (int k2 = 0; k2 < 90; ++k2)
                {
                    if (k1 <= K && k2 <= K)
                        continue;
                    for (int j = 1; j <= std::min(k1, k2) + 1; ++j)
                        cov_tail += std::exp((k1 + k2 + 1 - j) * std::log(a) - std::lgamma(j + 1.0) -
                                             std::lgamma(k1 + 2.0 - j) - std::lgamma(k2 + 2.0 - j));
                }
            CHECK(covariance_tail_bound(a, K) == doctest::Approx(cov_tail).epsilon(1e-9));
        }
    }
    CHECK(mean_tail_bound(0.0, 0) == 0.0);
}

TEST_CASE("truncation selection")
{
    const auto tr = mean_truncation(2.0, 1e-6, 100);
    CHECK(tr.tail_bound <= 1e-6);
    CHECK(mean_tail_bound(2.0, tr.k_max - 1) > 1e-6);
    CHECK(tr.a_t == 2.0);
    const auto cov = covariance_truncation(2.0, 1e-6, 100);
    CHECK(cov.k_max >= tr.k_max);
    CHECK(cov.tail_bound <= 1e-6);
    CHECK(covariance_tail_bound(2.0, cov.k_max - 1) > 1e-6);
    CHECK(mean_truncation(0.0, 1e-6, 0).k_max == 0);
    CHECK_THROWS_AS(mean_truncation(40.0, 1e-6, 3), TruncationCapExceeded);
    CHECK_THROWS_AS(covariance_truncation(40.0, 1e-6, 3), TruncationCapExceeded);
    CHECK_THROWS_AS(mean_truncation(1.0, 0.0, 10), ValidationError);
}

TEST_CASE("limit mean on the unit interval")
{
    LimitOptions options;
    options.epsilon = 1e-8;
    const auto model = DensityModel::unit_cube(1);
    for (double t : {0.0, 0.1, 0.5, 1.0, 2.0})
    {
        const auto m = limit_mean(t, model, RegionSpec::all_space(), options);
        CHECK(std::fabs(m.estimate.value - line_mean(t)) <= options.epsilon + 1e-12);
        const auto half = limit_mean(t, model, RegionSpec::box({0.0}, {0.5}), options);
        CHECK(std::fabs(half.estimate.value - 0.5 * line_mean(t)) <= options.epsilon + 1e-12);
    }
    CHECK(limit_mean(0.0, DensityModel::unit_cube(3), RegionSpec::all_space(), options).estimate.value == 1.0);
    CHECK_THROWS_AS(limit_mean(5.0, model, RegionSpec::all_space(), LimitOptions{1e-6, 2, {}}), TruncationCapExceeded);
    CHECK_THROWS_AS(limit_mean(-1.0, model, RegionSpec::all_space(), options), ValidationError);
}

TEST_CASE("partial sums obey the certified tail")
{
    const auto model = DensityModel::unit_cube(1);
    const double t = 0.7;
    const double a = a_t(t, 1, 1.0);
    for (int K = 0; K <= 10; ++K)
    {
        const double partial = limit_mean_partial(t, model, RegionSpec::all_space(), K, {}).value;
        CHECK(std::fabs(partial - line_mean(t)) <= mean_tail_bound(a, K) * (1.0 + 1e-9) + 1e-15);
    }
}

TEST_CASE("limit covariance on the unit interval")
{
    LimitOptions options;
    options.epsilon = 1e-8;
    const auto model = DensityModel::unit_cube(1);
    const std::vector<double> grid{0.25, 0.5, 1.0};
    const auto cov = limit_covariance_grid(grid, model, RegionSpec::all_space(), options);
    CHECK(cov.method == PsiMethod::closed_form_1d);
    for (std::size_t a = 0; a < grid.size(); ++a)
        for (std::size_t b = 0; b < grid.size(); ++b)
        {
            CHECK(std::fabs(cov.matrix(a, b) - line_covariance(grid[a], grid[b])) <= options.epsilon + 1e-12);
            CHECK(cov.matrix(a, b) == cov.matrix(b, a));
            CHECK(cov.std_error(a, b) == 0.0);
        }
    CHECK(cov.matrix(0, 0) == doctest::Approx(0.23865).epsilon(1e-4));
    CHECK(cov.matrix(0, 1) == doctest::Approx(0.033184).epsilon(1e-4));
    CHECK(cov.matrix(0, 2) == doctest::Approx(-0.069877).epsilon(1e-4));
    CHECK(cov.matrix(1, 1) == doctest::Approx(0.097209).epsilon(1e-4));

    const auto half = limit_covariance_grid(grid, model, RegionSpec::box({0.0}, {0.5}), options);
    for (std::size_t a = 0; a < grid.size(); ++a)
        for (std::size_t b = 0; b < grid.size(); ++b)
            CHECK(std::fabs(half.matrix(a, b) - 0.5 * line_covariance(grid[a], grid[b])) <= options.epsilon + 1e-12);

    const auto origin = limit_covariance(0.0, 0.0, model, RegionSpec::all_space(), options);
    CHECK(origin.estimate.value == doctest::Approx(1.0));
    const auto pair = limit_covariance(1.0, 0.25, model, RegionSpec::all_space(), options);
    CHECK(std::fabs(pair.estimate.value - line_covariance(1.0, 0.25)) <= options.epsilon + 1e-12);

    options.mc.policy = VolumePolicy::grid_quadrature;
    CHECK_THROWS_AS(limit_covariance_grid(grid, model, RegionSpec::all_space(), options), ValidationError);
    options.mc.policy = VolumePolicy::automatic;
    const std::vector<double> bad{0.5, 0.25};
    CHECK_THROWS_AS(limit_covariance_grid(bad, model, RegionSpec::all_space(), options), ValidationError);
}

TEST_CASE("Monte Carlo covariance reproduces the exact line covariance")
{
    LimitOptions options;
    options.epsilon = 1e-4;
    options.mc.policy = VolumePolicy::monte_carlo;
    options.mc.samples = 40'000;
    options.mc.seed = 17;
    const std::vector<double> grid{0.1, 0.2};
    const auto cov = limit_covariance_grid(grid, DensityModel::unit_cube(1), RegionSpec::all_space(), options);
    CHECK(cov.method == PsiMethod::monte_carlo);
    for (std::size_t a = 0; a < grid.size(); ++a)
        for (std::size_t b = 0; b < grid.size(); ++b)
        {
            CHECK(cov.std_error(a, b) > 0.0);
            CHECK(std::fabs(cov.matrix(a, b) - line_covariance(grid[a], grid[b])) <=
                  4.0 * cov.std_error(a, b) + options.epsilon);
        }
}

TEST_CASE("psi prefactor uses the density power integral")
{
    const auto model = DensityModel::uniform_cube(1, 0.5, {0.0});
    McOptions mc;
    const auto value = psi(1, 2, 1, 0.2, 0.3, model, RegionSpec::all_space(), mc);
    const double expected = std::pow(2.0, 4) * 0.5 / (factorial(1) * factorial(2) * factorial(1)) *
                            indicator_volume_1d(1, 2, 1, 0.2, 0.3);
    CHECK(value.value == doctest::Approx(expected).epsilon(1e-12));
    const auto total = Psi(1, 1, 0.2, 0.3, model, RegionSpec::all_space(), mc);
    const double sum = psi(1, 1, 1, 0.2, 0.3, model, RegionSpec::all_space(), mc).value +
                       psi(2, 1, 1, 0.2, 0.3, model, RegionSpec::all_space(), mc).value;
    CHECK(total.value == doctest::Approx(sum).epsilon(1e-14));
    CHECK_THROWS_AS(psi(3, 1, 1, 0.2, 0.3, model, RegionSpec::all_space(), mc), ValidationError);
    CHECK(parse_volume_policy("auto") == VolumePolicy::automatic);
    CHECK(parse_volume_policy("monte-carlo") == VolumePolicy::monte_carlo);
    CHECK_THROWS_AS(parse_volume_policy("simpson"), ValidationError);
}
