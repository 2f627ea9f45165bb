#include "ecp/errors.hpp"
#include "ecp/point_process.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ecp;

namespace
{

double phi(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double Phi(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Composite Simpson rule on a product grid: the dense-grid oracle.
double grid_power_integral(const DensityModel& model, int p, int per_axis)
{
    const auto& box = model.support_box();
    const int d = model.dimension();
    std::vector<int> index(d, 0);
    std::vector<double> x(d);
    double total = 0.0;
    for (;;)
    {
        double weight = 1.0;
        for (int i = 0; i < d; ++i)
        {
            const double h = (box.hi[i] - box.lo[i]) / per_axis;
            x[i] = box.lo[i] + index[i] * h;
            const int k = index[i];
            weight *= h / 3.0 * ((k == 0 || k == per_axis) ? 1.0 : (k % 2 ? 4.0 : 2.0));
        }
        total += weight * std::pow(model.value(x), p);
        int axis = 0;
        while (axis < d && index[axis] == per_axis)
            index[axis++] = 0;
        if (axis == d)
            break;
        ++index[axis];
    }
    return total;
}

} // namespace

TEST_CASE("power integrals of uniform cubes")
{
    CHECK(DensityModel::unit_cube(1).power_integral(3) == doctest::Approx(1.0));
    CHECK(DensityModel::uniform_cube(1, 2.0, {1.0}).power_integral(2) == doctest::Approx(0.5));
    CHECK(DensityModel::unit_cube(3).power_integral(1) == doctest::Approx(1.0).epsilon(1e-12));
    const auto half = RegionSpec::box({0.0}, {0.5});
    CHECK(DensityModel::unit_cube(1).power_integral(4, half) == doctest::Approx(0.5));
    CHECK_THROWS_AS(DensityModel::unit_cube(1).power_integral(0), ValidationError);
}

TEST_CASE("every model integrates to one")
{
    const auto gauss = DensityModel::truncated_gaussian({0.2, -0.1}, {0.5, 1.5}, Box{{-1.0, -2.0}, {1.5, 3.0}});
    const auto pc = DensityModel::piecewise_constant(Box{{0.0, 0.0}, {2.0, 1.0}}, {2, 3}, {1, 2, 3, 4, 5, 6});
    for (const auto& model : {DensityModel::unit_cube(2), gauss, pc})
        CHECK(std::fabs(model.power_integral(1) - 1.0) < 1e-9);
}

TEST_CASE("truncated gaussian power integral matches a dense grid")
{
    const auto model = DensityModel::truncated_gaussian({0.3}, {0.4}, Box{{-0.5}, {1.0}});
    CHECK(model.power_integral(2) == doctest::Approx(grid_power_integral(model, 2, 20000)).epsilon(1e-5));
    const auto model2 = DensityModel::truncated_gaussian({0.0, 0.5}, {1.0, 0.3}, Box{{-1.0, 0.0}, {2.0, 1.0}});
    CHECK(model2.power_integral(3) == doctest::Approx(grid_power_integral(model2, 3, 600)).epsilon(1e-5));
}

TEST_CASE("piecewise constant values and sup norm")
{
    const auto pc = DensityModel::piecewise_constant(Box{{0.0}, {2.0}}, {2}, {1.0, 3.0});
    const std::vector<double> left{0.5}, right{1.5}, outside{2.5};
    CHECK(pc.value(left) == doctest::Approx(0.25));
    CHECK(pc.value(right) == doctest::Approx(0.75));
    CHECK(pc.value(outside) == 0.0);
    CHECK(pc.sup_norm() == doctest::Approx(0.75));
    CHECK(pc.power_integral(2) == doctest::Approx(0.25 * 0.25 + 0.75 * 0.75));
}

TEST_CASE("scaling context")
{
    const ScalingContext ctx(1000.0, 3);
    CHECK(ctx.s_n() == doctest::Approx(0.1));
    CHECK(ctx.n() * std::pow(ctx.s_n(), 3) == doctest::Approx(1.0));
    CHECK(ctx.radius(2.0) == doctest::Approx(0.2));
    CHECK(ctx.radius(0.0) == 0.0);
    CHECK_THROWS_AS(ScalingContext(-1.0, 1), ValidationError);
}

TEST_CASE("poisson sampling: counts, determinism, support")
{
    const auto model = DensityModel::unit_cube(1);
    const ScalingContext ctx(1000.0, 1);
    double sum = 0.0, sum2 = 0.0;
    const int R = 200;
    for (int seed = 0; seed < R; ++seed)
    {
        const auto cloud = sample_poisson(model, ctx, static_cast<std::uint64_t>(seed));
        const double c = static_cast<double>(cloud.size());
        sum += c;
        sum2 += c * c;
        for (double x : cloud.coords)
        {
            REQUIRE(x >= 0.0);
            REQUIRE(x < 1.0);
        }
    }
    const double mean = sum / R;
    const double var = (sum2 - R * mean * mean) / (R - 1);
    CHECK(std::fabs(mean - 1000.0) < 3.0 * std::sqrt(1000.0 / R));
    CHECK(var / mean > 1.0 - 5.0 / std::sqrt(R));
    CHECK(var / mean < 1.0 + 5.0 / std::sqrt(R));

    const auto a = sample_poisson(model, ctx, 99);
    const auto b = sample_poisson(model, ctx, 99);
    CHECK(a.coords == b.coords);
    CHECK(sample_poisson(model, ScalingContext(0.0, 1), 1).size() == 0);
    CHECK_THROWS_AS(sample_poisson(DensityModel::unit_cube(2), ctx, 1), ValidationError);
}

TEST_CASE("truncated gaussian sample mean matches the analytic truncated mean")
{
    const double mu = 0.2, sigma = 0.5, lo = -0.3, hi = 1.4;
    const auto model = DensityModel::truncated_gaussian({mu}, {sigma}, Box{{lo}, {hi}});
    const double a = (lo - mu) / sigma, b = (hi - mu) / sigma;
    const double Z = Phi(b) - Phi(a);
    const double mean = mu + sigma * (phi(a) - phi(b)) / Z;
    const double var =
        sigma * sigma * (1.0 + (a * phi(a) - b * phi(b)) / Z - std::pow((phi(a) - phi(b)) / Z, 2));
    const auto cloud = sample_poisson(model, ScalingContext(50000.0, 1), 3);
    double s = 0.0;
    for (double x : cloud.coords)
    {
        REQUIRE(x >= lo);
        REQUIRE(x < hi);
        REQUIRE(model.value(std::span<const double>(&x, 1)) <= model.sup_norm());
        s += x;
    }
    const double n = static_cast<double>(cloud.size());
    CHECK(std::fabs(s / n - mean) < 3.0 * std::sqrt(var / n));
}

TEST_CASE("thin support trips the rejection cap")
{
    // All mass in one of 10^6 cells: acceptance ~1e-6 per proposal.
    std::vector<double> w(1000000, 0.0);
    w[0] = 1.0;
    const auto model = DensityModel::piecewise_constant(Box{{0.0}, {1.0}}, {1000000}, w);
    SamplingOptions options;
    options.max_attempts_per_point = 10;
    CHECK_THROWS_AS(sample_poisson(model, ScalingContext(100.0, 1), 1, options), SamplerFailure);
}

TEST_CASE("cloud csv round trip is exact")
{
    const auto cloud = sample_poisson(DensityModel::unit_cube(2), ScalingContext(50.0, 2), 8);
    std::stringstream io;
    write_cloud_csv(io, cloud);
    CHECK(io.str().rfind("x0,x1\n", 0) == 0);
    const auto back = read_cloud_csv(io, cloud.context);
    CHECK(back.coords == cloud.coords);
    CHECK(back.dimension == 2);
}
