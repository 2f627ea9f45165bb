#include "ecp/point_process.hpp"

#include "ecp/random.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace ecp
{

namespace
{

// Phi(b) - Phi(a) without cancellation in either tail.
double normal_mass(double a, double b)
{
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    if (a >= 0.0)
        return 0.5 * (std::erfc(a * inv_sqrt2) - std::erfc(b * inv_sqrt2));
    if (b <= 0.0)
        return 0.5 * (std::erfc(-b * inv_sqrt2) - std::erfc(-a * inv_sqrt2));
    return 1.0 - 0.5 * (std::erfc(-a * inv_sqrt2) + std::erfc(b * inv_sqrt2));
}

void require(bool condition, const std::string& message)
{
    if (!condition)
        throw ValidationError(message);
}

} // namespace

std::string format_double(double value)
{
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

DensityModel DensityModel::uniform_cube(int dimension, double side, std::vector<double> center)
{
    require(dimension >= 1, "uniform-cube: dimension must be positive");
    require(std::isfinite(side) && side > 0.0, "uniform-cube: side must be positive");
    require(center.size() == static_cast<std::size_t>(dimension), "uniform-cube: center must have d entries");
    DensityModel model;
    model.dimension_ = dimension;
    model.support_.lo.resize(dimension);
    model.support_.hi.resize(dimension);
    for (int i = 0; i < dimension; ++i)
    {
        require(std::isfinite(center[i]), "uniform-cube: center must be finite");
        model.support_.lo[i] = center[i] - 0.5 * side;
        model.support_.hi[i] = center[i] + 0.5 * side;
    }
    model.sup_ = std::pow(side, -static_cast<double>(dimension));
    model.params_ = UniformCube{side, std::move(center)};
    return model;
}

DensityModel DensityModel::unit_cube(int dimension)
{
    return uniform_cube(dimension, 1.0, std::vector<double>(static_cast<std::size_t>(std::max(dimension, 0)), 0.5));
}

DensityModel DensityModel::truncated_gaussian(std::vector<double> mean, std::vector<double> sigma, Box box)
{
    const std::size_t d = mean.size();
    require(d >= 1, "truncated-gaussian: mean must be non-empty");
    require(sigma.size() == d, "truncated-gaussian: sigma must have d entries");
    require(box.lo.size() == d, "truncated-gaussian: box must have d coordinates");
    box.validate();
    DensityModel model;
    model.dimension_ = static_cast<int>(d);
    TruncatedGaussian params{std::move(mean), std::move(sigma), std::vector<double>(d)};
    double sup = 1.0;
    for (std::size_t i = 0; i < d; ++i)
    {
        require(std::isfinite(params.mean[i]), "truncated-gaussian: mean must be finite");
        require(std::isfinite(params.sigma[i]) && params.sigma[i] > 0.0, "truncated-gaussian: sigma must be positive");
        require(std::isfinite(box.lo[i]) && std::isfinite(box.hi[i]), "truncated-gaussian: box must be bounded");
        const double a = (box.lo[i] - params.mean[i]) / params.sigma[i];
        const double b = (box.hi[i] - params.mean[i]) / params.sigma[i];
        const double mass = normal_mass(a, b);
        require(mass > 0.0, "truncated-gaussian: box carries no Gaussian mass");
        params.log_norm[i] = std::log(params.sigma[i] * std::sqrt(2.0 * std::numbers::pi) * mass);
        const double peak = std::clamp(params.mean[i], box.lo[i], box.hi[i]);
        const double z = (peak - params.mean[i]) / params.sigma[i];
        sup *= std::exp(-0.5 * z * z - params.log_norm[i]);
    }
    model.support_ = std::move(box);
    model.sup_ = sup;
    model.params_ = std::move(params);
    return model;
}

DensityModel DensityModel::piecewise_constant(Box box, std::vector<int> shape, std::vector<double> weights)
{
    const std::size_t d = box.lo.size();
    box.validate();
    require(shape.size() == d, "piecewise-constant: shape must have d entries");
    std::size_t cells = 1;
    double box_volume = 1.0;
    for (std::size_t i = 0; i < d; ++i)
    {
        require(shape[i] >= 1, "piecewise-constant: shape entries must be positive");
        require(std::isfinite(box.lo[i]) && std::isfinite(box.hi[i]), "piecewise-constant: box must be bounded");
        cells *= static_cast<std::size_t>(shape[i]);
        box_volume *= box.hi[i] - box.lo[i];
    }
    require(weights.size() == cells, "piecewise-constant: need one weight per cell");
    double total = 0.0;
    for (double w : weights)
    {
        require(std::isfinite(w) && w >= 0.0, "piecewise-constant: weights must be non-negative");
        total += w;
    }
    require(total > 0.0, "piecewise-constant: weights must not all be zero");
    const double cell_volume = box_volume / static_cast<double>(cells);
    for (double& w : weights)
        w /= total * cell_volume;

    DensityModel model;
    model.dimension_ = static_cast<int>(d);
    model.sup_ = *std::max_element(weights.begin(), weights.end());
    model.support_ = std::move(box);
    model.params_ = PiecewiseConstant{std::move(shape), std::move(weights)};
    return model;
}

DensityModel::Kind DensityModel::kind() const
{
    return static_cast<Kind>(params_.index());
}

std::string DensityModel::kind_name() const
{
    switch (kind())
    {
    case Kind::uniform_cube:
        return "uniform-cube";
    case Kind::truncated_gaussian:
        return "truncated-gaussian";
    case Kind::piecewise_constant:
        return "piecewise-constant";
    }
    return "unknown";
}

double DensityModel::sup_norm() const
{
    return sup_;
}

std::size_t DensityModel::cell_index(std::span<const double> x) const
{
    const auto& pc = std::get<PiecewiseConstant>(params_);
    std::size_t index = 0;
    for (int i = 0; i < dimension_; ++i)
    {
        const double width = (support_.hi[i] - support_.lo[i]) / pc.shape[i];
        auto cell = static_cast<long long>(std::floor((x[i] - support_.lo[i]) / width));
        cell = std::clamp<long long>(cell, 0, pc.shape[i] - 1);
        index = index * static_cast<std::size_t>(pc.shape[i]) + static_cast<std::size_t>(cell);
    }
    return index;
}

double DensityModel::value(std::span<const double> x) const
{
    if (!support_.contains(x))
        return 0.0;
    switch (kind())
    {
    case Kind::uniform_cube:
        return sup_;
    case Kind::truncated_gaussian: {
        const auto& tg = std::get<TruncatedGaussian>(params_);
        double log_value = 0.0;
        for (int i = 0; i < dimension_; ++i)
        {
            const double z = (x[i] - tg.mean[i]) / tg.sigma[i];
            log_value += -0.5 * z * z - tg.log_norm[i];
        }
        return std::exp(log_value);
    }
    case Kind::piecewise_constant:
        return std::get<PiecewiseConstant>(params_).values[cell_index(x)];
    }
    return 0.0;
}

double DensityModel::axis_power_integral(std::size_t axis, int p, double lo, double hi) const
{
    const auto& tg = std::get<TruncatedGaussian>(params_);
    const double mean = tg.mean[axis];
    const double sigma = tg.sigma[axis];
    const double log_norm = tg.log_norm[axis];
    const double power = static_cast<double>(p);
    auto integrand = [&](double x) {
        const double z = (x - mean) / sigma;
        return std::exp(power * (-0.5 * z * z - log_norm));
    };
    // Split at the mode so the peak never straddles a panel boundary.
    double total = 0.0;
    double error = 0.0;
    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
    if (mean > lo && mean < hi)
    {
        total += Quadrature::integrate(integrand, lo, mean, 20, 1e-13, &error);
        total += Quadrature::integrate(integrand, mean, hi, 20, 1e-13, &error);
    }
    else
    {
        total = Quadrature::integrate(integrand, lo, hi, 20, 1e-13, &error);
    }
    return total;
}

double DensityModel::power_integral(int p, const RegionSpec& region) const
{
    if (p < 1)
        throw ValidationError("power_integral: exponent must be >= 1");
    Box domain = support_;
    if (!region.is_all_space())
    {
        if (region.bounds().dimension() != static_cast<std::size_t>(dimension_))
            throw ValidationError("power_integral: region dimension does not match the density");
        for (int i = 0; i < dimension_; ++i)
        {
            domain.lo[i] = std::max(domain.lo[i], region.bounds().lo[i]);
            domain.hi[i] = std::min(domain.hi[i], region.bounds().hi[i]);
            if (!(domain.hi[i] > domain.lo[i]))
                return 0.0;
        }
    }
    double result = 0.0;
    switch (kind())
    {
    case Kind::uniform_cube: {
        double volume = 1.0;
        for (int i = 0; i < dimension_; ++i)
            volume *= domain.hi[i] - domain.lo[i];
        result = std::pow(sup_, static_cast<double>(p)) * volume;
        break;
    }
    case Kind::truncated_gaussian: {
        result = 1.0;
        for (int i = 0; i < dimension_; ++i)
            result *= axis_power_integral(static_cast<std::size_t>(i), p, domain.lo[i], domain.hi[i]);
        break;
    }
    case Kind::piecewise_constant: {
        const auto& pc = std::get<PiecewiseConstant>(params_);
        std::vector<int> cell(static_cast<std::size_t>(dimension_), 0);
        Box cell_box{std::vector<double>(dimension_), std::vector<double>(dimension_)};
        for (std::size_t index = 0; index < pc.values.size(); ++index)
        {
            // Row-major decode, last axis fastest.
            std::size_t rest = index;
            for (int i = dimension_ - 1; i >= 0; --i)
            {
                cell[i] = static_cast<int>(rest % static_cast<std::size_t>(pc.shape[i]));
                rest /= static_cast<std::size_t>(pc.shape[i]);
                const double width = (support_.hi[i] - support_.lo[i]) / pc.shape[i];
                cell_box.lo[i] = support_.lo[i] + width * cell[i];
                cell_box.hi[i] = cell[i] + 1 == pc.shape[i] ? support_.hi[i] : support_.lo[i] + width * (cell[i] + 1);
            }
            const double overlap = cell_box.overlap_volume(domain);
            if (overlap > 0.0 && pc.values[index] > 0.0)
                result += std::pow(pc.values[index], static_cast<double>(p)) * overlap;
        }
        break;
    }
    }
    if (!std::isfinite(result))
        throw ValidationError("power_integral: integral is not finite");
    return result;
}

ScalingContext::ScalingContext(double n, int dimension) : n_(n), dimension_(dimension)
{
    if (!std::isfinite(n) || n < 0.0)
        throw ValidationError("scaling: n must be a finite non-negative number");
    if (dimension < 1)
        throw ValidationError("scaling: dimension must be positive");
    s_n_ = n > 0.0 ? std::pow(n, -1.0 / static_cast<double>(dimension)) : std::numeric_limits<double>::infinity();
}

PointCloud sample_poisson(const DensityModel& model, const ScalingContext& ctx, std::uint64_t seed,
                          const SamplingOptions& options)
{
    if (model.dimension() != ctx.dimension())
        throw ValidationError("sample_poisson: model and scaling dimensions differ");
    Variates rng(seed, options.stream);
    const std::uint64_t count = rng.poisson(ctx.n());
    PointCloud cloud;
    cloud.dimension = model.dimension();
    cloud.context = ctx;
    cloud.seed = seed;
    cloud.coords.resize(count * static_cast<std::uint64_t>(cloud.dimension));
    for (std::uint64_t i = 0; i < count; ++i)
    {
        std::span<double> point(cloud.coords.data() + i * cloud.dimension, static_cast<std::size_t>(cloud.dimension));
        model.sample(rng, point, options.max_attempts_per_point);
    }
    return cloud;
}

void write_cloud_csv(std::ostream& out, const PointCloud& cloud)
{
    for (int i = 0; i < cloud.dimension; ++i)
        out << (i ? "," : "") << 'x' << i;
    out << '\n';
    for (std::size_t p = 0; p < cloud.size(); ++p)
    {
        const auto x = cloud.point(p);
        for (int i = 0; i < cloud.dimension; ++i)
            out << (i ? "," : "") << format_double(x[i]);
        out << '\n';
    }
}

PointCloud read_cloud_csv(std::istream& in, const ScalingContext& ctx)
{
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("cloud csv: missing header");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    std::vector<std::string> header;
    {
        std::stringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ','))
            header.push_back(field);
    }
    const int d = static_cast<int>(header.size());
    if (d != ctx.dimension())
        throw ValidationError("cloud csv: column count does not match the scaling dimension");
    for (int i = 0; i < d; ++i)
        if (header[i] != "x" + std::to_string(i))
            throw ValidationError("cloud csv: header must be x0..x{d-1}");

    PointCloud cloud;
    cloud.dimension = d;
    cloud.context = ctx;
    std::size_t row = 1;
    while (std::getline(in, line))
    {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const char* cursor = line.data();
        const char* end = line.data() + line.size();
        for (int i = 0; i < d; ++i)
        {
            double value = 0.0;
            const auto parsed = std::from_chars(cursor, end, value);
            if (parsed.ec != std::errc() || !std::isfinite(value))
                throw ValidationError("cloud csv: bad number on row " + std::to_string(row));
            cloud.coords.push_back(value);
            cursor = parsed.ptr;
            if (i + 1 < d)
            {
                if (cursor == end || *cursor != ',')
                    throw ValidationError("cloud csv: too few columns on row " + std::to_string(row));
                ++cursor;
            }
        }
        if (cursor != end)
            throw ValidationError("cloud csv: too many columns on row " + std::to_string(row));
    }
    return cloud;
}

} // namespace ecp
