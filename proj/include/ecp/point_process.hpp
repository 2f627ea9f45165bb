#pragma once

#include "ecp/region.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ecp
{

/// Bounded probability density on R^d.
///
/// Three families are supported:
///  - uniform-cube: constant side^-d on a cube of the given side and center;
///  - truncated-gaussian: product of independent normals N(mean_i, sigma_i^2)
///    restricted to a box and renormalised;
///  - piecewise-constant: a regular grid of cells over a box, with cell
///    weights normalised so the density integrates to one.
class DensityModel
{
public:
    enum class Kind
    {
        uniform_cube,
        truncated_gaussian,
        piecewise_constant
    };

    static DensityModel uniform_cube(int dimension, double side, std::vector<double> center);
    /// Unit cube [0,1)^d.
    static DensityModel unit_cube(int dimension);
    static DensityModel truncated_gaussian(std::vector<double> mean, std::vector<double> sigma, Box box);
    /// `shape[i]` cells along axis i; weights in row-major order (last axis fastest).
    static DensityModel piecewise_constant(Box box, std::vector<int> shape, std::vector<double> weights);

    Kind kind() const;
    std::string kind_name() const;
    int dimension() const { return dimension_; }

    double value(std::span<const double> x) const;
    double sup_norm() const;
    /// Smallest axis-aligned box containing the support.
    const Box& support_box() const { return support_; }

    /// Integral of f^p over A (p >= 1). Closed form for uniform-cube and
    /// piecewise-constant; adaptive Gauss-Kronrod per axis for the truncated
    /// Gaussian (the integrand separates over coordinates).
    double power_integral(int p, const RegionSpec& region = RegionSpec::all_space()) const;

    /// Draw one point from f. Uniform cubes are sampled directly; other kinds
    /// use rejection against support_box() x sup_norm(), giving up after
    /// `max_attempts` proposals.
    template <typename Rng>
    void sample(Rng& rng, std::span<double> out, int max_attempts) const;

    struct UniformCube
    {
        double side;
        std::vector<double> center;
    };
    struct TruncatedGaussian
    {
        std::vector<double> mean;
        std::vector<double> sigma;
        std::vector<double> log_norm; // per-axis log of (sigma_i * sqrt(2 pi) * mass_i)
    };
    struct PiecewiseConstant
    {
        std::vector<int> shape;
        std::vector<double> values; // density value per cell
    };

    const std::variant<UniformCube, TruncatedGaussian, PiecewiseConstant>& parameters() const { return params_; }

private:
    DensityModel() = default;

    double axis_power_integral(std::size_t axis, int p, double lo, double hi) const;
    std::size_t cell_index(std::span<const double> x) const;

    int dimension_ = 0;
    Box support_;
    double sup_ = 0.0;
    std::variant<UniformCube, TruncatedGaussian, PiecewiseConstant> params_;
};

/// Critical-regime scaling with n * s_n^d = 1 exactly.
class ScalingContext
{
public:
    ScalingContext(double n, int dimension);

    double n() const { return n_; }
    int dimension() const { return dimension_; }
    double s_n() const { return s_n_; }
    /// Ball radius r_n(t) = s_n t.
    double radius(double t) const { return t == 0.0 ? 0.0 : s_n_ * t; }

private:
    double n_;
    int dimension_;
    double s_n_;
};

/// One realisation of the Poisson process, stored row-major.
struct PointCloud
{
    int dimension = 0;
    std::vector<double> coords;
    ScalingContext context{1.0, 1};
    std::uint64_t seed = 0;

    std::size_t size() const { return dimension == 0 ? 0 : coords.size() / static_cast<std::size_t>(dimension); }
    std::span<const double> point(std::size_t i) const
    {
        return {coords.data() + i * static_cast<std::size_t>(dimension), static_cast<std::size_t>(dimension)};
    }
};

struct SamplingOptions
{
    int max_attempts_per_point = 10'000;
    /// Counter-stream within the seed's key; lets one replication seed feed
    /// several independent clouds.
    std::uint64_t stream = 0;
};

/// Poisson process with intensity n f: a Poisson(n) count of i.i.d. draws.
PointCloud sample_poisson(const DensityModel& model, const ScalingContext& ctx, std::uint64_t seed,
                          const SamplingOptions& options = {});

/// CSV with header x0..x{d-1}, shortest round-trip decimal formatting.
void write_cloud_csv(std::ostream& out, const PointCloud& cloud);
PointCloud read_cloud_csv(std::istream& in, const ScalingContext& ctx);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

} // namespace ecp

#include "ecp/errors.hpp"

namespace ecp
{

template <typename Rng>
void DensityModel::sample(Rng& rng, std::span<double> out, int max_attempts) const
{
    if (const auto* cube = std::get_if<UniformCube>(&params_))
    {
        for (int i = 0; i < dimension_; ++i)
            out[i] = cube->center[i] + cube->side * (rng.uniform() - 0.5);
        return;
    }
    for (int attempt = 0; attempt < max_attempts; ++attempt)
    {
        for (int i = 0; i < dimension_; ++i)
            out[i] = rng.uniform(support_.lo[i], support_.hi[i]);
        if (rng.uniform() * sup_ < value(out))
            return;
    }
    throw SamplerFailure("rejection sampler exhausted " + std::to_string(max_attempts) +
                         " attempts; density support is too thin for its bounding box");
}

} // namespace ecp
