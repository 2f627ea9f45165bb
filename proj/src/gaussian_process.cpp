#include "ecp/gaussian_process.hpp"

#include "ecp/errors.hpp"
#include "ecp/parallel.hpp"
#include "ecp/random.hpp"

#include <cmath>

namespace ecp
{

namespace
{
constexpr double eigen_tolerance = 1e-10;
}

PsdRepair psd_repair(const Eigen::MatrixXd& matrix)
{
    if (matrix.rows() != matrix.cols())
        throw ValidationError("psd_repair: matrix must be square");
    if (!matrix.allFinite())
        throw FactorizationError("psd_repair: covariance contains non-finite entries");
    PsdRepair out;
    out.matrix = 0.5 * (matrix + matrix.transpose());
    if (matrix.rows() == 0)
        return out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.matrix, Eigen::EigenvaluesOnly);
    out.min_eigenvalue_before = solver.eigenvalues().minCoeff();
    const double trace = std::fabs(out.matrix.trace());
    double jitter = 0.0;
    for (double scale = 1e-12;; scale *= 10.0)
    {
        if (out.min_eigenvalue_before + jitter >= -eigen_tolerance)
            break;
        if (scale > 1.5e-8)
            throw FactorizationError("psd_repair: minimum eigenvalue " + std::to_string(out.min_eigenvalue_before) +
                                     " cannot be lifted by jitter up to 1e-8 * trace");
        jitter = scale * trace;
    }
    out.jitter = jitter;
    out.matrix.diagonal().array() += jitter;
    out.min_eigenvalue_after = out.min_eigenvalue_before + jitter;
    return out;
}

void repair_grid(CovarianceGrid& grid)
{
    auto repaired = psd_repair(grid.matrix);
    grid.matrix = std::move(repaired.matrix);
    grid.psd_repair = repaired.jitter;
}

GaussianSampler::GaussianSampler(const CovarianceGrid& grid) : t_grid_(grid.t_grid)
{
    const auto n = static_cast<Eigen::Index>(grid.t_grid.size());
    if (grid.matrix.rows() != n || grid.matrix.cols() != n)
        throw ValidationError("gp_sample: covariance matrix does not match the grid");
    const auto repaired = psd_repair(grid.matrix);
    jitter_ = repaired.jitter;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(repaired.matrix);
    if (ldlt.info() != Eigen::Success)
        throw FactorizationError("gp_sample: LDLT factorisation failed");
    Eigen::VectorXd D = ldlt.vectorD();
    const double scale = std::max(1.0, repaired.matrix.diagonal().cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < D.size(); ++i)
    {
        if (D(i) < -eigen_tolerance * scale)
            throw FactorizationError("gp_sample: negative pivot after repair");
        D(i) = std::max(D(i), 0.0);
    }
    Eigen::MatrixXd L = ldlt.matrixL();
    factor_ = ldlt.transpositionsP().transpose() * (L * D.cwiseSqrt().asDiagonal());
}

GPPath GaussianSampler::sample(std::uint64_t seed) const
{
    Variates rng(seed, 0);
    Eigen::VectorXd z(factor_.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        z(i) = rng.normal();
    const Eigen::VectorXd x = factor_ * z;
    return {t_grid_, std::vector<double>(x.data(), x.data() + x.size()), seed};
}

GPPath gp_sample(const CovarianceGrid& grid, std::uint64_t seed)
{
    return GaussianSampler(grid).sample(seed);
}

std::vector<GPPath> gp_sample_paths(const CovarianceGrid& grid, std::uint64_t seed, std::size_t count, int jobs)
{
    const GaussianSampler sampler(grid);
    std::vector<GPPath> paths(count);
    parallel_for(count, jobs, [&](std::size_t i) { paths[i] = sampler.sample(replication_seed(seed, i)); });
    return paths;
}

IncrementReport gp_increment_check(const CovarianceGrid& grid)
{
    const auto& t = grid.t_grid;
    const Eigen::MatrixXd& c = grid.matrix;
    const bool have_errors = grid.std_error.rows() == c.rows() && grid.std_error.cols() == c.cols();
    IncrementReport report;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
    {
        const auto a = static_cast<Eigen::Index>(i);
        const auto b = a + 1;
        const double increment = c(a, a) - 2.0 * c(a, b) + c(b, b);
        double se = 0.0;
        if (have_errors)
        {
            const auto& e = grid.std_error;
            se = std::sqrt(e(a, a) * e(a, a) + 4.0 * e(a, b) * e(a, b) + e(b, b) * e(b, b));
        }
        report.increments.push_back(increment);
        report.increment_std_errors.push_back(se);
        const double ratio = increment / (t[i + 1] - t[i]);
        report.ratios.push_back(ratio);
        report.C = std::max(report.C, ratio);
        const double scale = std::max({std::fabs(c(a, a)), std::fabs(c(b, b)), std::fabs(c(a, b))});
        const double allowance = se > 0.0 ? 3.0 * se : 1e-12 * scale;
        if (increment < -allowance)
            report.negative_pairs.push_back(i);
    }
    return report;
}

RefinementReport compare_refinement(const IncrementReport& coarse, const IncrementReport& fine, double tolerance)
{
    RefinementReport out;
    out.coarse_C = coarse.C;
    out.fine_C = fine.C;
    if (coarse.C == 0.0)
    {
        out.relative_change = fine.C == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    else
    {
        out.relative_change = std::fabs(fine.C - coarse.C) / coarse.C;
    }
    out.stable = out.relative_change <= tolerance && !coarse.negative_flagged() && !fine.negative_flagged();
    return out;
}

} // namespace ecp
