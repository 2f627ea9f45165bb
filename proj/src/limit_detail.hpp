#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ecp::detail
{

/// Joint histogram of the two indicator diameters over a threshold grid.
/// Bin g < G means the squared diameter is <= (2 t_g)^2 and > (2 t_{g-1})^2;
/// bin G means it exceeds every threshold.
struct DiameterBins
{
    int bins = 0; // G + 1
    std::uint64_t samples = 0;
    std::vector<std::uint64_t> counts; // row = block-1 bin, column = block-2 bin

    /// Number of samples with block-1 bin <= a and block-2 bin <= b.
    std::vector<std::uint64_t> cumulative() const;
};

/// Samples the k1+k2+1-j free points uniformly in B(0, 2 max(t_grid)) and
/// bins both diameters. Chunks of the sample use separate counter streams so
/// the histogram is independent of `jobs`.
DiameterBins sample_diameter_bins(int d, int j, int k1, int k2, std::span<const double> t_grid,
                                  std::uint64_t samples, std::uint64_t seed, int jobs);

std::uint64_t term_id(int j, int k1, int k2);

/// Squared diameter after adding y to a set already containing the origin,
/// `shared` and `block`; stops growing once past `cap`.
double absorb(double diameter, const double* y, const double* shared, int shared_count, const double* block,
              int block_count, int d, double cap);

} // namespace ecp::detail
