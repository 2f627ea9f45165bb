#include "ecp/region.hpp"

#include "ecp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ecp
{

bool Box::contains(std::span<const double> x) const
{
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(x[i] >= lo[i] && x[i] < hi[i]))
            return false;
    return true;
}

double Box::overlap_volume(const Box& other) const
{
    double volume = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i)
    {
        const double a = std::max(lo[i], other.lo[i]);
        const double b = std::min(hi[i], other.hi[i]);
        if (!(b > a))
            return 0.0;
        volume *= b - a;
    }
    return volume;
}

void Box::validate() const
{
    if (lo.empty() || lo.size() != hi.size())
        throw ValidationError("box: lo and hi must be non-empty and of equal length");
    for (std::size_t i = 0; i < lo.size(); ++i)
    {
        if (std::isnan(lo[i]) || std::isnan(hi[i]) || !(lo[i] < hi[i]))
            throw ValidationError("box: require lo < hi in every coordinate");
    }
}

RegionSpec RegionSpec::box(std::vector<double> lo, std::vector<double> hi)
{
    RegionSpec region;
    region.kind_ = Kind::box;
    region.box_ = Box{std::move(lo), std::move(hi)};
    region.box_.validate();
    return region;
}

} // namespace ecp
