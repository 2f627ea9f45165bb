#pragma once

#include <span>
#include <vector>

namespace ecp
{

/// Axis-aligned box, half-open per coordinate: [lo, hi). Infinite bounds are
/// allowed so a finite set of boxes can partition all of R^d.
struct Box
{
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dimension() const { return lo.size(); }
    bool contains(std::span<const double> x) const;
    /// Lebesgue measure of the intersection with another box (same dimension).
    double overlap_volume(const Box& other) const;
    void validate() const;
};

/// Restriction set A for the left-most-point statistic.
class RegionSpec
{
public:
    enum class Kind
    {
        all_space,
        box
    };

    static RegionSpec all_space() { return RegionSpec{}; }
    static RegionSpec box(std::vector<double> lo, std::vector<double> hi);

    Kind kind() const { return kind_; }
    bool is_all_space() const { return kind_ == Kind::all_space; }
    const Box& bounds() const { return box_; }
    bool contains(std::span<const double> x) const { return kind_ == Kind::all_space || box_.contains(x); }

private:
    Kind kind_ = Kind::all_space;
    Box box_;
};

} // namespace ecp
