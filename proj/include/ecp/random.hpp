#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace ecp
{

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// The 64-bit key selects an independent family; the upper 64 bits of the
/// 128-bit counter select a stream inside that family and the lower 64 bits
/// are the running position. Output is a pure function of (key, counter),
/// so any stream can be regenerated without replaying the others.
class Philox4x32
{
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Raw 10-round bijection; exposed for known-answer tests.
    static Block encrypt(Block counter, Key key);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t position_ = 0;
    Block buffer_{};
    int used_ = 4;
};

/// Key for replication `index` of a campaign seeded with `base`.
constexpr std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index)
{
    return base ^ index;
}

/// SplitMix64 finaliser; used to fold structured identifiers into seeds.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value)
{
    return mix64(seed ^ mix64(value));
}

/// Variate helpers. All of them consume a fixed pattern of 32-bit words so
/// results do not depend on the standard library's distribution classes.
class Variates
{
public:
    explicit Variates(Philox4x32 engine) : engine_(engine) {}
    Variates(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1); never returns an endpoint.
    double uniform_open();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    std::uint64_t poisson(double mean);
    /// Uniform point in the closed ball of the given radius around the origin.
    void in_ball(std::span<double> out, double radius);
    /// Uniform direction on the unit sphere.
    void on_sphere(std::span<double> out);

    Philox4x32& engine() { return engine_; }

private:
    std::uint64_t poisson_ptrs(double mean);

    Philox4x32 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace ecp
