#include "ecp/random.hpp"

#include <cmath>
#include <numbers>

namespace ecp
{

namespace
{
constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
} // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

Philox4x32::Block Philox4x32::encrypt(Block c, Key k)
{
    for (int round = 0; round < 10; ++round)
    {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

void Philox4x32::refill()
{
    const Block counter{static_cast<std::uint32_t>(position_), static_cast<std::uint32_t>(position_ >> 32),
                        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    buffer_ = encrypt(counter, key);
    ++position_;
    used_ = 0;
}

Philox4x32::result_type Philox4x32::operator()()
{
    if (used_ == 4)
        refill();
    return buffer_[used_++];
}

double Variates::uniform()
{
    const std::uint64_t a = engine_() >> 5;
    const std::uint64_t b = engine_() >> 6;
    return static_cast<double>((a << 26) | b) * 0x1.0p-53;
}

double Variates::uniform_open()
{
    const std::uint64_t a = engine_() >> 5;
    const std::uint64_t b = engine_() >> 6;
    return (static_cast<double>((a << 26) | b) + 0.5) * 0x1.0p-53;
}

double Variates::normal()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u = uniform_open();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * std::numbers::pi * v;
    spare_normal_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

std::uint64_t Variates::poisson(double mean)
{
    if (!(mean > 0.0))
        return 0;
    if (mean >= 10.0)
        return poisson_ptrs(mean);
    // Multiplication method; expected mean + 1 uniforms.
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double product = uniform_open();
    while (product > limit)
    {
        ++k;
        product *= uniform_open();
    }
    return k;
}

// Hormann's transformed rejection with squeeze (PTRS), valid for mean >= 10.
std::uint64_t Variates::poisson_ptrs(double mean)
{
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;)
    {
        const double u = uniform() - 0.5;
        const double v = uniform_open();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr)
            return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0))
            return static_cast<std::uint64_t>(k);
    }
}

void Variates::on_sphere(std::span<double> out)
{
    double norm2 = 0.0;
    do
    {
        norm2 = 0.0;
        for (auto& x : out)
        {
            x = normal();
            norm2 += x * x;
        }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : out)
        x *= inv;
}

void Variates::in_ball(std::span<double> out, double radius)
{
    const std::size_t d = out.size();
    if (d == 1)
    {
        out[0] = radius * (2.0 * uniform() - 1.0);
        return;
    }
    if (d <= 3)
    {
        // Rejection from the enclosing cube: acceptance pi/4 (d=2), pi/6 (d=3).
        for (;;)
        {
            double norm2 = 0.0;
            for (auto& x : out)
            {
                x = 2.0 * uniform() - 1.0;
                norm2 += x * x;
            }
            if (norm2 <= 1.0)
                break;
        }
        for (auto& x : out)
            x *= radius;
        return;
    }
    on_sphere(out);
    const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(d));
    for (auto& x : out)
        x *= r;
}

} // namespace ecp
