#pragma once

#include <stdexcept>
#include <string>

namespace ecp
{

/// Bad input: malformed configuration, out-of-range parameters, refused
/// campaign settings.
class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A computational guard tripped (work budget, series cap, sampler cap).
/// The inputs were well-formed but the requested computation is not tractable
/// or not meaningful under the configured limits.
class GuardTrip : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class CliqueBudgetExceeded : public GuardTrip
{
public:
    using GuardTrip::GuardTrip;
};

class TruncationCapExceeded : public GuardTrip
{
public:
    using GuardTrip::GuardTrip;
};

class SamplerFailure : public GuardTrip
{
public:
    using GuardTrip::GuardTrip;
};

class FactorizationError : public GuardTrip
{
public:
    using GuardTrip::GuardTrip;
};

} // namespace ecp
