#pragma once

#include <stdexcept>
#include <string>

namespace ecfield {

// Invalid or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Fewer than three u-levels carry enough Monte Carlo signal for the
// decay-exponent fit (CLI exit code 3).
class InsufficientSignalError : public std::runtime_error {
public:
    InsufficientSignalError(const std::string& what, double largest_usable_u)
        : std::runtime_error(what), largest_usable_u_(largest_usable_u) {}

    double largest_usable_u() const { return largest_usable_u_; }

private:
    double largest_usable_u_;
};

// Circulant embedding or spectral synthesis could not be constructed within
// the clamping policy (CLI exit code 4).
class SamplerError : public std::runtime_error {
public:
    explicit SamplerError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ecfield
