#pragma once

#include <stdexcept>
#include <string>

namespace lcsf {

/// Invalid configuration, dimension mismatch or violated precondition.
/// Maps to process exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: simulation divergence, factorization breakdown,
/// non-finite objective. Maps to process exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure. Maps to process exit code 4.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int numeric = 3;
inline constexpr int io = 4;
} // namespace exit_code

} // namespace lcsf
