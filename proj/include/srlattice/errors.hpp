#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace srl {

/// Invalid parameters, bounds or run configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A transition kernel could not be published (raw values outside [0,1]
/// and no projection scheme selected). Carries the offending node and the
/// raw triple.
class KernelError : public std::runtime_error {
public:
    KernelError(const std::string& what, int k, int i, int j,
                double up, double mid, double down)
        : std::runtime_error(what), k(k), i(i), j(j), raw{up, mid, down} {}

    int k, i, j;
    std::array<double, 3> raw; // up, mid, down
};

/// Checkpoint file missing, truncated, version-mismatched or written for a
/// different problem instance.
class CheckpointError : public std::runtime_error {
public:
    explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

/// A hard invariant failed at runtime (admissibility violated, absolute
/// continuity lost after projection, breakpoint budget exceeded, ...).
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace srl
