#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace mstab {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SpMatrix = Eigen::SparseMatrix<Scalar>;
using Triplet = Eigen::Triplet<Scalar>;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameter values.
struct ConfigError : Error {
    using Error::Error;
};

/// Malformed or incompatible input data (files, graphs).
struct InputError : Error {
    using Error::Error;
};

/// Numerical failure (non-convergence, invariant violation, overflow).
struct NumericError : Error {
    using Error::Error;
};

/// Requested feature is declared but not implemented.
struct NotSupportedError : Error {
    using Error::Error;
};

/// Non-fatal warnings go through a process-wide handler so callers (and
/// tests) can capture them. Default prints to stderr.
using WarningHandler = std::function<void(const std::string&)>;
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

// Deterministic RNG helpers. All randomness in the library goes through
// these so results do not depend on standard-library distribution
// implementations.
namespace rng {

using Engine = std::uint64_t;  // splitmix64 state

inline std::uint64_t next(Engine& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
inline std::uint64_t bounded(Engine& state, std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
        const std::uint64_t r = next(state);
        if (r >= threshold) return r % bound;
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double canonical(Engine& state) {
    return static_cast<double>(next(state) >> 11) * 0x1.0p-53;
}

/// Fisher-Yates shuffle of [first, last).
template <typename It>
void shuffle(It first, It last, Engine& state) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const std::uint64_t j = bounded(state, i);
        std::swap(first[i - 1], first[j]);
    }
}

}  // namespace rng

}  // namespace mstab
