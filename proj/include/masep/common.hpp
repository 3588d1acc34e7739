#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace masep {

using Complex = std::complex<double>;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

/// A requested object exceeds the configured size limit.
struct CapacityError : Error {
    using Error::Error;
};

/// A required file or fixture is missing.
struct MissingInput : Error {
    using Error::Error;
};

/// Evaluation at a pole of a weight function or eigenvalue formula.
struct PoleError : Error {
    using Error::Error;
};

/// An internal consistency check failed (rank mismatch, multiple
/// stationary states, degenerate Bethe roots, ...).
struct StructuralError : Error {
    using Error::Error;
};

struct NonConvergence : Error {
    using Error::Error;
};

/// Matching tolerances used by every multiset comparison.
struct Tolerance {
    double abs = 1e-8;
    double rel = 1e-8;

    double window(double magnitude) const { return std::max(abs, rel * magnitude); }
    double window(const Complex& z) const { return window(std::abs(z)); }
};

inline bool close(const Complex& a, const Complex& b, const Tolerance& tol) {
    return std::abs(a - b) <= tol.window(std::max(std::abs(a), std::abs(b)));
}

/// Configuration of local states on the ring, values in 1..n.
using Config = std::vector<int>;

/// Packs a configuration into a 64-bit key (used for basis index maps and
/// the transfer-matrix contraction). `bits` must satisfy L*bits <= 64 and
/// every value must fit in `bits` bits.
inline std::uint64_t encode_config(const Config& k, int bits) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < k.size(); ++i) key |= std::uint64_t(k[i]) << (bits * i);
    return key;
}

inline int bits_for_states(int max_state) {
    int b = 1;
    while ((1 << b) <= max_state) ++b;
    return b;
}

}  // namespace masep
