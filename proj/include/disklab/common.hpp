// disklab/common.hpp — shared error types, RNG stream derivation, small helpers.
//
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace disklab {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// ---------------------------------------------------------------------------
// Error taxonomy.  Each simulation failure mode gets its own type so callers
// (and tests) can distinguish them; all carry a human-readable message.
// ---------------------------------------------------------------------------
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define DISKLAB_ERROR(NAME)                                                   \
    struct NAME : Error {                                                     \
        explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {}    \
    }

DISKLAB_ERROR(SwallowResolutionError);
DISKLAB_ERROR(InvalidDriving);
DISKLAB_ERROR(InversionError);
DISKLAB_ERROR(NotContractive);
DISKLAB_ERROR(StiffnessError);
DISKLAB_ERROR(CotDivergence);
DISKLAB_ERROR(ResolutionError);
DISKLAB_ERROR(BadDimension);
DISKLAB_ERROR(HorizonExceeded);
DISKLAB_ERROR(ColorAmbiguity);
DISKLAB_ERROR(LinearAlgebraError);
DISKLAB_ERROR(DegenerateSample);
DISKLAB_ERROR(WindowExhausted);
DISKLAB_ERROR(SampleTooSmall);
DISKLAB_ERROR(EmptySample);
DISKLAB_ERROR(RangeError);
DISKLAB_ERROR(ConfigError);

#undef DISKLAB_ERROR

// ---------------------------------------------------------------------------
// Deterministic RNG streams.  Per-trial streams are derived by mixing the
// master seed with a stream index (splitmix64 finalizer), so batches can run
// in any order or in parallel and still reproduce bit-for-bit.
// ---------------------------------------------------------------------------
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    Rng(std::uint64_t master, std::uint64_t stream) : eng_(mix_seed(master, stream)) {}

    double normal() { return normal_(eng_); }
    double uniform() { return unif_(eng_); }
    double uniform(double a, double b) { return a + (b - a) * unif_(eng_); }
    double exponential(double rate) { return -std::log1p(-unif_(eng_)) / rate; }
    std::uint64_t bits() { return eng_(); }
    bool coin() { return (eng_() & 1ULL) != 0; }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double a) {
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    return a;
}

inline double sq(double x) { return x * x; }

// Sample mean / variance helpers used throughout the verification suites.
inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += sq(x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace disklab
