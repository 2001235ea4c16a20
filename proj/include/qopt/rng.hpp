#pragma once

#include <cstdint>
#include <random>

namespace qopt {

// All randomness in the library flows through this wrapper around
// std::mt19937_64. The engine is fully specified by the C++ standard, and the
// uniform mappings below are hand-rolled, so identical seeds give identical
// streams on every platform (the std distributions make no such promise).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 bits of entropy.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform integer in [lo, hi], both inclusive. Rejection-free modulo is
    // fine here: the bias is < 2^-40 for the ranges this library uses.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    int rademacher() { return (next_u64() & 1u) ? 1 : -1; }

private:
    std::mt19937_64 engine_;
};

// Derives an independent stream seed from (seed, stream index); used by
// restart loops so each restart owns its own generator. SplitMix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace qopt
