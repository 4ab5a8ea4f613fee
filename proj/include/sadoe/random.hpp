#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace sadoe {

/// Counter-based generator built on the SplitMix64 finalizer.
///
/// The n-th output is a pure function of (key, n), so streams are cheap to
/// split and reproducible across platforms. All distributions are derived
/// here rather than through <random> distributions, whose output is
/// implementation-defined.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * kGolden); }

    /// Independent child stream identified by `stream`.
    [[nodiscard]] Rng split(std::uint64_t stream) const;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1); never returns 0.
    double uniform_open();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n) without modulo bias.
    std::size_t uniform_index(std::size_t n);
    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal();

    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    Rng(std::uint64_t key, std::uint64_t counter, int) : key_(key), counter_(counter) {}

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace sadoe
