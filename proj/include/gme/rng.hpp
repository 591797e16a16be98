#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gme {

/// Derives an independent stream seed from (seed, stream) via two rounds of
/// the splitmix64 finalizer. Pure function; used to assign reproducible
/// per-chunk and per-center seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    return mix(mix(seed) + stream);
}

/// Deterministic random source. The engine (mt19937_64) and every transform
/// below are fully specified, so identical seeds give identical streams on
/// any platform:
///   * uniforms take the top 53 bits of the engine output,
///   * normals come from the Box-Muller transform of two uniforms,
///   * bounded indices use the multiply-shift reduction (bias < bound/2^64).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal variate (Box-Muller; second variate of each pair is
    /// cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform index in [0, bound).
    std::uint64_t uniform_index(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(eng_()) * bound) >> 64);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gme
