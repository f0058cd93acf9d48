#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Seeding and Gaussian generation are spelled out here instead of relying on
// std distributions: mt19937_64's output sequence is fixed by the standard,
// but std::normal_distribution is not, and experiment re-runs must be
// byte-identical across platforms.

namespace clqg::rng {

// splitmix64 finalizer (Stafford mix13). Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Replica seed stream: seed_i = mix64(master + (i+1) * golden_gamma).
// Distinct replica indices give distinct seeds (the offset map is injective
// mod 2^64 and mix64 is a bijection).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica_index) {
    constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;
    return mix64(master + (replica_index + 1) * golden_gamma);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0,1]; safe as a log() argument.
    double uniform_pos() {
        return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller, second value cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace clqg::rng
