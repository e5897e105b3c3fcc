#ifndef OCLREID_RNG_HPP
#define OCLREID_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace oclreid {

// All randomness in the project flows through Rng instances whose seeds are
// derived from one root seed via derive_seed(root, tag).  Distribution
// helpers are hand-rolled so that streams are identical across standard
// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, n).  n > 0.
    std::uint64_t below(std::uint64_t n) {
        // multiply-shift mapping; bias is O(n / 2^64)
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

    // Uniform double in [0, 1).
    double real01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller.
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = real01();
        double u2 = real01();
        while (u1 <= 0.0) u1 = real01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    bool bernoulli(double p) { return real01() < p; }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// FNV-1a over the tag, mixed with the root seed through splitmix64 rounds.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view tag) {
    std::uint64_t h = 14695981039346656037ull;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::uint64_t z = root + 0x9e3779b97f4a7c15ull + h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                                 std::uint64_t index) {
    return derive_seed(derive_seed(root, tag) + index, "idx");
}

} // namespace oclreid

#endif
