#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace msd {

/// splitmix64 finalizer. Used to derive independent stream seeds from a
/// master seed plus integer indices, so parallel replicates are
/// order-independent.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Combines a seed with a stream index: mix_seed(mix_seed(master, a), b)
/// gives the stream for component (a, b).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL + index * 0xff51afd7ed558ccdULL));
}

/// Seedable random stream. Wraps mt19937_64 but draws uniforms through
/// fixed bit manipulation instead of std distributions, which are
/// implementation-defined; identical seeds give identical draws on every
/// platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). Rejection sampling, unbiased.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound; // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Fisher-Yates shuffle driven by uniform_below.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct elements sampled uniformly from v, order of selection.
    template <typename T>
    std::vector<T> sample_without_replacement(std::vector<T> v, std::size_t k) {
        std::vector<T> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_below(v.size() - i));
            std::swap(v[i], v[j]);
            out.push_back(v[i]);
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace msd
