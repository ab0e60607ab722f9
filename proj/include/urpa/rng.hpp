#pragma once
// Counter-based random streams (SplittableRandom / splitmix64 family).
//
// Every stochastic operation in the project draws from a stream derived
// from (seed, tag words...). Streams are cheap to construct, independent
// of thread scheduling, and fully determined by their key, which is what
// makes every pipeline reproducible bit-for-bit regardless of the worker
// count. All variate transforms are hand-rolled so the sampled sequences
// do not depend on standard-library distribution internals.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace urpa {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : state_(splitmix64(seed ^ 0x5851f42d4c957f2dull)) {}

    // Folds the key words into a single stream state. Two keys differing in
    // any word yield unrelated streams.
    static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> words) {
        std::uint64_t s = splitmix64(seed);
        for (std::uint64_t w : words) s = splitmix64(s ^ (w + 0x9e3779b97f4a7c15ull));
        RngStream r(0);
        r.state_ = s;
        r.cached_normal_valid_ = false;
        return r;
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased-enough index in [0, n): fixed-point multiply keeps it exact
    // and branch-free (n is tiny compared to 2^64 everywhere we use it).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (cached_normal_valid_) {
            cached_normal_valid_ = false;
            return cached_normal_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_normal_ = r * std::sin(a);
        cached_normal_valid_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Marsaglia-Tsang for shape >= 1, boosted by u^(1/shape) below 1.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be > 0");
        if (shape < 1.0) {
            double u = 0.0;
            do {
                u = uniform();
            } while (u <= 0.0);
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = 0.0;
            double v = 0.0;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        const double ga = gamma(a);
        const double gb = gamma(b);
        return ga / (ga + gb);
    }

    // Fisher-Yates permutation of {0, ..., n-1}.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = index(i);
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

  private:
    std::uint64_t state_;
    double cached_normal_ = 0.0;
    bool cached_normal_valid_ = false;
};

}  // namespace urpa
