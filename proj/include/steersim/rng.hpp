#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace steersim {

// SplitMix64. Small, fast and fully specified, so generated corpora are
// reproducible across compilers and standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t uniform_int(uint64_t n) { return next_u64() % n; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    // Correlated standard normal pair with Pearson correlation rho.
    void normal_pair(double rho, double& a, double& b) {
        double z0 = normal();
        double z1 = normal();
        a = z0;
        b = rho * z0 + std::sqrt(1.0 - rho * rho) * z1;
    }

    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

    double exponential(double mean) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return -mean * std::log(u);
    }

    double pareto(double xm, double alpha) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return xm / std::pow(u, 1.0 / alpha);
    }

    // Derive an independent substream for (this seed, tag, index).
    Rng derive(std::string_view tag, uint64_t index = 0) const {
        uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : tag) {
            h ^= static_cast<uint8_t>(c);
            h *= 0x100000001b3ULL;
        }
        Rng r(state_ ^ h);
        r.state_ += 0x9e3779b97f4a7c15ULL * (index + 1);
        r.next_u64();
        return r;
    }

    uint64_t state() const { return state_; }

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace steersim
