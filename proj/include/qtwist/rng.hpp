#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "qtwist/spaces.hpp"

namespace qtwist {

// Deterministic probe generator. mt19937_64 output is pinned by the standard,
// and the uniform/gaussian extraction below avoids the library-defined
// distributions, so identical seeds give bitwise-identical probes everywhere.
class ProbeRng {
  public:
    explicit ProbeRng(uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0,1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    cplx cgaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    // Unit Gaussian probe vector; optionally supported only on the interior
    // Fock range (all legs at level <= N-2).
    Vec unit_probe(const Spaces& legs, bool interior = false) {
        const long dim = total_dim(legs);
        Vec v(dim);
        for (long i = 0; i < dim; ++i) v[i] = cgaussian();
        if (interior) mask_interior(legs, v);
        const double n = v.norm();
        if (n > 0) v /= n;
        return v;
    }

    static void mask_interior(const Spaces& legs, Vec& v) {
        const long dim = v.size();
        for (long i = 0; i < dim; ++i) {
            long rem = i;
            bool boundary = false;
            for (int l = static_cast<int>(legs.size()) - 1; l >= 0; --l) {
                const long d = legs[l].dim();
                const long in_leg = rem % d;
                rem /= d;
                const int n = static_cast<int>(in_leg) / legs[l].winding_size();
                if (n >= legs[l].fock_levels - 1) boundary = true;
            }
            if (boundary) v[i] = 0.0;
        }
    }

    uint64_t raw() { return eng_(); }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stable per-task seed derivation (FNV-1a over the label, mixed with the base
// seed) so concurrent check rows draw independent, schedule-free streams.
inline uint64_t derive_seed(uint64_t base, std::string_view label) {
    uint64_t h = 1469598103934665603ull;
    for (const char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    h ^= base + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h ? h : 1;
}

}  // namespace qtwist
