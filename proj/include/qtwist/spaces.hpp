#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qtwist {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// One truncated leg: Fock levels n in {0,..,N-1} (hard cut) and a cyclic
// winding index k in Z_{2K+1}. Flat layout is Fock-major: idx = n*(2K+1) + k.
struct LegSpace {
    int fock_levels = 0;
    int winding_radius = 0;

    int winding_size() const { return 2 * winding_radius + 1; }
    int dim() const { return fock_levels * winding_size(); }

    int index(int n, int k) const {
        const int w = winding_size();
        int kk = k % w;
        if (kk < 0) kk += w;
        return n * w + kk;
    }

    bool operator==(const LegSpace&) const = default;
};

using Spaces = std::vector<LegSpace>;

inline long total_dim(const Spaces& legs) {
    long d = 1;
    for (const auto& l : legs) d *= l.dim();
    return d;
}

inline bool same_spaces(const Spaces& a, const Spaces& b) { return a == b; }

// Mixed-radix walker over per-leg Fock levels (used by state evaluation).
struct FockMultiIndex {
    std::vector<int> radix;
    std::vector<int> idx;
    bool done = false;

    explicit FockMultiIndex(const Spaces& legs) {
        for (const auto& l : legs) radix.push_back(l.fock_levels);
        idx.assign(radix.size(), 0);
        done = radix.empty();
    }
    void next() {
        for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
            if (++idx[i] < radix[i]) return;
            idx[i] = 0;
        }
        done = true;
    }
};

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qtwist
