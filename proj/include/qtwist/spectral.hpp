#pragma once

#include "qtwist/suq2.hpp"

namespace qtwist {

struct ClusterInfo {
    int index = 0;        // target 1 - q^{2 index}
    double target = 0.0;
    long count = 0;
    double max_dev = 0.0;
    double phi_weight = 0.0;  // weight of the full cluster projector under the product Haar state
};

struct ClusterReport {
    std::vector<ClusterInfo> clusters;
    long unassigned_count = 0;
    double unassigned_weight = 0.0;
    bool fast_path = false;
};

// Orthogonal projector onto the eigencluster of hermitian X at `target`.
// Fast path: Lagrange interpolation through the known target ladder, accepted
// only if idempotency/hermiticity probes pass; otherwise eigendecomposition
// (winding-sector blocked when possible, dense below the dimension budget).
LinOp spectral_projector(const LinOp& X, double target, double tol,
                         const std::vector<double>& ladder, uint64_t seed = 42);
LinOp spectral_projector(const TruncSpec& spec, const LinOp& X, double target);

// Matrix units, p, p', w of a (possibly multi-leg) representation, built by
// spectral calculus of a*a. At one leg every e_{nn} and the literal
// w = e01+e12+e20+(1 - e00-e11-e22) are exact. At L >= 2 the truncated
// clusters have unequal multiplicities, so the moved part of w lives on a
// rank-matched isometry chain anchored in cluster 2 (exactly unitary, exact
// matrix-unit algebra); the full cluster projectors are kept alongside for
// state and slice identities.
class SpectralElems {
  public:
    std::vector<TruncSpec> specs;
    LinOp p, p_prime, w;               // chain representatives (exact algebra)
    std::vector<LinOp> diagonal;       // 1-leg: all e_nn; L>=2: chain e00,e11,e22
    ClusterReport report;

    int legs() const { return static_cast<int>(specs.size()); }
    LinOp e(int m, int n) const;       // 1-leg: m,n < N; L>=2: m,n <= 2
    LinOp cluster(int j) const;        // full spectral projector, j <= 2 (any j at 1 leg)

    // internal storage, exposed for the builder
    struct Storage;
    std::shared_ptr<const Storage> store;
};

SpectralElems build_spectral_elems(const GenSet& g);

}  // namespace qtwist
