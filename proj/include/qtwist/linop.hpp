#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qtwist/spaces.hpp"

namespace qtwist {

namespace detail {
class Node;
}

// Immutable complex linear operator on a tensor product of truncated leg
// spaces. Either a dense matrix or a matrix-free composite (product, tensor,
// adjoint, linear combination, winding-sector block-diagonal). apply() is
// pure; values are safe to share across threads.
class LinOp {
  public:
    LinOp() = default;

    static LinOp identity(Spaces legs);
    static LinOp dense(Spaces legs, Mat m);
    // Per-winding-sector dense blocks, indexed by the flattened sector
    // multi-index (leg-major); each block is (prod N_l) x (prod N_l).
    static LinOp sector_blocked(Spaces legs, std::vector<Mat> blocks);

    bool valid() const { return static_cast<bool>(node_); }
    const Spaces& legs() const;
    long dim() const { return total_dim(legs()); }

    LinOp adjoint() const;
    LinOp operator*(const LinOp& rhs) const;  // composition
    LinOp operator+(const LinOp& rhs) const;
    LinOp operator-(const LinOp& rhs) const;
    friend LinOp operator*(cplx c, const LinOp& op);

    Vec apply(const Vec& v) const;
    Mat apply_many(const Mat& columns) const;  // column-wise apply, batched where possible

    // Dense materialisation; refuses above the dimension budget.
    static constexpr long kDenseLimit = 5000;
    Mat to_dense() const;

    // Restriction to one winding sector (requires a winding-invariant
    // composite built from one-leg leaves / sector-blocked nodes).
    Mat sector_block(const std::vector<int>& sector) const;
    bool sector_decomposable() const;

    std::string kind() const;

  private:
    explicit LinOp(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const detail::Node> node_;
    friend LinOp tensor(const LinOp&, const LinOp&);
    friend class detail::Node;
};

LinOp tensor(const LinOp& a, const LinOp& b);

// Collapses a winding-invariant multi-leg composite into a single
// sector-blocked operator (cheap applies); returns the input unchanged when
// it does not decompose.
LinOp compact_sector(const LinOp& op);

// max_v ||T v - S v|| over `probes` seeded unit Gaussian probes; deterministic
// reduction in probe order. interior restricts probe support to Fock <= N-2.
double probe_residual(const LinOp& T, const LinOp& S, int probes, uint64_t seed,
                      bool interior = false);

// Probe check that T commutes with every per-leg winding rotation.
bool winding_invariant(const LinOp& T, int probes, uint64_t seed, double tol = 1e-10);

// Cyclic winding rotation on one leg, as a dense one-leg operator.
LinOp winding_rotation(const LegSpace& leg);

// Largest singular value of a dense materialisation (dim-limited).
double operator_norm(const LinOp& T);
double operator_norm(const Mat& m);

}  // namespace qtwist
