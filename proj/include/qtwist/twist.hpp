#pragma once

#include "qtwist/cocycle.hpp"

namespace qtwist {

// Per-leg choice inside a finite product element of the infinite tensor
// product (the only elements phi_Omega is evaluated on).
enum class LegElem { identity, p, p_prime, wstar_p_w };

struct ProductElement {
    std::vector<LegElem> legs;

    // s_n = 1 (x) ((x)_{k>n} p_k), materialised up to F factors
    static ProductElement s(int n, int factors);
    static ProductElement all(LegElem e, int factors);
};

// phi_Omega at finite level: twisted factor functionals psi_k = q_k^{-2}
// phi_k(w_k^* . w_k) for k <= m, plain phi_k for m < k <= F.
struct TwistedWeight {
    QSeq seq;
    int level_m = 0;
    int factors_F = 0;
    std::vector<TruncSpec> specs;           // per factor (Fock downshifted for small q)
    std::vector<SpectralElems> leg_elems;   // one-leg spectral elements per factor
    std::vector<StateWeights> psi;          // twisted functionals (k <= m materialised for all k)
    std::vector<StateWeights> phi;          // plain Haar per factor
};

TwistedWeight make_twisted_weight(const QSeq& seq, int level_m, int factors_F, int fock_levels,
                                  int winding_radius);

// Per-leg operator for a descriptor on factor k.
LinOp leg_operator(const TwistedWeight& tw, int k, LegElem e);

// Value prod_{k<=m} psi_k(x_k) * prod_{m<k<=F} phi_k(x_k).
double phi_omega_value(const TwistedWeight& tw, const ProductElement& x);

// |phi_Omega-level(s_n x) - phi_Omega-level(x s_n)| for the trace surrogate.
double phi_omega_commutation(const TwistedWeight& tw, int n, const ProductElement& x);

// Squared GNS distance (product Haar state) between E_n(x) = s_n x s_n and x.
double compression_defect(const TwistedWeight& tw, const ProductElement& x, int n);

// Omega Delta(x) Omega^* for a registered element.
LinOp twisted_coproduct(LegElem x, const CocycleFactor& factor);
// Identifies x against the registered one-leg elements; anything else has no
// coproduct rule and raises.
LinOp twisted_coproduct(const LinOp& x, const CocycleFactor& factor);

// min over random positive x = y*y of Re[q^{-2} phi(w* x w) - phi(x)].
double weight_domination_check(const TruncSpec& spec, int samples, uint64_t seed);
// the equality case: |q^{-2} phi(w* p w) - phi(p)|
double domination_equality_at_p(const TruncSpec& spec);

enum class Side { left, right };

struct InvarianceResult {
    double residual = 0.0;   // twisted: ||slice(Delta_Omega(x), psi) - psi(x) 1||
    double baseline = 0.0;   // untwisted: ||slice(Delta(x), phi) - phi(x) 1||
};

InvarianceResult invariance_residual(LegElem x, const CocycleFactor& factor, Side side);

struct GammaResult {
    double lam_max = 0.0;
    double lam_min = 0.0;
    double bound = 0.0;   // q^{-2} phi(p')
    double defect = 0.0;  // max(0, lam_max - bound)
    double two_route_diff = 0.0;  // |phi(gamma) - (phi x phi)(conjugated element)|
};

GammaResult gamma_slice_bound(const TruncSpec& spec);

}  // namespace qtwist
