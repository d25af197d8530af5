#pragma once

#include "qtwist/corep.hpp"

namespace qtwist {

// The q-sequence of the infinite tensor product, with its square-summability
// certificate.
struct QSeq {
    enum class Kind { geometric, explicit_list };
    Kind kind = Kind::geometric;
    double base = 0.5, ratio = 0.5;  // geometric: q_k = base * ratio^{k-1}
    std::vector<double> terms;       // materialised factors

    static QSeq geometric(double base, double ratio, int length);
    static QSeq explicit_list(std::vector<double> terms);

    struct Summability {
        double partial_sum_sq = 0.0;    // sum of q_k^2 over the materialised terms
        double tail_estimate = 0.0;     // geometric tail bound past the last term
        double max_ratio = 0.0;         // max |q_{k+1}/q_k|
        bool certified = false;         // decay evidence for the infinite intent
    };
    Summability summability() const;
};

// One coboundary factor Omega_k = (w (x) w) Delta(w)^* on H_k (x) H_k.
struct CocycleFactor {
    TruncSpec spec;
    SpectralElems one_leg;   // w, p, p' of the leg
    SpectralElems two_leg;   // Delta of the spectral elements
    LinOp omega;
    double unitarity_defect = 0.0;
    StateWeights phi;        // one-leg Haar state

    StateWeights phi2() const { return product_state(phi, phi); }
};

CocycleFactor coboundary_factor(const TruncSpec& spec);

// |1 - (phi (x) phi)(Omega_k)| — the Guichardet convergence term.
double guichardet_term(const CocycleFactor& f);
double guichardet_term(const TruncSpec& spec);

// Probe residual of (Omega (x) 1)(Delta (x) i)(Omega) = (1 (x) Omega)(i (x) Delta)(Omega),
// with the two 3-leg coproducts built through independent recursion orders.
// corrupt replaces Delta(w*) by Delta(w) in the coboundary (negative control).
double cocycle_residual(const TruncSpec& spec, int probes, uint64_t seed, bool corrupt = false);

struct TailRow {
    int k = 0;
    double q = 0.0;
    int fock_used = 0;    // per-factor downshifted truncation
    double term = 0.0;    // guichardet term
    double bound = 0.0;   // 11 q_k^2, combined per-term bound (2q^2 + 3*3q^2)
    double partial_sum = 0.0;
    bool pass = false;
};

struct TailTable {
    std::vector<TailRow> rows;
    double partial_sum_bound = 0.0;  // 11 * (sum q_k^2 + tail estimate)
    QSeq::Summability summability;
    double slack = 1e-4;             // truncation slack added to each per-term bound
};

TailTable tail_bound_check(const QSeq& seq, int fock_levels, int winding_radius);

struct Lemma3q2 {
    double value = 0.0;         // sqrt(phi((w-a)(w-a)*)) through the operator route
    double bound = 0.0;         // 3 q^2
    double series_value = 0.0;  // independent diagonal-series oracle, same truncation
};

Lemma3q2 lemma_3q2(const TruncSpec& spec);

// Truncation-faithful diagonal series for phi((w-a)(w*-a*)): terms
// (1-sqrt(1-q^2))^2, q^2 (1-sqrt(1-q^4))^2, q^{2n}(2-q^{2n+2}) for 2<=n<=N-2,
// and q^{2(N-1)} * 1 at the cut, over the renormalised weights.
double lemma_3q2_series(double q, int fock_levels);

struct ProductConvergence {
    std::vector<double> partial_products;  // prod_{k<=m} (1-q_k^2), m = 1..length
    double tail_defect = 0.0;              // 1 - prod_{k=n+1}^{F} (1-q_k^2)
    double tail_defect_bound = 0.0;        // sum_{k>n} q_k^2
    double gns_distance_sq = 0.0;          // GNS route through eval_state, equals tail_defect
};

ProductConvergence product_convergence(const QSeq& seq, int n, int fock_levels, int winding_radius);

}  // namespace qtwist
