#pragma once

#include <map>
#include <string>

#include "qtwist/rng.hpp"
#include "qtwist/state.hpp"

namespace qtwist {

// Truncation parameters for one SU_q(2) leg.
struct TruncSpec {
    double q = 0.5;
    int fock_levels = 8;
    int winding_radius = 3;
    double cluster_tol = 0.0;  // resolved (auto or user)

    static TruncSpec make(double q, int fock_levels, int winding_radius,
                          double cluster_tol = -1.0);  // <0 means "auto"

    LegSpace space() const { return {fock_levels, winding_radius}; }
    // {1 - q^{2n} : n < N}
    std::vector<double> target_spectrum() const;
    double auto_cluster_tol() const;
};

// Largest N <= want with a constructible TruncSpec (auto cluster_tol above
// the 100*eps floor); used to downshift small-|q| factors.
int max_valid_fock(double q, int want);

struct GenSet {
    std::vector<TruncSpec> specs;
    LinOp a, b;
    int legs() const { return static_cast<int>(specs.size()); }
    Spaces spaces() const;
};

GenSet build_generators(const TruncSpec& spec);

struct RelationResidual {
    double interior = 0.0;
    double whole = 0.0;
};

// Residuals of the five defining relations, on the interior Fock subspace and
// on the whole truncated space. Dense norms at one leg; probe-based above.
std::map<std::string, RelationResidual> relation_residuals(const GenSet& g, int probes = 20,
                                                           uint64_t seed = 42);

// Normalised invariant-state weights rho_n = (1-q^2) q^{2n} / (1-q^{2N}).
StateWeights haar(const GenSet& g);
StateWeights haar(const TruncSpec& spec);

// ||y xi||^2 = Re phi(y* y), computed without materialising a GNS space.
double gns_norm_sq(const GenSet& g, const LinOp& y);

// max over random polynomial elements x of |phi(s x) - phi(x s)|.
double centralizer_residual(const GenSet& g, const LinOp& s, int samples, uint64_t seed);

// Random polynomial in a, a*, b, b* (words of length <= max_len, a few terms
// with complex Gaussian coefficients). Shared by centralizer and positivity
// sampling.
LinOp random_word_element(const GenSet& g, ProbeRng& rng, int max_len = 4, int terms = 3);

}  // namespace qtwist
