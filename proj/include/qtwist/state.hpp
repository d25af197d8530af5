#pragma once

#include <optional>

#include "qtwist/linop.hpp"

namespace qtwist {

// One leg of a product Haar-type functional: diagonal weights attached to the
// basis vectors xi_{n,0}, an optional unitary conjugator u (the functional
// then reads x -> sum_n rho_n <x u xi_{n,0}, u xi_{n,0}>), and the weight sum
// kept separate so the normalised value divides once at the end (phi(1) = 1
// bit-exactly).
struct LegWeights {
    LegSpace space;
    Eigen::VectorXd raw;  // (1-q^2) q^{2n}, unnormalised
    double normalizer = 1.0;
    std::optional<LinOp> conjugator;

    // u xi_{n,0} (or xi_{n,0} when no conjugator)
    Vec eval_vector(int n) const;
};

struct StateWeights {
    std::vector<LegWeights> legs;
    double prefactor = 1.0;

    Spaces spaces() const {
        Spaces s;
        for (const auto& l : legs) s.push_back(l.space);
        return s;
    }
    double normalizer() const {
        double v = 1.0;
        for (const auto& l : legs) v *= l.normalizer;
        return v;
    }
};

// Product of two functionals (phi tensor phi etc.); prefactors multiply.
StateWeights product_state(const StateWeights& a, const StateWeights& b);

// prefactor * sum over Fock multi-indices of (prod weights) * <T v, v> / norm.
cplx eval_state(const StateWeights& omega, const LinOp& T);

// Slice over the trailing legs of T: the returned operator on the leading
// legs has matrix elements sum_n w_n <T(e_i (x) u xi_{n,0}), e_j (x) u xi_{n,0}>.
LinOp slice_right(const LinOp& T, const StateWeights& omega);
LinOp slice_left(const LinOp& T, const StateWeights& omega);

}  // namespace qtwist
