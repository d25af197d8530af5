#pragma once

#include "qtwist/spectral.hpp"

namespace qtwist {

enum class RecursionOrder { left, right };

// L-fold coproduct image of the generators, built recursively from
// Delta(a) = a (x) a - q b* (x) b and Delta(b) = b (x) a + a* (x) b.
struct CoprodRep {
    GenSet gen;
    RecursionOrder order = RecursionOrder::left;
};

CoprodRep corep_generators(const std::vector<TruncSpec>& specs, RecursionOrder order);

// max probe residual between pi_3 built left-first and right-first, over the
// generators a and b (coassociativity).
double coassoc_residual(const TruncSpec& spec, int probes, uint64_t seed);

SpectralElems corep_spectral(const CoprodRep& rep);

}  // namespace qtwist
