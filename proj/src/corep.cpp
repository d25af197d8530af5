#include "qtwist/corep.hpp"

namespace qtwist {

CoprodRep corep_generators(const std::vector<TruncSpec>& specs, RecursionOrder order) {
    if (specs.empty()) throw std::invalid_argument("corep_generators: at least one leg required");
    for (const auto& s : specs)
        if (s.q != specs[0].q)
            throw std::invalid_argument(
                "corep_generators: iterated coproducts require a single q (mixed-q products are "
                "leg-wise tensors, not coproducts)");
    const double q = specs[0].q;

    GenSet acc = build_generators(order == RecursionOrder::left ? specs.front() : specs.back());
    if (order == RecursionOrder::left) {
        for (size_t l = 1; l < specs.size(); ++l) {
            const GenSet leg = build_generators(specs[l]);
            LinOp a2 = tensor(acc.a, leg.a) - cplx(q) * tensor(acc.b.adjoint(), leg.b);
            LinOp b2 = tensor(acc.b, leg.a) + tensor(acc.a.adjoint(), leg.b);
            acc.a = std::move(a2);
            acc.b = std::move(b2);
            acc.specs.push_back(specs[l]);
        }
    } else {
        for (size_t i = 1; i < specs.size(); ++i) {
            const size_t l = specs.size() - 1 - i;
            const GenSet leg = build_generators(specs[l]);
            LinOp a2 = tensor(leg.a, acc.a) - cplx(q) * tensor(leg.b.adjoint(), acc.b);
            LinOp b2 = tensor(leg.b, acc.a) + tensor(leg.a.adjoint(), acc.b);
            acc.a = std::move(a2);
            acc.b = std::move(b2);
            acc.specs.insert(acc.specs.begin(), specs[l]);
        }
    }
    return CoprodRep{std::move(acc), order};
}

double coassoc_residual(const TruncSpec& spec, int probes, uint64_t seed) {
    const std::vector<TruncSpec> three(3, spec);
    const CoprodRep L = corep_generators(three, RecursionOrder::left);
    const CoprodRep R = corep_generators(three, RecursionOrder::right);
    const double ra = probe_residual(L.gen.a, R.gen.a, probes, seed);
    const double rb = probe_residual(L.gen.b, R.gen.b, probes, derive_seed(seed, "b"));
    return std::max(ra, rb);
}

SpectralElems corep_spectral(const CoprodRep& rep) { return build_spectral_elems(rep.gen); }

}  // namespace qtwist
