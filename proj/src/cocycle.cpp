#include "qtwist/cocycle.hpp"

#include <cmath>

namespace qtwist {

QSeq QSeq::geometric(double base, double ratio, int length) {
    if (length < 1) throw std::invalid_argument("QSeq: length >= 1 required");
    QSeq s;
    s.kind = Kind::geometric;
    s.base = base;
    s.ratio = ratio;
    for (int k = 0; k < length; ++k) {
        const double q = base * std::pow(ratio, k);
        if (!(std::abs(q) > 0.0 && std::abs(q) < 1.0))
            throw std::invalid_argument("QSeq: every term must satisfy 0 < |q_k| < 1");
        s.terms.push_back(q);
    }
    return s;
}

QSeq QSeq::explicit_list(std::vector<double> terms) {
    if (terms.empty()) throw std::invalid_argument("QSeq: empty term list");
    for (const double q : terms)
        if (!(std::abs(q) > 0.0 && std::abs(q) < 1.0))
            throw std::invalid_argument("QSeq: every term must satisfy 0 < |q_k| < 1");
    QSeq s;
    s.kind = Kind::explicit_list;
    s.terms = std::move(terms);
    return s;
}

QSeq::Summability QSeq::summability() const {
    Summability out;
    for (const double q : terms) out.partial_sum_sq += q * q;
    out.max_ratio = 0.0;
    for (size_t k = 0; k + 1 < terms.size(); ++k)
        out.max_ratio = std::max(out.max_ratio, std::abs(terms[k + 1] / terms[k]));
    if (kind == Kind::geometric) {
        out.max_ratio = std::abs(ratio);
    }
    const double r2 = out.max_ratio * out.max_ratio;
    if (out.max_ratio < 1.0 && !terms.empty()) {
        const double last = terms.back() * terms.back();
        out.tail_estimate = last * r2 / (1.0 - r2);
        out.certified = true;
    } else {
        out.tail_estimate = std::numeric_limits<double>::infinity();
        out.certified = false;  // no decay evidence; certificate refused
    }
    return out;
}

CocycleFactor coboundary_factor(const TruncSpec& spec) {
    CocycleFactor f{spec,
                    build_spectral_elems(build_generators(spec)),
                    corep_spectral(corep_generators({spec, spec}, RecursionOrder::left)),
                    LinOp(),
                    0.0,
                    haar(spec)};
    f.omega = tensor(f.one_leg.w, f.one_leg.w) * f.two_leg.w.adjoint();
    const LinOp I2 = LinOp::identity(f.omega.legs());
    f.unitarity_defect =
        std::max(probe_residual(f.omega.adjoint() * f.omega, I2, 8, 42),
                 probe_residual(f.omega * f.omega.adjoint(), I2, 8, 43));
    return f;
}

double guichardet_term(const CocycleFactor& f) {
    return std::abs(1.0 - eval_state(f.phi2(), f.omega));
}

double guichardet_term(const TruncSpec& spec) { return guichardet_term(coboundary_factor(spec)); }

double cocycle_residual(const TruncSpec& spec, int probes, uint64_t seed, bool corrupt) {
    const CocycleFactor f = coboundary_factor(spec);
    const LinOp omega = corrupt ? tensor(f.one_leg.w, f.one_leg.w) * f.two_leg.w : f.omega;
    const std::vector<TruncSpec> three(3, spec);
    const SpectralElems se3L = corep_spectral(corep_generators(three, RecursionOrder::left));
    const SpectralElems se3R = corep_spectral(corep_generators(three, RecursionOrder::right));
    const LinOp I1 = LinOp::identity({spec.space()});
    const LinOp& w1 = f.one_leg.w;
    const LinOp& w2 = f.two_leg.w;
    // (Delta (x) i)(Omega) = (Delta(w) (x) w) * Delta^2(w)^*, factor-wise (the
    // coboundary is given in factored form, so Delta distributes).
    const LinOp lhs = tensor(omega, I1) * tensor(w2, w1) * se3L.w.adjoint();
    const LinOp rhs = tensor(I1, omega) * tensor(w1, w2) * se3R.w.adjoint();
    return probe_residual(lhs, rhs, probes, seed);
}

double lemma_3q2_series(double q, int N) {
    const double q2 = q * q;
    std::vector<double> rho(N);
    double norm = 0.0;
    for (int n = 0; n < N; ++n) {
        rho[n] = (1.0 - q2) * std::pow(q2, n);
        norm += rho[n];
    }
    double acc = rho[0] * std::pow(1.0 - std::sqrt(1.0 - q2), 2);
    acc += rho[1] * std::pow(1.0 - std::sqrt(1.0 - q2 * q2), 2);
    for (int n = 2; n <= N - 2; ++n) acc += rho[n] * (2.0 - std::pow(q2, n + 1));
    acc += rho[N - 1] * 1.0;  // a* is cut above the top level, so w-a leaves norm 1 there
    return acc / norm;
}

Lemma3q2 lemma_3q2(const TruncSpec& spec) {
    const GenSet g = build_generators(spec);
    const SpectralElems se = build_spectral_elems(g);
    Lemma3q2 out;
    out.value = std::sqrt(gns_norm_sq(g, (se.w - g.a).adjoint()));
    out.bound = 3.0 * spec.q * spec.q;
    out.series_value = std::sqrt(lemma_3q2_series(spec.q, spec.fock_levels));
    return out;
}

TailTable tail_bound_check(const QSeq& seq, int fock_levels, int winding_radius) {
    TailTable table;
    table.summability = seq.summability();
    double sum = 0.0;
    for (size_t k = 0; k < seq.terms.size(); ++k) {
        const double q = seq.terms[k];
        TailRow row;
        row.k = static_cast<int>(k) + 1;
        row.q = q;
        row.fock_used = max_valid_fock(q, fock_levels);
        const TruncSpec sp = TruncSpec::make(q, row.fock_used, winding_radius);
        row.term = guichardet_term(sp);
        row.bound = 11.0 * q * q;
        row.pass = row.term <= row.bound + table.slack;
        sum += row.term;
        row.partial_sum = sum;
        table.rows.push_back(row);
    }
    table.partial_sum_bound =
        11.0 * (table.summability.partial_sum_sq + (table.summability.certified
                                                        ? table.summability.tail_estimate
                                                        : 0.0));
    return table;
}

ProductConvergence product_convergence(const QSeq& seq, int n, int fock_levels,
                                       int winding_radius) {
    if (n < 0 || n >= static_cast<int>(seq.terms.size()))
        throw std::invalid_argument("product_convergence: n must be < sequence length");
    ProductConvergence out;
    double prod = 1.0;
    for (const double q : seq.terms) {
        prod *= (1.0 - q * q);
        out.partial_products.push_back(prod);
    }
    double tail = 1.0, bound = 0.0;
    for (size_t k = n; k < seq.terms.size(); ++k) {
        tail *= (1.0 - seq.terms[k] * seq.terms[k]);
        bound += seq.terms[k] * seq.terms[k];
    }
    out.tail_defect = 1.0 - tail;
    out.tail_defect_bound = bound;
    // GNS route: || (x)_{k>n} p_k xi - xi ||^2 through eval_state, leg-wise
    double gns = 1.0;
    for (size_t k = n; k < seq.terms.size(); ++k) {
        const TruncSpec sp =
            TruncSpec::make(seq.terms[k], max_valid_fock(seq.terms[k], fock_levels), winding_radius);
        const SpectralElems se = build_spectral_elems(build_generators(sp));
        gns *= eval_state(haar(sp), se.p).real();
    }
    out.gns_distance_sq = 1.0 - gns;
    return out;
}

}  // namespace qtwist
