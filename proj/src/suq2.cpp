#include "qtwist/suq2.hpp"

#include <cmath>
#include <limits>

namespace qtwist {

namespace {
constexpr double kTolFloor = 100.0 * std::numeric_limits<double>::epsilon();
}

std::vector<double> TruncSpec::target_spectrum() const {
    std::vector<double> t(fock_levels);
    for (int n = 0; n < fock_levels; ++n) t[n] = 1.0 - std::pow(q * q, n);
    return t;
}

double TruncSpec::auto_cluster_tol() const {
    const auto t = target_spectrum();
    double gap = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < t.size(); ++i) gap = std::min(gap, t[i + 1] - t[i]);
    return 0.25 * gap;
}

TruncSpec TruncSpec::make(double q, int fock_levels, int winding_radius, double cluster_tol) {
    if (!(std::abs(q) > 0.0) || !(std::abs(q) < 1.0))
        throw std::invalid_argument("TruncSpec: q must satisfy 0 < |q| < 1");
    if (fock_levels < 3) throw std::invalid_argument("TruncSpec: fock_levels >= 3 required");
    if (winding_radius < 1) throw std::invalid_argument("TruncSpec: winding_radius >= 1 required");
    TruncSpec s{q, fock_levels, winding_radius, 0.0};
    s.cluster_tol = (cluster_tol < 0.0) ? s.auto_cluster_tol() : cluster_tol;
    if (!(s.cluster_tol > kTolFloor))
        throw std::invalid_argument(
            "TruncSpec: cluster tolerance below 100*eps; spectral clusters indistinguishable at "
            "this truncation (reduce fock_levels or |q|)");
    return s;
}

int max_valid_fock(double q, int want) {
    for (int N = want; N >= 3; --N) {
        const double gap = std::pow(q * q, N - 1) - std::pow(q * q, N);
        if (0.25 * gap > kTolFloor) return N;
    }
    throw std::invalid_argument("no valid Fock truncation for this q");
}

Spaces GenSet::spaces() const {
    Spaces s;
    for (const auto& sp : specs) s.push_back(sp.space());
    return s;
}

GenSet build_generators(const TruncSpec& spec) {
    const LegSpace leg = spec.space();
    const int N = spec.fock_levels;
    const int W = leg.winding_size();
    const double q = spec.q;
    Mat A = Mat::Zero(leg.dim(), leg.dim());
    Mat B = Mat::Zero(leg.dim(), leg.dim());
    for (int n = 0; n < N; ++n) {
        const double amp = std::sqrt(1.0 - std::pow(q * q, n));
        for (int k = 0; k < W; ++k) {
            if (n >= 1) A(leg.index(n - 1, k), leg.index(n, k)) = amp;  // a xi_{n,k} = sqrt(1-q^2n) xi_{n-1,k}
            B(leg.index(n, k + 1), leg.index(n, k)) = std::pow(q, n);   // b xi_{n,k} = q^n xi_{n,k+1}
        }
    }
    return GenSet{{spec}, LinOp::dense({leg}, std::move(A)), LinOp::dense({leg}, std::move(B))};
}

std::map<std::string, RelationResidual> relation_residuals(const GenSet& g, int probes,
                                                           uint64_t seed) {
    const LinOp &a = g.a, &b = g.b;
    const LinOp I = LinOp::identity(g.spaces());
    const double q = g.specs[0].q;
    for (const auto& s : g.specs)
        if (s.q != g.specs[0].q)
            throw std::invalid_argument("relation_residuals: mixed-q generator sets unsupported");

    const std::vector<std::pair<std::string, LinOp>> rels = {
        {"a*a+b*b=1", a.adjoint() * a + b.adjoint() * b - I},
        {"aa*+q2bb*=1", a * a.adjoint() + (cplx(q * q) * (b * b.adjoint())) - I},
        {"ab=qba", a * b - cplx(q) * (b * a)},
        {"a*b=q^-1ba*", a.adjoint() * b - cplx(1.0 / q) * (b * a.adjoint())},
        {"bb*=b*b", b * b.adjoint() - b.adjoint() * b},
    };

    std::map<std::string, RelationResidual> out;
    const bool dense_ok = total_dim(g.spaces()) <= 600;
    for (const auto& [name, R] : rels) {
        RelationResidual rr;
        if (dense_ok) {
            Mat Rm = R.to_dense();
            rr.whole = operator_norm(Rm);
            // columns supported on the interior (all legs Fock <= N-2)
            Vec mask = Vec::Ones(R.dim());
            ProbeRng::mask_interior(g.spaces(), mask);
            Mat Ri = Rm;
            for (long c = 0; c < Ri.cols(); ++c)
                if (mask[c] == cplx(0.0)) Ri.col(c).setZero();
            rr.interior = operator_norm(Ri);
        } else {
            rr.whole = probe_residual(R, cplx(0.0) * I, probes, seed);
            rr.interior = probe_residual(R, cplx(0.0) * I, probes, seed, /*interior=*/true);
        }
        out[name] = rr;
    }
    return out;
}

StateWeights haar(const TruncSpec& spec) {
    LegWeights lw;
    lw.space = spec.space();
    const int N = spec.fock_levels;
    lw.raw.resize(N);
    const double q2 = spec.q * spec.q;
    double norm = 0.0;
    for (int n = 0; n < N; ++n) {
        lw.raw[n] = (1.0 - q2) * std::pow(q2, n);
        norm += lw.raw[n];
    }
    lw.normalizer = norm;
    StateWeights s;
    s.legs = {lw};
    return s;
}

StateWeights haar(const GenSet& g) {
    if (g.legs() != 1) throw std::invalid_argument("haar: one-leg generator set required");
    return haar(g.specs[0]);
}

double gns_norm_sq(const GenSet& g, const LinOp& y) {
    if (g.legs() != 1) throw std::invalid_argument("gns_norm_sq: one-leg generator set required");
    return eval_state(haar(g), y.adjoint() * y).real();
}

LinOp random_word_element(const GenSet& g, ProbeRng& rng, int max_len, int terms) {
    const LinOp letters[4] = {g.a, g.a.adjoint(), g.b, g.b.adjoint()};
    const LinOp I = LinOp::identity(g.spaces());
    LinOp x = cplx(0.0) * I;
    for (int t = 0; t < terms; ++t) {
        const int len = static_cast<int>(rng.raw() % static_cast<uint64_t>(max_len + 1));
        LinOp w = I;
        for (int j = 0; j < len; ++j) w = w * letters[rng.raw() % 4];
        x = x + rng.cgaussian() * w;
    }
    return x;
}

double centralizer_residual(const GenSet& g, const LinOp& s, int samples, uint64_t seed) {
    if (g.legs() != 1)
        throw std::invalid_argument("centralizer_residual: one-leg generator set required");
    const StateWeights phi = haar(g);
    ProbeRng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const LinOp x = random_word_element(g, rng);
        worst = std::max(worst, std::abs(eval_state(phi, s * x) - eval_state(phi, x * s)));
    }
    return worst;
}

}  // namespace qtwist
