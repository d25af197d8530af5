// Acceptance suite: runs the verification criteria end to end and prints one
// pass/fail line per criterion. Usage: acceptance [criterion] [qtwist-path]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qtwist/runner.hpp"
#include "qtwist/twist.hpp"

using namespace qtwist;

namespace {

std::string g_cli_path;

struct Checker {
    bool ok = true;
    int failures = 0;
    std::string detail;
    void require(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        ++failures;
        if (failures <= 4) {
            if (!detail.empty()) detail += "; ";
            detail += what;
        } else if (failures == 5) {
            detail += "; ...";
        }
    }
};

double wall() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v) { return format_g12(v); }

// --- criteria ---------------------------------------------------------------

Checker criterion_relations() {
    Checker c;
    const double t0 = wall();
    for (const double q : {0.3, -0.3, 0.5, -0.5, 0.7, 0.9}) {
        const auto res = relation_residuals(build_generators(TruncSpec::make(q, 8, 3)));
        for (const auto& [name, rr] : res)
            c.require(rr.interior <= 1e-12,
                      name + " interior residual " + fmt(rr.interior) + " at q=" + fmt(q));
    }
    const double dt = wall() - t0;
    c.require(dt < 10.0, "runtime " + fmt(dt) + "s exceeds 10s");
    return c;
}

Checker criterion_haar() {
    Checker c;
    for (const double q : {0.3, -0.3, 0.5, -0.5, 0.7}) {
        int N = 3;
        while (std::pow(q * q, N) > 1e-13) ++N;
        const TruncSpec sp = TruncSpec::make(q, N, 3);
        const GenSet g = build_generators(sp);
        const SpectralElems se = build_spectral_elems(g);
        const StateWeights phi = haar(g);
        const double one = eval_state(phi, LinOp::identity(g.spaces())).real();
        c.require(one == 1.0, "phi(1) = " + fmt(one) + " not exactly 1 at q=" + fmt(q));
        const double p = eval_state(phi, se.p).real();
        c.require(std::abs(p - (1.0 - q * q)) <= 1e-12,
                  "phi(p) = " + fmt(p) + " at q=" + fmt(q));
        const double pp = eval_state(phi, se.p_prime).real();
        c.require(std::abs(pp - q * q * (1.0 - q * q)) <= 1e-12,
                  "phi(p') = " + fmt(pp) + " at q=" + fmt(q));
    }
    return c;
}

double pairing_value(int N) {
    const TruncSpec sp = TruncSpec::make(0.5, N, 3);
    const GenSet g = build_generators(sp);
    const CoprodRep rep = corep_generators({sp, sp}, RecursionOrder::left);
    const StateWeights phi2 = product_state(haar(sp), haar(sp));
    return eval_state(phi2, tensor(g.a, g.a) * rep.gen.a.adjoint()).real();
}

Checker criterion_pairing() {
    Checker c;
    const double v8 = pairing_value(8);
    const double dev8 = std::abs(v8 - 0.64);
    c.require(dev8 <= 1e-6, "|pairing - 0.64| = " + fmt(dev8) + " at N=8");
    const double dev6 = std::abs(pairing_value(6) - 0.64);
    c.require(dev6 >= 5.0 * dev8,
              "refinement factor " + fmt(dev6 / dev8) + " below 5 from N=6 to N=8");
    return c;
}

Checker criterion_3q2() {
    Checker c;
    for (const double q : {0.1, 0.3, 0.5, 0.7}) {
        const Lemma3q2 lm = lemma_3q2(TruncSpec::make(q, 8, 3));
        c.require(lm.value <= 3.0 * q * q,
                  "||(w*-a*)xi|| = " + fmt(lm.value) + " above 3q^2 at q=" + fmt(q));
        c.require(std::abs(lm.value - lm.series_value) <= 1e-10,
                  "series mismatch " + fmt(std::abs(lm.value - lm.series_value)) +
                      " at q=" + fmt(q));
    }
    return c;
}

Checker criterion_cocycle() {
    Checker c;
    const double t0 = wall();
    for (const double q : {0.5, -0.5}) {
        const double r = cocycle_residual(TruncSpec::make(q, 4, 2), 20, 42);
        c.require(r <= 1e-8, "cocycle residual " + fmt(r) + " at q=" + fmt(q));
    }
    const double bad = cocycle_residual(TruncSpec::make(0.5, 4, 2), 20, 42, /*corrupt=*/true);
    c.require(bad > 0.05, "negative control residual " + fmt(bad) + " not above 0.05");
    const double ca = coassoc_residual(TruncSpec::make(0.5, 4, 2), 20, 42);
    c.require(ca <= 1e-10, "coassociativity residual " + fmt(ca));
    const double dt = wall() - t0;
    c.require(dt < 120.0, "runtime " + fmt(dt) + "s exceeds 2 min");
    return c;
}

Checker criterion_guichardet() {
    Checker c;
    const TailTable t = tail_bound_check(QSeq::geometric(0.5, 0.5, 6), 8, 3);
    for (const auto& r : t.rows)
        c.require(r.term <= 11.0 * r.q * r.q + 1e-4,
                  "term " + fmt(r.term) + " above bound at k=" + std::to_string(r.k));
    c.require(t.rows.back().partial_sum <= 11.0 / 3.0,
              "partial sum " + fmt(t.rows.back().partial_sum) + " above 11/3");
    return c;
}

Checker criterion_domination() {
    Checker c;
    for (const double q : {0.3, 0.5}) {
        const TruncSpec sp = TruncSpec::make(q, 8, 3);
        const double worst = weight_domination_check(sp, 100, 42);
        c.require(worst >= -1e-10, "domination minimum " + fmt(worst) + " at q=" + fmt(q));
        const double eq = domination_equality_at_p(sp);
        c.require(eq <= 1e-10, "equality defect at p " + fmt(eq) + " at q=" + fmt(q));
    }
    return c;
}

Checker criterion_gamma() {
    Checker c;
    const GammaResult gr = gamma_slice_bound(TruncSpec::make(0.5, 8, 3));
    c.require(gr.lam_max <= gr.bound + 1e-6,
              "lam_max(gamma) = " + fmt(gr.lam_max) + " above bound " + fmt(gr.bound));
    return c;
}

Checker criterion_invariance() {
    Checker c;
    for (const double q : {0.3, 0.5}) {
        for (const int N : {6, 8}) {
            const CocycleFactor f = coboundary_factor(TruncSpec::make(q, N, 3));
            const double bound = 10.0 * std::pow(q * q, N);
            for (const LegElem x :
                 {LegElem::identity, LegElem::p, LegElem::p_prime, LegElem::wstar_p_w}) {
                for (const Side side : {Side::left, Side::right}) {
                    const InvarianceResult r = invariance_residual(x, f, side);
                    c.require(r.residual <= bound,
                              "residual " + fmt(r.residual) + " above 10*q^2N = " + fmt(bound) +
                                  " (q=" + fmt(q) + ",N=" + std::to_string(N) + ")");
                    if (x != LegElem::identity)
                        c.require(r.residual <= 10.0 * r.baseline,
                                  "twisted/untwisted ratio " + fmt(r.residual / r.baseline) +
                                      " above 10 (q=" + fmt(q) + ",N=" + std::to_string(N) + ")");
                }
            }
        }
    }
    return c;
}

Checker criterion_noncompact() {
    Checker c;
    const QSeq seq = QSeq::geometric(0.5, 0.5, 6);
    double prev = 0.0;
    for (int m = 1; m <= 3; ++m) {
        const TwistedWeight tw = make_twisted_weight(seq, m, 6, 8, 3);
        const double v = phi_omega_value(tw, ProductElement::all(LegElem::identity, m));
        c.require(v == std::pow(4.0, m * (m + 1) / 2),
                  "value(all-1, m=" + std::to_string(m) + ") = " + fmt(v));
        c.require(v > prev, "not strictly increasing at m=" + std::to_string(m));
        prev = v;
    }
    c.require(prev == 4096.0, "value at m=3 is " + fmt(prev) + ", not 4096");

    const TwistedWeight tw = make_twisted_weight(seq, 3, 6, 8, 3);
    for (int n = 0; n <= 6; ++n) {
        const double v = phi_omega_value(tw, ProductElement::s(n, 6));
        double closed = 1.0;
        for (int k = 0; k < 6; ++k) {
            const double q2 = tw.specs[k].q * tw.specs[k].q;
            if (k + 1 <= n)
                closed *= (k < 3) ? 1.0 / q2 : 1.0;
            else
                closed *= (1.0 - q2) / (1.0 - std::pow(q2, tw.specs[k].fock_levels));
        }
        c.require(std::isfinite(v) && std::abs(v - closed) <= 1e-10,
                  "value(s_" + std::to_string(n) + ") = " + fmt(v) + " vs closed form " +
                      fmt(closed));
    }
    const ProductElement id6 = ProductElement::all(LegElem::identity, 6);
    for (int n = 1; n <= 6; ++n) {
        const double d = compression_defect(tw, id6, n);
        c.require(d <= std::pow(4.0, -n) / 3.0,
                  "compression defect " + fmt(d) + " above 4^-n/3 at n=" + std::to_string(n));
    }
    return c;
}

Checker criterion_centralizer() {
    Checker c;
    const TruncSpec sp = TruncSpec::make(0.5, 8, 3);
    const GenSet g = build_generators(sp);
    const SpectralElems se = build_spectral_elems(g);
    const double rp = centralizer_residual(g, se.p, 100, 42);
    c.require(rp <= 1e-10, "|phi(px) - phi(xp)| = " + fmt(rp));

    const TwistedWeight tw = make_twisted_weight(QSeq::geometric(0.5, 0.5, 6), 3, 6, 8, 3);
    ProbeRng rng(derive_seed(42, "acceptance/trace"));
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        ProductElement x;
        for (int k = 0; k < 6; ++k) x.legs.push_back(static_cast<LegElem>(rng.raw() % 4));
        const int n = 1 + static_cast<int>(rng.raw() % 3);
        worst = std::max(worst, phi_omega_commutation(tw, n, x));
    }
    c.require(worst <= 1e-10, "|phi_Omega(s_n x) - phi_Omega(x s_n)| = " + fmt(worst));
    return c;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Checker criterion_determinism() {
    Checker c;
    if (g_cli_path.empty()) {
        c.require(false, "qtwist binary path not provided");
        return c;
    }
    const std::string out1 = "acceptance_run1.csv", out2 = "acceptance_run2.csv";
    const double t0 = wall();
    const int rc1 =
        std::system((g_cli_path + " all --out " + out1 + " > /dev/null 2>&1").c_str());
    const double dt = wall() - t0;
    const int rc2 =
        std::system((g_cli_path + " all --out " + out2 + " > /dev/null 2>&1").c_str());
    c.require(rc1 != -1 && rc2 != -1, "could not launch qtwist");
    const std::string b1 = slurp(out1), b2 = slurp(out2);
    c.require(!b1.empty(), "first run produced no report");
    c.require(b1 == b2, "reports differ between identical runs");
    c.require(dt < 300.0, "full default run took " + fmt(dt) + "s (budget 300s)");
    std::remove(out1.c_str());
    std::remove(out2.c_str());
    return c;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Checker()> run;
};

const std::vector<Criterion> kCriteria = {
    {1, "defining relations", criterion_relations},
    {2, "haar state values", criterion_haar},
    {3, "pairing identity", criterion_pairing},
    {4, "3q^2 lemma", criterion_3q2},
    {5, "cocycle equation", criterion_cocycle},
    {6, "guichardet tail", criterion_guichardet},
    {7, "domination lemma", criterion_domination},
    {8, "gamma slice bound", criterion_gamma},
    {9, "twisted invariance", criterion_invariance},
    {10, "non-compactness witness", criterion_noncompact},
    {11, "centralizer/trace surrogate", criterion_centralizer},
    {12, "determinism and runtime", criterion_determinism},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    if (argc > 2) g_cli_path = argv[2];

    bool all_ok = true;
    for (const auto& crit : kCriteria) {
        if (only != 0 && crit.id != only) continue;
        Checker c;
        try {
            c = crit.run();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2d [%s] %s%s%s\n", crit.id, c.ok ? "PASS" : "FAIL", crit.name,
                    c.detail.empty() ? "" : " -- ", c.detail.c_str());
        std::fflush(stdout);
        all_ok = all_ok && c.ok;
    }
    return all_ok ? 0 : 1;
}
