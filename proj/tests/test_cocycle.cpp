#include <doctest.h>

#include "oracles.hpp"
#include "qtwist/cocycle.hpp"

using namespace qtwist;

TEST_CASE("q sequence construction and certificates") {
    const QSeq geo = QSeq::geometric(0.5, 0.5, 6);
    REQUIRE(geo.terms.size() == 6);
    for (int k = 0; k < 6; ++k) CHECK(geo.terms[k] == std::pow(2.0, -(k + 1)));
    const auto s = geo.summability();
    CHECK(s.certified);
    CHECK(s.partial_sum_sq == doctest::Approx((1.0 / 3.0) * (1.0 - std::pow(4.0, -6))));

    const QSeq flat = QSeq::explicit_list(std::vector<double>(6, 0.5));
    CHECK_FALSE(flat.summability().certified);
    CHECK(flat.summability().partial_sum_sq == doctest::Approx(6 * 0.25));

    CHECK_THROWS_AS((void)QSeq::explicit_list({0.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)QSeq::explicit_list({0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("coboundary factors are unitary") {
    for (const double q : {0.1, 0.3, 0.5, -0.5}) {
        for (const int N : {4, 5, 6}) {
            const CocycleFactor f = coboundary_factor(TruncSpec::make(q, N, 2));
            INFO("q=", q, " N=", N);
            CHECK(f.unitarity_defect <= 1e-9);
        }
    }
}

TEST_CASE("state value of the coboundary, two evaluation routes") {
    const TruncSpec sp = TruncSpec::make(0.5, 6, 2);
    const CocycleFactor f = coboundary_factor(sp);
    const cplx direct = eval_state(f.phi2(), f.omega);
    // GNS pairing route: (phi x phi)((w x w) Delta(w*)) =
    // sum rho_n rho_m <Delta(w*) v_nm, (w* x w*) v_nm>
    const auto rho = oracle::haar_weights(sp.q, sp.fock_levels);
    const LegSpace leg = sp.space();
    const LinOp dws = f.two_leg.w.adjoint();
    const LinOp wsws = tensor(f.one_leg.w, f.one_leg.w).adjoint();
    cplx pairing = 0.0;
    for (int n = 0; n < sp.fock_levels; ++n)
        for (int m = 0; m < sp.fock_levels; ++m) {
            Vec v = Vec::Zero(leg.dim() * leg.dim());
            v[leg.index(n, 0) * leg.dim() + leg.index(m, 0)] = 1.0;
            pairing += rho[n] * rho[m] * wsws.apply(v).dot(dws.apply(v));
        }
    CHECK(std::abs(direct - pairing) <= 1e-10);
    // GNS displacement of the coboundary from the identity: small with q
    const double gns_disp = std::sqrt(std::abs(2.0 * (1.0 - direct.real())));
    CHECK(gns_disp <= std::sqrt(2.0 * (11.0 * sp.q * sp.q + 1e-4)));
}

TEST_CASE("guichardet terms against the 11q^2 bound") {
    CHECK(guichardet_term(TruncSpec::make(0.1, 6, 2)) <= 11.0 * 0.01 + 1e-4);
    const double g05 = guichardet_term(TruncSpec::make(0.5, 6, 2));
    CHECK(g05 > 0.0);
    CHECK(g05 <= 11.0 * 0.25 + 1e-4);
}

TEST_CASE("pairing sub-identity against the truncated scalar oracle") {
    for (const int N : {4, 6, 8}) {
        const TruncSpec sp = TruncSpec::make(0.5, N, 2);
        const GenSet g = build_generators(sp);
        const CoprodRep rep = corep_generators({sp, sp}, RecursionOrder::left);
        const LinOp T = tensor(g.a, g.a) * rep.gen.a.adjoint();
        const StateWeights phi2 = product_state(haar(sp), haar(sp));
        const double v = eval_state(phi2, T).real();
        CHECK(std::abs(v - oracle::pairing_value(0.5, N)) <= 1e-13);
    }
    // frozen truncated values and the untruncated limit 1/(1+q^2)^2 = 0.64
    CHECK(oracle::pairing_value(0.5, 4) == doctest::Approx(0.620156250000000).epsilon(1e-12));
    CHECK(oracle::pairing_value(0.5, 6) == doctest::Approx(0.638750610351562).epsilon(1e-12));
    CHECK(oracle::pairing_value(0.5, 8) == doctest::Approx(0.639921877384186).epsilon(1e-12));
    // monotone refinement: deeper truncation does not worsen the deviation
    const double d4 = std::abs(oracle::pairing_value(0.5, 4) - 0.64);
    const double d6 = std::abs(oracle::pairing_value(0.5, 6) - 0.64);
    const double d8 = std::abs(oracle::pairing_value(0.5, 8) - 0.64);
    CHECK(d6 <= d4 + 1e-6);
    CHECK(d8 * 5.0 <= d6);
}

TEST_CASE("tail bound table with per-factor downshift") {
    const TailTable t = tail_bound_check(QSeq::geometric(0.5, 0.5, 6), 8, 2);
    REQUIRE(t.rows.size() == 6);
    double sum = 0.0;
    for (const auto& r : t.rows) {
        CHECK(r.pass);
        CHECK(r.term <= 11.0 * r.q * r.q + 1e-4);
        sum += r.term;
        CHECK(r.partial_sum == doctest::Approx(sum));
        CHECK(r.fock_used <= 8);
    }
    CHECK(t.rows[3].fock_used < 8);  // q_4 = 1/16 cannot resolve N=8 clusters
    CHECK(t.rows.back().partial_sum <= 11.0 / 3.0);
    // non-square-summable input: table computes, certificate refused
    const TailTable flat = tail_bound_check(QSeq::explicit_list(std::vector<double>(3, 0.5)), 6, 2);
    CHECK_FALSE(flat.summability.certified);
    CHECK(flat.rows.size() == 3);
}

TEST_CASE("3q^2 lemma") {
    for (const double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const Lemma3q2 lm = lemma_3q2(TruncSpec::make(q, 8, 3));
        INFO("q=", q);
        CHECK(lm.value <= lm.bound);
        CHECK(std::abs(lm.value - lm.series_value) <= 1e-10);
        CHECK(std::abs(lm.value - std::sqrt(oracle::lemma_3q2_series(q, 8))) <= 1e-10);
    }
    const Lemma3q2 lm = lemma_3q2(TruncSpec::make(0.5, 8, 3));
    CHECK(lm.value == doctest::Approx(std::sqrt(0.137795515008840)).epsilon(1e-10));
    CHECK(lm.bound == 0.75);
}

TEST_CASE("cocycle equation holds for the coboundary and breaks for the corruption") {
    const TruncSpec sp = TruncSpec::make(0.5, 4, 2);
    CHECK(cocycle_residual(sp, 20, 42) <= 1e-8);
    CHECK(cocycle_residual(TruncSpec::make(-0.5, 4, 2), 20, 42) <= 1e-8);
    CHECK(cocycle_residual(sp, 20, 42, /*corrupt=*/true) > 0.1);
}

TEST_CASE("partial products of (1-q_k^2)") {
    const QSeq seq = QSeq::geometric(0.5, 0.5, 10);
    const ProductConvergence pc = product_convergence(seq, 4, 8, 2);
    REQUIRE(pc.partial_products.size() == 10);
    CHECK(pc.partial_products[5] == doctest::Approx(0.688593574096785).epsilon(1e-12));
    CHECK(pc.partial_products[9] == doctest::Approx(0.688537756000584).epsilon(1e-12));
    // stabilises to four digits by m = 10
    CHECK(std::abs(pc.partial_products[9] - 0.6885) <= 5e-5);
    // tail defect at n obeys the log-product inequality sum_{k>n} q_k^2
    CHECK(pc.tail_defect <= pc.tail_defect_bound);
    CHECK(pc.tail_defect_bound <= std::pow(4.0, -4) / 3.0);
    // GNS route equals the scalar route up to Fock truncation of the weights
    CHECK(std::abs(pc.gns_distance_sq - pc.tail_defect) <= 1e-4);
}
