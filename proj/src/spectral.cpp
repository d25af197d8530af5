#include "qtwist/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace qtwist {

namespace {

struct ClusterOverlapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check_ladder_gap(const std::vector<double>& ladder, double target, double tol) {
    for (const double t : ladder)
        if (t != target && std::abs(t - target) <= 2.0 * tol)
            throw ClusterOverlapError(
                "spectral clusters indistinguishable at this truncation (increase fock_levels or "
                "decrease |q|)");
}

int nearest_node(const std::vector<double>& ladder, double target) {
    int best = 0;
    for (size_t i = 1; i < ladder.size(); ++i)
        if (std::abs(ladder[i] - target) < std::abs(ladder[best] - target))
            best = static_cast<int>(i);
    return best;
}

// Lagrange filter through the ladder nodes, as a matrix-free polynomial.
LinOp lagrange_filter(const LinOp& X, const std::vector<double>& ladder, int node) {
    const LinOp I = LinOp::identity(X.legs());
    double denom = 1.0;
    LinOp P;
    bool first = true;
    for (size_t j = 0; j < ladder.size(); ++j) {
        if (static_cast<int>(j) == node) continue;
        denom *= (ladder[node] - ladder[j]);
        const LinOp factor = X - cplx(ladder[j]) * I;
        P = first ? factor : P * factor;
        first = false;
    }
    return cplx(1.0 / denom) * P;
}

bool projector_probe_check(const LinOp& P, int probes, uint64_t seed, double tol) {
    ProbeRng rng(seed);
    for (int i = 0; i < probes; ++i) {
        const Vec v = rng.unit_probe(P.legs());
        const Vec pv = P.apply(v);
        if ((P.apply(pv) - pv).norm() > tol) return false;
        if ((pv - P.adjoint().apply(v)).norm() > tol) return false;
    }
    return true;
}

std::vector<int> unflatten_sector(const Spaces& legs, long s) {
    std::vector<int> sec(legs.size());
    for (int l = static_cast<int>(legs.size()) - 1; l >= 0; --l) {
        const int w = legs[l].winding_size();
        sec[l] = static_cast<int>(s % w);
        s /= w;
    }
    return sec;
}

long sector_count(const Spaces& legs) {
    long c = 1;
    for (const auto& l : legs) c *= l.winding_size();
    return c;
}

long fock_dim(const Spaces& legs) {
    long d = 1;
    for (const auto& l : legs) d *= l.fock_levels;
    return d;
}

// Per-sector eigendecomposition of a winding-invariant hermitian composite.
struct SectorEig {
    std::vector<Eigen::VectorXd> evals;   // per sector
    std::vector<Mat> evecs;               // per sector
};

SectorEig sector_eigs(const LinOp& X) {
    const Spaces& legs = X.legs();
    const long ns = sector_count(legs);
    SectorEig out;
    out.evals.resize(ns);
    out.evecs.resize(ns);
    for (long s = 0; s < ns; ++s) {
        const Mat B = X.sector_block(unflatten_sector(legs, s));
        Eigen::SelfAdjointEigenSolver<Mat> es(B);
        out.evals[s] = es.eigenvalues();
        out.evecs[s] = es.eigenvectors();
    }
    return out;
}

Mat polar_basis(const Mat& M, double min_sv) {
    if (M.cols() == 0) return M;
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < min_sv)
        throw ClusterOverlapError("degenerate isometry chain: cluster images collapse at this truncation");
    return svd.matrixU() * svd.matrixV().adjoint();
}

// Normalised product-Haar weights over the Fock multi-indices.
Eigen::VectorXd product_weights(const std::vector<TruncSpec>& specs) {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
    for (const auto& sp : specs) {
        const int N = sp.fock_levels;
        Eigen::VectorXd leg(N);
        const double q2 = sp.q * sp.q;
        for (int n = 0; n < N; ++n) leg[n] = (1.0 - q2) * std::pow(q2, n);
        leg /= leg.sum();
        Eigen::VectorXd out(w.size() * N);
        for (long i = 0; i < w.size(); ++i) out.segment(i * N, N) = w[i] * leg;
        w = std::move(out);
    }
    return w;
}

}  // namespace

struct SpectralElems::Storage {
    // one leg
    Mat a_dense;
    std::vector<Mat> full_dense;  // projectors per target (1-leg)
    // multi leg
    std::vector<std::vector<Mat>> chain_bases;  // per sector: {B0, B1, B2}
    std::vector<std::vector<Mat>> full_blocks;  // per target j<=2: per-sector blocks
    Spaces spaces;
    bool one_leg = true;
};

LinOp SpectralElems::cluster(int j) const {
    if (store->one_leg) {
        if (j < 0 || j >= static_cast<int>(store->full_dense.size()))
            throw std::invalid_argument("cluster index out of range");
        return LinOp::dense(store->spaces, store->full_dense[j]);
    }
    if (j < 0 || j > 2) throw std::invalid_argument("cluster index out of range at L >= 2");
    return LinOp::sector_blocked(store->spaces, store->full_blocks[j]);
}

LinOp SpectralElems::e(int m, int n) const {
    if (store->one_leg) {
        const int N = specs[0].fock_levels;
        if (m < 0 || n < 0 || m >= N || n >= N) throw std::invalid_argument("e(m,n) out of range");
        if (m == n) return LinOp::dense(store->spaces, store->full_dense[m]);
        if (m > n) return e(n, m).adjoint();
        const double q2 = specs[0].q * specs[0].q;
        double c = 1.0;
        for (int j = m + 1; j <= n; ++j) c *= std::sqrt(1.0 - std::pow(q2, j));
        Mat apow = Mat::Identity(store->a_dense.rows(), store->a_dense.cols());
        for (int j = 0; j < n - m; ++j) apow = store->a_dense * apow;
        Mat em = store->full_dense[m] * apow * store->full_dense[n] / c;
        return LinOp::dense(store->spaces, std::move(em));
    }
    if (m < 0 || n < 0 || m > 2 || n > 2)
        throw std::invalid_argument("e(m,n) with m,n > 2 not materialised at L >= 2");
    std::vector<Mat> blocks;
    blocks.reserve(store->chain_bases.size());
    for (const auto& bs : store->chain_bases) blocks.push_back(bs[m] * bs[n].adjoint());
    return LinOp::sector_blocked(store->spaces, std::move(blocks));
}

LinOp spectral_projector(const LinOp& X, double target, double tol,
                         const std::vector<double>& ladder, uint64_t seed) {
    {
        ProbeRng rng(derive_seed(seed, "herm"));
        double scale = 0.0, herm = 0.0;
        for (int i = 0; i < 3; ++i) {
            const Vec v = rng.unit_probe(X.legs());
            const Vec xv = X.apply(v);
            scale = std::max(scale, xv.norm());
            herm = std::max(herm, (xv - X.adjoint().apply(v)).norm());
        }
        if (herm > 1e-12 * (1.0 + scale))
            throw std::invalid_argument("spectral_projector: operator is not hermitian");
    }
    check_ladder_gap(ladder, target, tol);

    const int node = nearest_node(ladder, target);
    if (std::abs(ladder[node] - target) <= tol) {
        const LinOp P = lagrange_filter(X, ladder, node);
        if (projector_probe_check(P, 4, derive_seed(seed, "lagr"), 1e-13)) {
            if (X.dim() <= LinOp::kDenseLimit) return LinOp::dense(X.legs(), P.to_dense());
            return P;
        }
    }

    // eigendecomposition fallback
    if (X.legs().size() >= 2 && X.sector_decomposable() &&
        winding_invariant(X, 2, derive_seed(seed, "wind"))) {
        const SectorEig se = sector_eigs(X);
        const Spaces& legs = X.legs();
        std::vector<Mat> blocks(se.evals.size());
        for (size_t s = 0; s < se.evals.size(); ++s) {
            const long fd = fock_dim(legs);
            std::vector<long> sel;
            for (long i = 0; i < se.evals[s].size(); ++i)
                if (std::abs(se.evals[s][i] - target) < tol) sel.push_back(i);
            Mat V(fd, sel.size());
            for (size_t c = 0; c < sel.size(); ++c) V.col(c) = se.evecs[s].col(sel[c]);
            blocks[s] = V * V.adjoint();
        }
        return LinOp::sector_blocked(legs, std::move(blocks));
    }
    if (X.dim() > LinOp::kDenseLimit)
        throw std::runtime_error("spectral_projector: dense eigendecomposition refused above dimension 5000");
    Eigen::SelfAdjointEigenSolver<Mat> es(X.to_dense());
    std::vector<long> sel;
    for (long i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()[i] - target) < tol) sel.push_back(i);
    Mat V(X.dim(), sel.size());
    for (size_t c = 0; c < sel.size(); ++c) V.col(c) = es.eigenvectors().col(sel[c]);
    return LinOp::dense(X.legs(), V * V.adjoint());
}

LinOp spectral_projector(const TruncSpec& spec, const LinOp& X, double target) {
    return spectral_projector(X, target, spec.cluster_tol, spec.target_spectrum());
}

SpectralElems build_spectral_elems(const GenSet& g) {
    for (const auto& s : g.specs)
        if (s.q != g.specs[0].q)
            throw std::invalid_argument("build_spectral_elems: mixed-q legs unsupported");
    const TruncSpec& sp = g.specs[0];
    const std::vector<double> ladder = sp.target_spectrum();
    const double tol = sp.cluster_tol;
    for (size_t j = 0; j + 1 < ladder.size(); ++j)
        if (ladder[j + 1] - ladder[j] <= 2.0 * tol)
            throw ClusterOverlapError(
                "spectral clusters indistinguishable at this truncation (increase fock_levels or "
                "decrease |q|, or tighten cluster_tol)");
    const LinOp X = g.a.adjoint() * g.a;

    SpectralElems out;
    out.specs = g.specs;
    auto store = std::make_shared<SpectralElems::Storage>();
    store->spaces = g.spaces();

    if (g.legs() == 1) {
        store->one_leg = true;
        store->a_dense = g.a.to_dense();
        Eigen::SelfAdjointEigenSolver<Mat> es(X.to_dense());
        const auto& ev = es.eigenvalues();
        const Eigen::VectorXd wts = product_weights(g.specs);
        const LegSpace leg = sp.space();
        std::vector<char> assigned(ev.size(), 0);
        for (size_t j = 0; j < ladder.size(); ++j) {
            std::vector<long> sel;
            double maxdev = 0.0;
            for (long i = 0; i < ev.size(); ++i)
                if (std::abs(ev[i] - ladder[j]) < tol) {
                    sel.push_back(i);
                    assigned[i] = 1;
                    maxdev = std::max(maxdev, std::abs(ev[i] - ladder[j]));
                }
            Mat V(leg.dim(), sel.size());
            for (size_t c = 0; c < sel.size(); ++c) V.col(c) = es.eigenvectors().col(sel[c]);
            store->full_dense.push_back(V * V.adjoint());
            double wgt = 0.0;
            for (int n = 0; n < leg.fock_levels; ++n)
                wgt += wts[n] * store->full_dense.back()(leg.index(n, 0), leg.index(n, 0)).real();
            out.report.clusters.push_back(
                {static_cast<int>(j), ladder[j], static_cast<long>(sel.size()), maxdev, wgt});
        }
        for (long i = 0; i < ev.size(); ++i)
            if (!assigned[i]) ++out.report.unassigned_count;
        out.store = store;
        out.p = out.cluster(0);
        out.p_prime = out.cluster(1);
        out.diagonal.clear();
        for (size_t j = 0; j < ladder.size(); ++j) out.diagonal.push_back(out.cluster(j));
        LinOp tail = LinOp::identity(store->spaces) - out.cluster(0) - out.cluster(1) - out.cluster(2);
        out.w = out.e(0, 1) + out.e(1, 2) + out.e(2, 0) + tail;
        // materialise w densely; it is reused heavily downstream
        out.w = LinOp::dense(store->spaces, out.w.to_dense());
        return out;
    }

    // L >= 2: winding-sector path
    store->one_leg = false;
    if (!X.sector_decomposable() || !winding_invariant(X, 2, 1234))
        throw std::runtime_error("build_spectral_elems: representation is not winding-invariant");
    const Spaces& legs = store->spaces;
    const long ns = sector_count(legs);
    const long fd = fock_dim(legs);
    const SectorEig se = sector_eigs(X);

    const Eigen::VectorXd wts = product_weights(g.specs);
    const double sector_share = 1.0 / static_cast<double>(ns);
    std::vector<ClusterInfo> infos;
    for (size_t j = 0; j < ladder.size(); ++j)
        infos.push_back({static_cast<int>(j), ladder[j], 0, 0.0, 0.0});

    store->full_blocks.assign(3, std::vector<Mat>(ns));
    store->chain_bases.resize(ns);
    const double q2 = sp.q * sp.q;
    const double min_sv = 0.25 * std::sqrt(1.0 - q2);

    for (long s = 0; s < ns; ++s) {
        const auto sec = unflatten_sector(legs, s);
        const Mat A = g.a.sector_block(sec);
        std::vector<Mat> V(3);
        for (long i = 0; i < se.evals[s].size(); ++i) {
            bool hit = false;
            for (size_t j = 0; j < ladder.size(); ++j) {
                if (std::abs(se.evals[s][i] - ladder[j]) < tol) {
                    infos[j].count += 1;
                    infos[j].max_dev = std::max(infos[j].max_dev, std::abs(se.evals[s][i] - ladder[j]));
                    double wgt = 0.0;
                    for (long n = 0; n < fd; ++n)
                        wgt += wts[n] * std::norm(se.evecs[s](n, i));
                    infos[j].phi_weight += sector_share * wgt;
                    hit = true;
                    break;
                }
            }
            if (!hit) {
                out.report.unassigned_count += 1;
                double wgt = 0.0;
                for (long n = 0; n < fd; ++n) wgt += wts[n] * std::norm(se.evecs[s](n, i));
                out.report.unassigned_weight += sector_share * wgt;
            }
        }
        for (int j = 0; j < 3; ++j) {
            std::vector<long> sel;
            for (long i = 0; i < se.evals[s].size(); ++i)
                if (std::abs(se.evals[s][i] - ladder[j]) < tol) sel.push_back(i);
            Mat Vj(fd, sel.size());
            for (size_t c = 0; c < sel.size(); ++c) Vj.col(c) = se.evecs[s].col(sel[c]);
            V[j] = std::move(Vj);
            store->full_blocks[j][s] = V[j] * V[j].adjoint();
        }
        // rank-matched chain anchored at cluster 2, sandwiched into the full
        // clusters so the bases stay exactly orthogonal across clusters.
        Mat B2 = V[2];
        Mat B1 = polar_basis(V[1] * (V[1].adjoint() * (A * B2)), min_sv);
        Mat B0 = polar_basis(V[0] * (V[0].adjoint() * (A * B1)), min_sv);
        store->chain_bases[s] = {std::move(B0), std::move(B1), std::move(B2)};
    }
    out.report.clusters = std::move(infos);
    out.store = store;
    out.p = out.e(0, 0);
    out.p_prime = out.e(1, 1);
    out.diagonal = {out.e(0, 0), out.e(1, 1), out.e(2, 2)};
    // w assembled per sector: moved chain + identity elsewhere
    std::vector<Mat> wblocks(ns);
    for (long s = 0; s < ns; ++s) {
        const auto& B = store->chain_bases[s];
        Mat wb = Mat::Identity(fd, fd);
        for (int j = 0; j < 3; ++j) wb -= B[j] * B[j].adjoint();
        wb += B[0] * B[1].adjoint() + B[1] * B[2].adjoint() + B[2] * B[0].adjoint();
        wblocks[s] = std::move(wb);
    }
    out.w = LinOp::sector_blocked(legs, std::move(wblocks));
    return out;
}

}  // namespace qtwist
