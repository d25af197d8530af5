#include "qtwist/state.hpp"

namespace qtwist {

namespace {

// Elementary tensor of the per-leg evaluation vectors for multi-index n.
Vec eval_tensor(const std::vector<LegWeights>& legs, const std::vector<int>& n) {
    Vec v = legs[0].eval_vector(n[0]);
    for (size_t l = 1; l < legs.size(); ++l) {
        const Vec w = legs[l].eval_vector(n[l]);
        Vec out(v.size() * w.size());
        for (long i = 0; i < v.size(); ++i) out.segment(i * w.size(), w.size()) = v[i] * w;
        v = std::move(out);
    }
    return v;
}

double weight_of(const std::vector<LegWeights>& legs, const std::vector<int>& n) {
    double w = 1.0;
    for (size_t l = 0; l < legs.size(); ++l) w *= legs[l].raw[n[l]];
    return w;
}

}  // namespace

Vec LegWeights::eval_vector(int n) const {
    Vec e = Vec::Zero(space.dim());
    e[space.index(n, 0)] = 1.0;
    return conjugator ? conjugator->apply(e) : e;
}

StateWeights product_state(const StateWeights& a, const StateWeights& b) {
    StateWeights s;
    s.legs = a.legs;
    s.legs.insert(s.legs.end(), b.legs.begin(), b.legs.end());
    s.prefactor = a.prefactor * b.prefactor;
    return s;
}

cplx eval_state(const StateWeights& omega, const LinOp& T) {
    if (!same_spaces(omega.spaces(), T.legs()))
        throw DimensionMismatch("eval_state: functional and operator legs differ");
    cplx acc = 0.0;
    FockMultiIndex mi(omega.spaces());
    while (!mi.done) {
        const Vec v = eval_tensor(omega.legs, mi.idx);
        acc += weight_of(omega.legs, mi.idx) * v.dot(T.apply(v));
        mi.next();
    }
    return omega.prefactor * acc / omega.normalizer();
}

namespace {

LinOp slice_impl(const LinOp& T, const StateWeights& omega, bool right) {
    const Spaces all = T.legs();
    const size_t nw = omega.legs.size();
    if (nw >= all.size())
        throw DimensionMismatch("slice: functional must cover a proper trailing/leading block");
    const Spaces wlegs(right ? all.end() - nw : all.begin(),
                       right ? all.end() : all.begin() + nw);
    if (!same_spaces(wlegs, omega.spaces()))
        throw DimensionMismatch("slice: functional legs do not match the sliced block");
    const Spaces keep(right ? all.begin() : all.begin() + nw,
                      right ? all.end() - nw : all.end());
    const long dk = total_dim(keep);
    const long dw = total_dim(wlegs);

    Mat S = Mat::Zero(dk, dk);
    FockMultiIndex mi(wlegs);
    Mat full(dk * dw, dk);
    while (!mi.done) {
        const Vec v = eval_tensor(omega.legs, mi.idx);
        const Vec vc = v.conjugate();
        const double w = weight_of(omega.legs, mi.idx);
        full.setZero();
        for (long i = 0; i < dk; ++i) {
            if (right) {
                full.col(i).segment(i * dw, dw) = v;  // e_i (x) v
            } else {
                for (long r = 0; r < dw; ++r) full(r * dk + i, i) = v[r];  // v (x) e_i
            }
        }
        const Mat Y = T.apply_many(full);
        for (long i = 0; i < dk; ++i) {
            if (right) {
                for (long j = 0; j < dk; ++j) S(j, i) += w * v.dot(Y.col(i).segment(j * dw, dw));
            } else {
                for (long j = 0; j < dk; ++j) {
                    cplx z = 0.0;
                    for (long r = 0; r < dw; ++r) z += Y(r * dk + j, i) * vc[r];
                    S(j, i) += w * z;
                }
            }
        }
        mi.next();
    }
    S *= omega.prefactor / omega.normalizer();
    return LinOp::dense(keep, std::move(S));
}

}  // namespace

LinOp slice_right(const LinOp& T, const StateWeights& omega) { return slice_impl(T, omega, true); }
LinOp slice_left(const LinOp& T, const StateWeights& omega) { return slice_impl(T, omega, false); }

}  // namespace qtwist
