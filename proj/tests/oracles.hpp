#pragma once

// Independent test-side oracles. Everything here is built directly from the
// basis-action formulas or plain scalar arithmetic, bypassing the LinOp
// composite machinery it is used to check.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "qtwist/spaces.hpp"

namespace oracle {

using qtwist::cplx;
using qtwist::LegSpace;
using qtwist::Mat;

// Dense one-leg generators scattered entry by entry.
inline Mat leg_a(double q, const LegSpace& leg) {
    Mat A = Mat::Zero(leg.dim(), leg.dim());
    for (int n = 1; n < leg.fock_levels; ++n)
        for (int k = 0; k < leg.winding_size(); ++k)
            A(leg.index(n - 1, k), leg.index(n, k)) = std::sqrt(1.0 - std::pow(q * q, n));
    return A;
}

inline Mat leg_b(double q, const LegSpace& leg) {
    Mat B = Mat::Zero(leg.dim(), leg.dim());
    for (int n = 0; n < leg.fock_levels; ++n)
        for (int k = 0; k < leg.winding_size(); ++k)
            B(leg.index(n, k + 1), leg.index(n, k)) = std::pow(q, n);
    return B;
}

// Dense Delta(a) on two legs, scattered entrywise from
// Delta(a) xi_{n1,k1} (x) xi_{n2,k2} =
//   sqrt(1-q^{2n1}) sqrt(1-q^{2n2}) xi_{n1-1,k1} (x) xi_{n2-1,k2}
//   - q * q^{n1+n2} xi_{n1,k1-1} (x) xi_{n2,k2+1}.
inline Mat delta_a_entrywise(double q, const LegSpace& leg) {
    const long d = leg.dim();
    Mat D = Mat::Zero(d * d, d * d);
    for (int n1 = 0; n1 < leg.fock_levels; ++n1)
        for (int k1 = 0; k1 < leg.winding_size(); ++k1)
            for (int n2 = 0; n2 < leg.fock_levels; ++n2)
                for (int k2 = 0; k2 < leg.winding_size(); ++k2) {
                    const long col = leg.index(n1, k1) * d + leg.index(n2, k2);
                    if (n1 >= 1 && n2 >= 1) {
                        const double amp = std::sqrt(1.0 - std::pow(q * q, n1)) *
                                           std::sqrt(1.0 - std::pow(q * q, n2));
                        D(leg.index(n1 - 1, k1) * d + leg.index(n2 - 1, k2), col) += amp;
                    }
                    D(leg.index(n1, k1 - 1) * d + leg.index(n2, k2 + 1), col) -=
                        q * std::pow(q, n1) * std::pow(q, n2);
                }
    return D;
}

// Eigensolver oracle: dense projector onto the eigencluster at `target`.
inline Mat cluster_projector(const Mat& X, double target, double tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(X);
    std::vector<long> sel;
    for (long i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()[i] - target) < tol) sel.push_back(i);
    Mat V(X.rows(), static_cast<long>(sel.size()));
    for (size_t c = 0; c < sel.size(); ++c) V.col(c) = es.eigenvectors().col(sel[c]);
    return V * V.adjoint();
}

// Truncated Haar weights rho_n = (1-q^2) q^{2n} / (1 - q^{2N}).
inline std::vector<double> haar_weights(double q, int N) {
    std::vector<double> w(N);
    double s = 0.0;
    for (int n = 0; n < N; ++n) {
        w[n] = (1.0 - q * q) * std::pow(q * q, n);
        s += w[n];
    }
    for (auto& x : w) x /= s;
    return w;
}

// Exact truncated value of (phi (x) phi)((a (x) a) Delta(a*)): the b-term has
// zero diagonal, so the value is (sum_{n<=N-2} rho_n (1-q^{2n+2}))^2.
inline double pairing_value(double q, int N) {
    const auto rho = haar_weights(q, N);
    double s = 0.0;
    for (int n = 0; n <= N - 2; ++n) s += rho[n] * (1.0 - std::pow(q * q, n + 1));
    return s * s;
}

// Diagonal series of phi((w-a)(w*-a*)) at the same truncation: terms
// (1-sqrt(1-q^2))^2, q^2(1-sqrt(1-q^4))^2, q^{2n}(2-q^{2n+2}) for n in
// [2, N-2], and 1 at the cut level N-1.
inline double lemma_3q2_series(double q, int N) {
    const auto rho = haar_weights(q, N);
    double acc = rho[0] * std::pow(1.0 - std::sqrt(1.0 - q * q), 2);
    acc += rho[1] * std::pow(1.0 - std::sqrt(1.0 - std::pow(q, 4)), 2);
    for (int n = 2; n <= N - 2; ++n) acc += rho[n] * (2.0 - std::pow(q * q, n + 1));
    acc += rho[N - 1];
    return acc;
}

}  // namespace oracle
