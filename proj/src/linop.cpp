#include "qtwist/linop.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "qtwist/rng.hpp"

namespace qtwist {
namespace detail {

class Node {
  public:
    explicit Node(Spaces legs) : legs_(std::move(legs)) {}
    virtual ~Node() = default;

    const Spaces& legs() const { return legs_; }
    long dim() const { return total_dim(legs_); }

    virtual void apply(const Vec& in, Vec& out, bool adj) const = 0;
    virtual void apply_many(const Mat& in, Mat& out, bool adj) const {
        out.resize(in.rows(), in.cols());
        Vec col(in.rows()), res(in.rows());
        for (long j = 0; j < in.cols(); ++j) {
            col = in.col(j);
            apply(col, res, adj);
            out.col(j) = res;
        }
    }
    virtual Mat sector_block(const std::vector<int>& sector, bool adj) const = 0;
    virtual bool sector_decomposable() const = 0;
    virtual std::string kind() const = 0;

  private:
    Spaces legs_;
};

using NodePtr = std::shared_ptr<const Node>;

namespace {

// out[(l*dm + m')*dr + r] = sum_m M(m', m) in[(l*dm + m)*dr + r]
void apply_axis_matrix(const Mat& M, long dl, long dm, long dr, const Vec& in, Vec& out,
                       bool adj) {
    Vec col(dm), res(dm);
    for (long l = 0; l < dl; ++l) {
        for (long r = 0; r < dr; ++r) {
            const long base = l * dm * dr + r;
            for (long m = 0; m < dm; ++m) col[m] = in[base + m * dr];
            if (adj)
                res.noalias() = M.adjoint() * col;
            else
                res.noalias() = M * col;
            for (long m = 0; m < dm; ++m) out[base + m * dr] = res[m];
        }
    }
}

// same transform applied to every column of a matrix, batched per (l, r)
void apply_axis_matrix_many(const Mat& M, long dl, long dm, long dr, Mat& cur, bool adj) {
    const long nc = cur.cols();
    Mat blk(dm, nc), res(dm, nc);
    for (long l = 0; l < dl; ++l) {
        for (long r = 0; r < dr; ++r) {
            const long base = l * dm * dr + r;
            for (long m = 0; m < dm; ++m) blk.row(m) = cur.row(base + m * dr);
            if (adj)
                res.noalias() = M.adjoint() * blk;
            else
                res.noalias() = M * blk;
            for (long m = 0; m < dm; ++m) cur.row(base + m * dr) = res.row(m);
        }
    }
}

Mat winding_dft(int w) {
    Mat F(w, w);
    const double s = 1.0 / std::sqrt(static_cast<double>(w));
    for (int k = 0; k < w; ++k)
        for (int m = 0; m < w; ++m) {
            const double th = 2.0 * M_PI * k * m / w;
            F(k, m) = cplx(std::cos(th), std::sin(th)) * s;
        }
    return F;
}

long fock_dim(const Spaces& legs) {
    long d = 1;
    for (const auto& l : legs) d *= l.fock_levels;
    return d;
}

long sector_count(const Spaces& legs) {
    long c = 1;
    for (const auto& l : legs) c *= l.winding_size();
    return c;
}

void check_one_leg_invariant(const Mat& m, const LegSpace& leg) {
    const int w = leg.winding_size();
    const long d = leg.dim();
    Mat R = Mat::Zero(d, d);
    for (int n = 0; n < leg.fock_levels; ++n)
        for (int k = 0; k < w; ++k) R(leg.index(n, k + 1), leg.index(n, k)) = 1.0;
    const double res = (m * R - R * m).norm();
    if (res > 1e-10 * std::max(1.0, m.norm()))
        throw std::runtime_error("sector decomposition on a winding-variant dense leaf");
}

}  // namespace

class IdentityNode final : public Node {
  public:
    using Node::Node;
    void apply(const Vec& in, Vec& out, bool) const override { out = in; }
    Mat sector_block(const std::vector<int>&, bool) const override {
        return Mat::Identity(fock_dim(legs()), fock_dim(legs()));
    }
    bool sector_decomposable() const override { return true; }
    std::string kind() const override { return "identity"; }
};

class DenseNode final : public Node {
  public:
    DenseNode(Spaces legs, Mat m) : Node(std::move(legs)), m_(std::move(m)) {
        if (m_.rows() != dim() || m_.cols() != dim())
            throw DimensionMismatch("dense matrix does not match space dimension");
    }
    void apply(const Vec& in, Vec& out, bool adj) const override {
        if (adj)
            out.noalias() = m_.adjoint() * in;
        else
            out.noalias() = m_ * in;
    }
    void apply_many(const Mat& in, Mat& out, bool adj) const override {
        if (adj)
            out.noalias() = m_.adjoint() * in;
        else
            out.noalias() = m_ * in;
    }
    Mat sector_block(const std::vector<int>& sector, bool adj) const override {
        if (legs().size() != 1)
            throw std::runtime_error("multi-leg dense leaf is not sector-decomposable");
        const LegSpace leg = legs()[0];
        check_one_leg_invariant(m_, leg);
        const int w = leg.winding_size();
        const int N = leg.fock_levels;
        const Mat F = winding_dft(w);
        Mat C(leg.dim(), N);
        C.setZero();
        for (int n = 0; n < N; ++n)
            for (int k = 0; k < w; ++k) C(leg.index(n, k), n) = F(k, sector[0]);
        Mat B = C.adjoint() * m_ * C;
        return adj ? Mat(B.adjoint()) : B;
    }
    bool sector_decomposable() const override { return legs().size() == 1; }
    std::string kind() const override { return "dense"; }
    const Mat& matrix() const { return m_; }

  private:
    Mat m_;
};

class AdjointNode final : public Node {
  public:
    explicit AdjointNode(NodePtr c) : Node(c->legs()), c_(std::move(c)) {}
    void apply(const Vec& in, Vec& out, bool adj) const override { c_->apply(in, out, !adj); }
    Mat sector_block(const std::vector<int>& sector, bool adj) const override {
        return c_->sector_block(sector, !adj);
    }
    bool sector_decomposable() const override { return c_->sector_decomposable(); }
    std::string kind() const override { return "adjoint"; }
    const NodePtr& child() const { return c_; }

  private:
    NodePtr c_;
};

class ProductNode final : public Node {
  public:
    ProductNode(Spaces legs, std::vector<NodePtr> fs) : Node(std::move(legs)), fs_(std::move(fs)) {}
    void apply(const Vec& in, Vec& out, bool adj) const override {
        Vec cur = in, tmp(dim());
        if (!adj) {
            for (auto it = fs_.rbegin(); it != fs_.rend(); ++it) {
                (*it)->apply(cur, tmp, false);
                cur.swap(tmp);
            }
        } else {
            for (const auto& f : fs_) {
                f->apply(cur, tmp, true);
                cur.swap(tmp);
            }
        }
        out = std::move(cur);
    }
    void apply_many(const Mat& in, Mat& out, bool adj) const override {
        Mat cur = in, tmp;
        if (!adj) {
            for (auto it = fs_.rbegin(); it != fs_.rend(); ++it) {
                (*it)->apply_many(cur, tmp, false);
                cur.swap(tmp);
            }
        } else {
            for (const auto& f : fs_) {
                f->apply_many(cur, tmp, true);
                cur.swap(tmp);
            }
        }
        out = std::move(cur);
    }
    Mat sector_block(const std::vector<int>& sector, bool adj) const override {
        Mat B = fs_.back()->sector_block(sector, false);
        for (auto it = std::next(fs_.rbegin()); it != fs_.rend(); ++it)
            B = (*it)->sector_block(sector, false) * B;
        return adj ? Mat(B.adjoint()) : B;
    }
    bool sector_decomposable() const override {
        return std::all_of(fs_.begin(), fs_.end(),
                           [](const NodePtr& f) { return f->sector_decomposable(); });
    }
    std::string kind() const override { return "product"; }
    const std::vector<NodePtr>& factors() const { return fs_; }

  private:
    std::vector<NodePtr> fs_;
};

class TensorNode final : public Node {
  public:
    TensorNode(Spaces legs, std::vector<NodePtr> fs) : Node(std::move(legs)), fs_(std::move(fs)) {}
    void apply(const Vec& in, Vec& out, bool adj) const override {
        Vec cur = in;
        long before = 1;
        const long dtot = dim();
        for (const auto& f : fs_) {
            const long dm = f->dim();
            const long dr = dtot / (before * dm);
            Vec next(dtot);
            Vec col(dm), res(dm);
            for (long l = 0; l < before; ++l)
                for (long r = 0; r < dr; ++r) {
                    const long base = l * dm * dr + r;
                    for (long m = 0; m < dm; ++m) col[m] = cur[base + m * dr];
                    f->apply(col, res, adj);
                    for (long m = 0; m < dm; ++m) next[base + m * dr] = res[m];
                }
            cur.swap(next);
            before *= dm;
        }
        out = std::move(cur);
    }
    Mat sector_block(const std::vector<int>& sector, bool adj) const override {
        Mat B;
        size_t off = 0;
        for (const auto& f : fs_) {
            const size_t nl = f->legs().size();
            std::vector<int> sub(sector.begin() + off, sector.begin() + off + nl);
            Mat Bf = f->sector_block(sub, adj);
            if (B.size() == 0) {
                B = Bf;
            } else {
                Mat K(B.rows() * Bf.rows(), B.cols() * Bf.cols());
                for (long i = 0; i < B.rows(); ++i)
                    for (long j = 0; j < B.cols(); ++j)
                        K.block(i * Bf.rows(), j * Bf.cols(), Bf.rows(), Bf.cols()) = B(i, j) * Bf;
                B = std::move(K);
            }
            off += nl;
        }
        return B;
    }
    bool sector_decomposable() const override {
        return std::all_of(fs_.begin(), fs_.end(),
                           [](const NodePtr& f) { return f->sector_decomposable(); });
    }
    std::string kind() const override { return "tensor"; }

  private:
    std::vector<NodePtr> fs_;
};

class SumNode final : public Node {
  public:
    SumNode(Spaces legs, std::vector<std::pair<cplx, NodePtr>> ts)
        : Node(std::move(legs)), ts_(std::move(ts)) {}
    void apply(const Vec& in, Vec& out, bool adj) const override {
        out = Vec::Zero(dim());
        Vec tmp(dim());
        for (const auto& [c, f] : ts_) {
            f->apply(in, tmp, adj);
            out += (adj ? std::conj(c) : c) * tmp;
        }
    }
    Mat sector_block(const std::vector<int>& sector, bool adj) const override {
        Mat B = Mat::Zero(fock_dim(legs()), fock_dim(legs()));
        for (const auto& [c, f] : ts_)
            B += (adj ? std::conj(c) : c) * f->sector_block(sector, adj);
        return B;
    }
    bool sector_decomposable() const override {
        return std::all_of(ts_.begin(), ts_.end(),
                           [](const auto& t) { return t.second->sector_decomposable(); });
    }
    std::string kind() const override { return "sum"; }

  private:
    std::vector<std::pair<cplx, NodePtr>> ts_;
};

// Winding-sector block-diagonal operator: one dense Fock-block per sector.
class SectorNode final : public Node {
  public:
    SectorNode(Spaces legs, std::vector<Mat> blocks)
        : Node(std::move(legs)), blocks_(std::move(blocks)) {
        const long fd = fock_dim(this->legs());
        if (static_cast<long>(blocks_.size()) != sector_count(this->legs()))
            throw DimensionMismatch("sector block count mismatch");
        for (const auto& b : blocks_)
            if (b.rows() != fd || b.cols() != fd)
                throw DimensionMismatch("sector block dimension mismatch");
        build_permutation();
    }

    void apply(const Vec& in, Vec& out, bool adj) const override {
        Vec cur = in;
        // forward winding DFTs (coefficients in each sector)
        long before = 1;
        const long dtot = dim();
        for (const auto& l : legs()) {
            const Mat F = winding_dft(l.winding_size());
            before *= l.fock_levels;
            const long dm = l.winding_size();
            apply_axis_matrix(F, before, dm, dtot / (before * dm), cur, cur, /*adj=*/true);
            before *= dm;
        }
        // gather sector-major, block multiply, scatter
        Vec g(dtot);
        for (long p = 0; p < dtot; ++p) g[p] = cur[perm_[p]];
        const long fd = fock_dim(legs());
        for (size_t s = 0; s < blocks_.size(); ++s) {
            auto seg = g.segment(static_cast<long>(s) * fd, fd);
            seg = adj ? (blocks_[s].adjoint() * seg).eval() : (blocks_[s] * seg).eval();
        }
        for (long p = 0; p < dtot; ++p) cur[perm_[p]] = g[p];
        // inverse DFTs
        before = 1;
        for (const auto& l : legs()) {
            const Mat F = winding_dft(l.winding_size());
            before *= l.fock_levels;
            const long dm = l.winding_size();
            apply_axis_matrix(F, before, dm, dtot / (before * dm), cur, cur, /*adj=*/false);
            before *= dm;
        }
        out = std::move(cur);
    }

    void apply_many(const Mat& in, Mat& out, bool adj) const override {
        const long dtot = dim();
        const long nc = in.cols();
        Mat cur = in;
        long before = 1;
        for (const auto& l : legs()) {
            const Mat F = winding_dft(l.winding_size());
            before *= l.fock_levels;
            const long dm = l.winding_size();
            apply_axis_matrix_many(F, before, dm, dtot / (before * dm), cur, /*adj=*/true);
            before *= dm;
        }
        Mat g(dtot, nc);
        for (long p = 0; p < dtot; ++p) g.row(p) = cur.row(perm_[p]);
        const long fd = fock_dim(legs());
        for (size_t s = 0; s < blocks_.size(); ++s) {
            auto seg = g.middleRows(static_cast<long>(s) * fd, fd);
            seg = adj ? (blocks_[s].adjoint() * seg).eval() : (blocks_[s] * seg).eval();
        }
        for (long p = 0; p < dtot; ++p) cur.row(perm_[p]) = g.row(p);
        before = 1;
        for (const auto& l : legs()) {
            const Mat F = winding_dft(l.winding_size());
            before *= l.fock_levels;
            const long dm = l.winding_size();
            apply_axis_matrix_many(F, before, dm, dtot / (before * dm), cur, /*adj=*/false);
            before *= dm;
        }
        out = std::move(cur);
    }
    Mat sector_block(const std::vector<int>& sector, bool adj) const override {
        long s = 0;
        for (size_t l = 0; l < legs().size(); ++l) s = s * legs()[l].winding_size() + sector[l];
        return adj ? Mat(blocks_[s].adjoint()) : blocks_[s];
    }
    bool sector_decomposable() const override { return true; }
    std::string kind() const override { return "sector_blocked"; }

  private:
    void build_permutation() {
        const long dtot = dim();
        perm_.resize(dtot);
        const size_t L = legs().size();
        std::vector<int> nrad(L), wrad(L);
        for (size_t l = 0; l < L; ++l) {
            nrad[l] = legs()[l].fock_levels;
            wrad[l] = legs()[l].winding_size();
        }
        const long fd = fock_dim(legs());
        long pos = 0;
        std::vector<int> sec(L, 0), fock(L, 0);
        auto advance = [](std::vector<int>& v, const std::vector<int>& rad) {
            for (int i = static_cast<int>(v.size()) - 1; i >= 0; --i) {
                if (++v[i] < rad[i]) return true;
                v[i] = 0;
            }
            return false;
        };
        do {
            std::fill(fock.begin(), fock.end(), 0);
            do {
                long idx = 0;
                for (size_t l = 0; l < L; ++l) idx = (idx * nrad[l] + fock[l]) * wrad[l] + sec[l];
                perm_[pos++] = idx;
            } while (advance(fock, nrad));
        } while (advance(sec, wrad));
        (void)fd;
    }

    std::vector<Mat> blocks_;
    std::vector<long> perm_;
};

}  // namespace detail

using detail::NodePtr;

const Spaces& LinOp::legs() const { return node_->legs(); }

LinOp LinOp::identity(Spaces legs) {
    return LinOp(std::make_shared<detail::IdentityNode>(std::move(legs)));
}

LinOp LinOp::dense(Spaces legs, Mat m) {
    return LinOp(std::make_shared<detail::DenseNode>(std::move(legs), std::move(m)));
}

LinOp LinOp::sector_blocked(Spaces legs, std::vector<Mat> blocks) {
    return LinOp(std::make_shared<detail::SectorNode>(std::move(legs), std::move(blocks)));
}

LinOp LinOp::adjoint() const {
    if (auto a = std::dynamic_pointer_cast<const detail::AdjointNode>(node_))
        return LinOp(a->child());
    return LinOp(std::make_shared<detail::AdjointNode>(node_));
}

LinOp LinOp::operator*(const LinOp& rhs) const {
    if (!same_spaces(legs(), rhs.legs())) throw DimensionMismatch("product on mismatched spaces");
    return LinOp(std::make_shared<detail::ProductNode>(legs(), std::vector<NodePtr>{node_, rhs.node_}));
}

LinOp LinOp::operator+(const LinOp& rhs) const {
    if (!same_spaces(legs(), rhs.legs())) throw DimensionMismatch("sum on mismatched spaces");
    return LinOp(std::make_shared<detail::SumNode>(
        legs(), std::vector<std::pair<cplx, NodePtr>>{{1.0, node_}, {1.0, rhs.node_}}));
}

LinOp LinOp::operator-(const LinOp& rhs) const {
    if (!same_spaces(legs(), rhs.legs())) throw DimensionMismatch("difference on mismatched spaces");
    return LinOp(std::make_shared<detail::SumNode>(
        legs(), std::vector<std::pair<cplx, NodePtr>>{{1.0, node_}, {-1.0, rhs.node_}}));
}

LinOp operator*(cplx c, const LinOp& op) {
    return LinOp(std::make_shared<detail::SumNode>(
        op.legs(), std::vector<std::pair<cplx, NodePtr>>{{c, op.node_}}));
}

LinOp tensor(const LinOp& a, const LinOp& b) {
    Spaces legs = a.legs();
    legs.insert(legs.end(), b.legs().begin(), b.legs().end());
    return LinOp(std::make_shared<detail::TensorNode>(std::move(legs),
                                                      std::vector<NodePtr>{a.node_, b.node_}));
}

Vec LinOp::apply(const Vec& v) const {
    if (v.size() != dim()) throw DimensionMismatch("apply: vector does not match operator space");
    Vec out(dim());
    node_->apply(v, out, false);
    return out;
}

Mat LinOp::apply_many(const Mat& columns) const {
    if (columns.rows() != dim())
        throw DimensionMismatch("apply_many: columns do not match operator space");
    Mat out;
    node_->apply_many(columns, out, false);
    return out;
}

Mat LinOp::to_dense() const {
    const long d = dim();
    if (d > kDenseLimit)
        throw std::runtime_error("dense materialisation refused above dimension " +
                                 std::to_string(kDenseLimit));
    if (auto dn = std::dynamic_pointer_cast<const detail::DenseNode>(node_)) return dn->matrix();
    Mat m(d, d);
    Vec e = Vec::Zero(d), col(d);
    for (long j = 0; j < d; ++j) {
        e[j] = 1.0;
        node_->apply(e, col, false);
        m.col(j) = col;
        e[j] = 0.0;
    }
    return m;
}

Mat LinOp::sector_block(const std::vector<int>& sector) const {
    if (sector.size() != legs().size()) throw DimensionMismatch("sector index arity mismatch");
    return node_->sector_block(sector, false);
}

bool LinOp::sector_decomposable() const { return node_->sector_decomposable(); }

std::string LinOp::kind() const { return node_->kind(); }

double probe_residual(const LinOp& T, const LinOp& S, int probes, uint64_t seed, bool interior) {
    if (!same_spaces(T.legs(), S.legs()))
        throw DimensionMismatch("probe_residual: operators live on different spaces");
    if (probes < 1) throw std::invalid_argument("probe_residual: probes >= 1 required");
    ProbeRng rng(seed);
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        const Vec v = rng.unit_probe(T.legs(), interior);
        worst = std::max(worst, (T.apply(v) - S.apply(v)).norm());
    }
    return worst;
}

LinOp compact_sector(const LinOp& op) {
    if (op.legs().size() < 2 || !op.sector_decomposable()) return op;
    if (op.kind() == "sector_blocked") return op;
    std::vector<int> radix;
    for (const auto& l : op.legs()) radix.push_back(l.winding_size());
    long count = 1;
    for (const int w : radix) count *= w;
    std::vector<Mat> blocks;
    blocks.reserve(count);
    std::vector<int> sec(radix.size(), 0);
    for (long s = 0; s < count; ++s) {
        blocks.push_back(op.sector_block(sec));
        for (int i = static_cast<int>(sec.size()) - 1; i >= 0; --i) {
            if (++sec[i] < radix[i]) break;
            sec[i] = 0;
        }
    }
    return LinOp::sector_blocked(op.legs(), std::move(blocks));
}

LinOp winding_rotation(const LegSpace& leg) {
    Mat R = Mat::Zero(leg.dim(), leg.dim());
    for (int n = 0; n < leg.fock_levels; ++n)
        for (int k = 0; k < leg.winding_size(); ++k) R(leg.index(n, k + 1), leg.index(n, k)) = 1.0;
    return LinOp::dense({leg}, std::move(R));
}

bool winding_invariant(const LinOp& T, int probes, uint64_t seed, double tol) {
    const auto& legs = T.legs();
    for (size_t l = 0; l < legs.size(); ++l) {
        LinOp R;
        for (size_t j = 0; j < legs.size(); ++j) {
            LinOp f = (j == l) ? winding_rotation(legs[j]) : LinOp::identity({legs[j]});
            R = (j == 0) ? f : tensor(R, f);
        }
        if (probe_residual(T * R, R * T, probes, seed + l) > tol) return false;
    }
    return true;
}

double operator_norm(const Mat& m) {
    Eigen::BDCSVD<Mat> svd(m);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double operator_norm(const LinOp& T) { return operator_norm(T.to_dense()); }

}  // namespace qtwist
