#include "mqb/operator_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "mqb/kernels.hpp"

namespace mqb {

OperatorMatrix::OperatorMatrix(SparseCd m) : sparse_(std::move(m)) { finalize(); }

OperatorMatrix::OperatorMatrix(SparseCd m, std::shared_ptr<const SpaceLayout> layout)
    : sparse_(std::move(m)), layout_(std::move(layout)) {
    if (layout_ && layout_->dim() != sparse_.rows())
        throw std::invalid_argument("OperatorMatrix: dimension does not match layout");
    finalize();
}

void OperatorMatrix::finalize() {
    if (sparse_.rows() != sparse_.cols())
        throw std::invalid_argument("OperatorMatrix: matrix must be square");
    sparse_.prune([](const Eigen::Index&, const Eigen::Index&, const cd& v) {
        return v != cd(0.0, 0.0);
    });
    sparse_.makeCompressed();
    if (sparse_.rows() < dense_storage_limit) dense_ = MatrixXcd(sparse_);
}

double OperatorMatrix::hermiticity_defect() const {
    SparseCd diff = SparseCd(sparse_.adjoint()) - sparse_;
    double m = 0.0;
    for (long k = 0; k < diff.nonZeros(); ++k)
        m = std::max(m, std::abs(diff.valuePtr()[k]));
    return m;
}

double OperatorMatrix::max_abs() const {
    double m = 0.0;
    for (long k = 0; k < sparse_.nonZeros(); ++k)
        m = std::max(m, std::abs(sparse_.valuePtr()[k]));
    return m;
}

OperatorMatrix& OperatorMatrix::set_hermitian() {
    const double scale = max_abs();
    if (hermiticity_defect() > 1e-12 * (scale > 0.0 ? scale : 1.0))
        throw std::invalid_argument("OperatorMatrix: matrix is not Hermitian");
    hermitian_ = true;
    return *this;
}

bool OperatorMatrix::check_hermitian() const {
    if (hermitian_) return true;
    const double scale = max_abs();
    return hermiticity_defect() <= 1e-12 * (scale > 0.0 ? scale : 1.0);
}

OperatorMatrix OperatorMatrix::adjoint() const {
    OperatorMatrix out(SparseCd(sparse_.adjoint()), layout_);
    out.hermitian_ = hermitian_;
    return out;
}

cd OperatorMatrix::trace() const {
    cd acc(0.0, 0.0);
    for (long c = 0; c < sparse_.outerSize(); ++c)
        for (SparseCd::InnerIterator it(sparse_, c); it; ++it)
            if (it.row() == it.col()) acc += it.value();
    return acc;
}

double OperatorMatrix::inf_norm() const { return kernels::inf_norm(sparse_); }

void OperatorMatrix::apply(const cd* x, cd* y) const {
    if (dense_) {
        Eigen::Map<const VectorXcd> xv(x, dim());
        Eigen::Map<VectorXcd> yv(y, dim());
        yv.noalias() = (*dense_) * xv;
        return;
    }
    kernels::spmv(sparse_, hermitian_, x, y);
}

VectorXcd OperatorMatrix::apply(const VectorXcd& x) const {
    if (x.size() != dim())
        throw std::invalid_argument("OperatorMatrix::apply: vector dimension mismatch");
    VectorXcd y(dim());
    apply(x.data(), y.data());
    return y;
}

std::shared_ptr<const SpaceLayout> OperatorMatrix::merge_layouts(const OperatorMatrix& a,
                                                                 const OperatorMatrix& b) {
    if (a.layout_ && b.layout_ && *a.layout_ != *b.layout_)
        throw std::invalid_argument("OperatorMatrix: operands carry different layouts");
    return a.layout_ ? a.layout_ : b.layout_;
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("OperatorMatrix: dimension mismatch in sum");
    OperatorMatrix out(SparseCd(a.sparse_ + b.sparse_), OperatorMatrix::merge_layouts(a, b));
    out.hermitian_ = a.hermitian_ && b.hermitian_;
    return out;
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("OperatorMatrix: dimension mismatch in difference");
    OperatorMatrix out(SparseCd(a.sparse_ - b.sparse_), OperatorMatrix::merge_layouts(a, b));
    out.hermitian_ = a.hermitian_ && b.hermitian_;
    return out;
}

OperatorMatrix operator*(cd scale, const OperatorMatrix& a) {
    OperatorMatrix out(SparseCd(scale * a.sparse_), a.layout_);
    out.hermitian_ = a.hermitian_ && scale.imag() == 0.0;
    return out;
}

OperatorMatrix operator*(double scale, const OperatorMatrix& a) {
    return cd(scale, 0.0) * a;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("OperatorMatrix: dimension mismatch in product");
    return OperatorMatrix(SparseCd(a.sparse_ * b.sparse_),
                          OperatorMatrix::merge_layouts(a, b));
}

// ---- elementary operators -------------------------------------------------

OperatorMatrix annihilation(int n_max) {
    if (n_max < 2) throw std::invalid_argument("annihilation: truncation must be >= 2");
    SparseCd m(n_max, n_max);
    m.reserve(Eigen::VectorXi::Constant(n_max, 1));
    for (int n = 1; n < n_max; ++n) m.insert(n - 1, n) = std::sqrt(static_cast<double>(n));
    return OperatorMatrix(std::move(m));
}

OperatorMatrix creation(int n_max) { return annihilation(n_max).adjoint(); }

OperatorMatrix number_operator(int n_max) {
    if (n_max < 2) throw std::invalid_argument("number_operator: truncation must be >= 2");
    SparseCd m(n_max, n_max);
    m.reserve(Eigen::VectorXi::Constant(n_max, 1));
    for (int n = 0; n < n_max; ++n) m.insert(n, n) = static_cast<double>(n);
    OperatorMatrix out(std::move(m));
    out.set_hermitian();
    return out;
}

OperatorMatrix position_q(int n_max) {
    if (n_max < 2) throw std::invalid_argument("position_q: truncation must be >= 2");
    const double s = 1.0 / std::sqrt(2.0);
    SparseCd m(n_max, n_max);
    m.reserve(Eigen::VectorXi::Constant(n_max, 2));
    for (int n = 1; n < n_max; ++n) {
        const double v = s * std::sqrt(static_cast<double>(n));
        m.insert(n - 1, n) = v;
        m.insert(n, n - 1) = v;
    }
    OperatorMatrix out(std::move(m));
    out.set_hermitian();
    return out;
}

OperatorMatrix momentum_p(int n_max) {
    if (n_max < 2) throw std::invalid_argument("momentum_p: truncation must be >= 2");
    const double s = 1.0 / std::sqrt(2.0);
    SparseCd m(n_max, n_max);
    m.reserve(Eigen::VectorXi::Constant(n_max, 2));
    for (int n = 1; n < n_max; ++n) {
        const double v = s * std::sqrt(static_cast<double>(n));
        m.insert(n - 1, n) = cd(0.0, -v);  // i(a^dag - a)/sqrt(2)
        m.insert(n, n - 1) = cd(0.0, v);
    }
    OperatorMatrix out(std::move(m));
    out.set_hermitian();
    return out;
}

OperatorMatrix qudit_projector(int n, int m, int d) {
    if (n < 0 || m < 0 || n >= d || m >= d)
        throw std::out_of_range("qudit_projector: state index out of range");
    SparseCd mat(d, d);
    mat.insert(n, m) = 1.0;
    return OperatorMatrix(std::move(mat));
}

OperatorMatrix sigma_z() {
    OperatorMatrix out = qudit_projector(0, 0, 2) - qudit_projector(1, 1, 2);
    out.set_hermitian();
    return out;
}

OperatorMatrix sigma_x() {
    OperatorMatrix out = qudit_projector(0, 1, 2) + qudit_projector(1, 0, 2);
    out.set_hermitian();
    return out;
}

OperatorMatrix identity_op(long dim) {
    SparseCd m(dim, dim);
    m.setIdentity();
    OperatorMatrix out(std::move(m));
    out.set_hermitian();
    return out;
}

OperatorMatrix embed(const OperatorMatrix& op, int factor_index,
                     std::shared_ptr<const SpaceLayout> layout) {
    if (!layout) throw std::invalid_argument("embed: layout is required");
    const int f = factor_index;
    if (f < 0 || f >= layout->num_factors())
        throw std::out_of_range("embed: factor index out of range");
    if (op.dim() != layout->factor_dim(f))
        throw std::invalid_argument("embed: operator dimension " + std::to_string(op.dim()) +
                                    " does not match factor dimension " +
                                    std::to_string(layout->factor_dim(f)));
    long pre = 1, post = 1;
    for (int g = 0; g < f; ++g) pre *= layout->factor_dim(g);
    for (int g = f + 1; g < layout->num_factors(); ++g) post *= layout->factor_dim(g);

    SparseCd eye_pre(pre, pre), eye_post(post, post);
    eye_pre.setIdentity();
    eye_post.setIdentity();
    SparseCd tmp = Eigen::kroneckerProduct(eye_pre, op.sparse()).eval();
    SparseCd full = Eigen::kroneckerProduct(tmp, eye_post).eval();
    OperatorMatrix out(std::move(full), std::move(layout));
    if (op.is_hermitian_flagged()) out.set_hermitian();
    return out;
}

OperatorMatrix embed_qudit(const OperatorMatrix& op, std::shared_ptr<const SpaceLayout> layout) {
    return embed(op, 0, std::move(layout));
}

OperatorMatrix embed_mode(const OperatorMatrix& op, int mode,
                          std::shared_ptr<const SpaceLayout> layout) {
    if (!layout) throw std::invalid_argument("embed_mode: layout is required");
    if (mode < 0 || mode >= layout->num_modes())
        throw std::out_of_range("embed_mode: mode index out of range");
    return embed(op, mode + 1, std::move(layout));
}

}  // namespace mqb
