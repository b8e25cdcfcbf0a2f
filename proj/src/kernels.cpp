#include "mqb/kernels.hpp"

#include <atomic>
#include <algorithm>
#include <vector>
#include <stdexcept>

namespace mqb::kernels {

namespace {
std::atomic<bool> g_parallel{true};
}

void set_parallel_enabled(bool enabled) { g_parallel.store(enabled); }
bool parallel_enabled() { return g_parallel.load(); }

void spmv_serial(const SparseCd& a, const cd* x, cd* y) {
    const long n = a.rows();
    std::fill(y, y + n, cd(0.0, 0.0));
    const auto* outer = a.outerIndexPtr();
    const auto* inner = a.innerIndexPtr();
    const auto* vals = a.valuePtr();
    for (long col = 0; col < a.cols(); ++col) {
        const cd xc = x[col];
        if (xc == cd(0.0, 0.0)) continue;
        for (auto p = outer[col]; p < outer[col + 1]; ++p) y[inner[p]] += vals[p] * xc;
    }
}

void spmv_hermitian_serial(const SparseCd& h, const cd* x, cd* y) {
    const auto* outer = h.outerIndexPtr();
    const auto* inner = h.innerIndexPtr();
    const auto* vals = h.valuePtr();
    const long n = h.rows();
    for (long i = 0; i < n; ++i) {
        cd acc(0.0, 0.0);
        for (auto p = outer[i]; p < outer[i + 1]; ++p)
            acc += std::conj(vals[p]) * x[inner[p]];
        y[i] = acc;
    }
}

void spmv_hermitian_parallel(const SparseCd& h, const cd* x, cd* y) {
    const auto* outer = h.outerIndexPtr();
    const auto* inner = h.innerIndexPtr();
    const auto* vals = h.valuePtr();
    const long n = h.rows();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        cd acc(0.0, 0.0);
        for (auto p = outer[i]; p < outer[i + 1]; ++p)
            acc += std::conj(vals[p]) * x[inner[p]];
        y[i] = acc;
    }
}

void spmv(const SparseCd& a, bool hermitian, const cd* x, cd* y) {
    // below a few thousand rows the fork-join overhead exceeds the row work
    constexpr long parallel_min_rows = 4096;
    if (hermitian) {
        if (g_parallel.load() && a.rows() >= parallel_min_rows)
            spmv_hermitian_parallel(a, x, y);
        else
            spmv_hermitian_serial(a, x, y);
    } else {
        spmv_serial(a, x, y);
    }
}

void spmm_left_serial(const SparseCd& a, const MatrixXcd& b, MatrixXcd& c) {
    const long n = a.rows();
    c.resize(n, b.cols());
    for (long col = 0; col < b.cols(); ++col)
        spmv_serial(a, b.col(col).data(), c.col(col).data());
}

void spmm_left_parallel(const SparseCd& a, const MatrixXcd& b, MatrixXcd& c) {
    const long n = a.rows();
    c.resize(n, b.cols());
    const long nc = b.cols();
#pragma omp parallel for schedule(static)
    for (long col = 0; col < nc; ++col)
        spmv_serial(a, b.col(col).data(), c.col(col).data());
}

void spmm_right_serial(const MatrixXcd& b, const SparseCd& a, MatrixXcd& c) {
    const long n = b.rows();
    c.setZero(n, a.cols());
    const auto* outer = a.outerIndexPtr();
    const auto* inner = a.innerIndexPtr();
    const auto* vals = a.valuePtr();
    for (long col = 0; col < a.cols(); ++col)
        for (auto p = outer[col]; p < outer[col + 1]; ++p)
            c.col(col) += vals[p] * b.col(inner[p]);
}

void spmm_right_parallel(const MatrixXcd& b, const SparseCd& a, MatrixXcd& c) {
    const long n = b.rows();
    c.setZero(n, a.cols());
    const auto* outer = a.outerIndexPtr();
    const auto* inner = a.innerIndexPtr();
    const auto* vals = a.valuePtr();
    const long nc = a.cols();
#pragma omp parallel for schedule(static)
    for (long col = 0; col < nc; ++col)
        for (auto p = outer[col]; p < outer[col + 1]; ++p)
            c.col(col) += vals[p] * b.col(inner[p]);
}

void spmm_left(const SparseCd& a, const MatrixXcd& b, MatrixXcd& c) {
    if (g_parallel.load())
        spmm_left_parallel(a, b, c);
    else
        spmm_left_serial(a, b, c);
}

void spmm_right(const MatrixXcd& b, const SparseCd& a, MatrixXcd& c) {
    if (g_parallel.load())
        spmm_right_parallel(b, a, c);
    else
        spmm_right_serial(b, a, c);
}

double inf_norm(const SparseCd& a) {
    std::vector<double> row_sums(static_cast<std::size_t>(a.rows()), 0.0);
    const auto* outer = a.outerIndexPtr();
    const auto* inner = a.innerIndexPtr();
    const auto* vals = a.valuePtr();
    for (long col = 0; col < a.cols(); ++col)
        for (auto p = outer[col]; p < outer[col + 1]; ++p)
            row_sums[static_cast<std::size_t>(inner[p])] += std::abs(vals[p]);
    double m = 0.0;
    for (double s : row_sums) m = std::max(m, s);
    return m;
}

cd trace_product(const MatrixXcd& rho, const SparseCd& a) {
    if (rho.rows() != a.cols() || rho.cols() != a.rows())
        throw std::invalid_argument("trace_product: dimension mismatch");
    cd acc(0.0, 0.0);
    const auto* outer = a.outerIndexPtr();
    const auto* inner = a.innerIndexPtr();
    const auto* vals = a.valuePtr();
    // tr(rho A) = sum_{ij} rho_ij A_ji
    for (long j = 0; j < a.cols(); ++j)
        for (auto p = outer[j]; p < outer[j + 1]; ++p)
            acc += rho(j, inner[p]) * vals[p];
    return acc;
}

}  // namespace mqb::kernels
