// kernels.hpp — low-level products on compressed-column storage
//
// Every kernel comes in a serial reference version and an OpenMP version.
// The parallel versions distribute whole output rows/columns across threads,
// so each output element is accumulated in a fixed serial order and results
// are bit-identical for any thread count. The serial scatter forms are the
// reference implementations used by the tests and the benchmark.

#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace mqb::kernels {

using cd = std::complex<double>;
using SparseCd = Eigen::SparseMatrix<cd>;  // compressed column storage
using MatrixXcd = Eigen::MatrixXcd;

// Process-wide switch consulted by the production entry points. The _serial /
// _parallel kernels themselves ignore it.
void set_parallel_enabled(bool enabled);
bool parallel_enabled();

// ---- sparse * vector ---------------------------------------------------

// y = A x, classic CSC column scatter. Reference implementation.
void spmv_serial(const SparseCd& a, const cd* x, cd* y);

// y = H x for Hermitian H: row i of H is the conjugate of column i, so each
// y[i] is an independent gather over column i.
void spmv_hermitian_serial(const SparseCd& h, const cd* x, cd* y);
void spmv_hermitian_parallel(const SparseCd& h, const cd* x, cd* y);

// Production dispatch (Hermitian path; falls back to scatter when hermitian
// is false).
void spmv(const SparseCd& a, bool hermitian, const cd* x, cd* y);

// ---- sparse * dense / dense * sparse ------------------------------------

// C = A B with sparse A: column c of C depends only on column c of B.
void spmm_left_serial(const SparseCd& a, const MatrixXcd& b, MatrixXcd& c);
void spmm_left_parallel(const SparseCd& a, const MatrixXcd& b, MatrixXcd& c);

// C = B A with sparse A: column c of C combines columns of B selected by
// column c of A.
void spmm_right_serial(const MatrixXcd& b, const SparseCd& a, MatrixXcd& c);
void spmm_right_parallel(const MatrixXcd& b, const SparseCd& a, MatrixXcd& c);

void spmm_left(const SparseCd& a, const MatrixXcd& b, MatrixXcd& c);
void spmm_right(const MatrixXcd& b, const SparseCd& a, MatrixXcd& c);

// ---- small helpers -------------------------------------------------------

// max_i sum_j |A_ij|, an upper bound on the spectral radius.
double inf_norm(const SparseCd& a);

// tr(rho * A) accumulated over the nonzeros of A.
cd trace_product(const MatrixXcd& rho, const SparseCd& a);

}  // namespace mqb::kernels
