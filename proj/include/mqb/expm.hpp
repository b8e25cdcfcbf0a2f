// expm.hpp — action of e^{-iHt} on a state vector
//
// Hermitian Lanczos with adaptive substepping; a dense eigendecomposition
// path is used only below dense_propagation_limit. Memory stays proportional
// to the state (times the Krylov width), never to the matrix square.

#pragma once

#include "mqb/operator_matrix.hpp"

namespace mqb {

// Returns e^{-iHt} * state for Hermitian H. `t` is in inverse-energy units
// (i.e. the caller supplies t_fs / hbar when H is in eV). Relative accuracy
// of the result is rel_tol; the 2-norm is preserved to the same order.
// Throws std::invalid_argument for non-Hermitian H and NumericError for
// non-finite input.
VectorXcd matrix_exponential_apply(const OperatorMatrix& h, const VectorXcd& state,
                                   double t, double rel_tol = 1e-10);

// Repeated evolutions under one fixed H. Below dense_propagation_limit the
// eigendecomposition is computed once and reused; above it every call runs
// the Lanczos path.
class Propagator {
public:
    explicit Propagator(OperatorMatrix h, double rel_tol = 1e-10);

    // e^{-iHt} psi with t in inverse-energy units.
    VectorXcd evolve(const VectorXcd& psi, double t) const;
    // Convenience for eV/fs units: e^{-iH t_fs/hbar} psi.
    VectorXcd evolve_fs(const VectorXcd& psi, double t_fs) const;

    const OperatorMatrix& hamiltonian() const { return h_; }

private:
    OperatorMatrix h_;
    double tol_;
    bool dense_path_ = false;
    bool diag_path_ = false;
    Eigen::VectorXd evals_;
    MatrixXcd evecs_;
    Eigen::VectorXd diag_;
};

}  // namespace mqb
