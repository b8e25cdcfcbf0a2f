// operator_matrix.hpp — sparse complex operators on truncated qudit/Fock spaces
//
// OperatorMatrix wraps compressed-column complex storage plus an optional
// SpaceLayout describing the full product space. Operators are immutable
// after construction and safe to share across threads. Dimensions below
// dense_storage_limit keep a dense mirror and apply through it.

#pragma once

#include <complex>
#include <memory>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mqb/constants.hpp"
#include "mqb/space_layout.hpp"

namespace mqb {

using cd = std::complex<double>;
using SparseCd = Eigen::SparseMatrix<cd>;
using VectorXcd = Eigen::VectorXcd;
using MatrixXcd = Eigen::MatrixXcd;

class OperatorMatrix {
public:
    OperatorMatrix() = default;
    explicit OperatorMatrix(SparseCd m);
    OperatorMatrix(SparseCd m, std::shared_ptr<const SpaceLayout> layout);

    long dim() const { return sparse_.rows(); }
    long nonzeros() const { return sparse_.nonZeros(); }
    const SparseCd& sparse() const { return sparse_; }
    MatrixXcd dense() const { return MatrixXcd(sparse_); }

    const std::shared_ptr<const SpaceLayout>& layout() const { return layout_; }
    bool has_layout() const { return layout_ != nullptr; }

    // max |H - H^dag| over all entries.
    double hermiticity_defect() const;
    double max_abs() const;

    // Flags the operator Hermitian after verifying
    // max|H - H^dag| <= 1e-12 * max|H|. Throws otherwise.
    OperatorMatrix& set_hermitian();
    bool is_hermitian_flagged() const { return hermitian_; }
    // Hermitian within the standard tolerance (uses the flag when set).
    bool check_hermitian() const;

    OperatorMatrix adjoint() const;
    cd trace() const;
    double inf_norm() const;

    // y = A x. Uses the dense mirror below dense_storage_limit, the
    // Hermitian gather kernel when flagged, and the scatter kernel otherwise.
    void apply(const cd* x, cd* y) const;
    VectorXcd apply(const VectorXcd& x) const;

    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(cd scale, const OperatorMatrix& a);
    friend OperatorMatrix operator*(double scale, const OperatorMatrix& a);
    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);

private:
    void finalize();
    static std::shared_ptr<const SpaceLayout> merge_layouts(const OperatorMatrix& a,
                                                            const OperatorMatrix& b);

    SparseCd sparse_;
    std::optional<MatrixXcd> dense_;  // mirror for small dimensions
    std::shared_ptr<const SpaceLayout> layout_;
    bool hermitian_ = false;
};

// ---- elementary operators -------------------------------------------------

// Annihilation operator on an n_max-level Fock space: sqrt(n) on the
// (n-1, n) superdiagonal. n_max < 2 is an invalid truncation.
OperatorMatrix annihilation(int n_max);
OperatorMatrix creation(int n_max);
OperatorMatrix number_operator(int n_max);

// Q = (a^dag + a)/sqrt(2), P = i(a^dag - a)/sqrt(2); both Hermitian.
OperatorMatrix position_q(int n_max);
OperatorMatrix momentum_p(int n_max);

// |n><m| on a d-level qudit.
OperatorMatrix qudit_projector(int n, int m, int d);
// sigma_z = |0><0| - |1><1|, sigma_x = |0><1| + |1><0| (two-level forms).
OperatorMatrix sigma_z();
OperatorMatrix sigma_x();

OperatorMatrix identity_op(long dim);

// Kronecker embedding of a single-factor operator into the full product
// space, identities on all other factors. Factor 0 is the qudit; factor
// f in [1, N] is mode f-1.
OperatorMatrix embed(const OperatorMatrix& op, int factor_index,
                     std::shared_ptr<const SpaceLayout> layout);
OperatorMatrix embed_qudit(const OperatorMatrix& op, std::shared_ptr<const SpaceLayout> layout);
OperatorMatrix embed_mode(const OperatorMatrix& op, int mode,
                          std::shared_ptr<const SpaceLayout> layout);

}  // namespace mqb
