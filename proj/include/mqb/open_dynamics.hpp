// open_dynamics.hpp — Lindblad propagation with per-mode thermal baths
//
//   d rho/dt = -(i/hbar)[H, rho]
//              + sum_j gamma_j ( (nbar_j+1) D[a_j] + nbar_j D[a_j^dag] ) rho,
//   D[L] rho = L rho L^dag - 1/2 {L^dag L, rho}.
//
// The density matrix is stored dense; the superoperator is never formed.
// Integration is embedded Dormand-Prince 4/5 on the matrix.

#pragma once

#include <vector>

#include "mqb/mqb_mapping.hpp"
#include "mqb/operator_matrix.hpp"
#include "mqb/trajectory.hpp"

namespace mqb {

struct DensityOperator {
    MatrixXcd rho;
    std::shared_ptr<const SpaceLayout> layout;

    // Hermitian to 1e-10, trace 1 +- 1e-8, smallest eigenvalue >= -1e-8
    // (positivity is monitored, not enforced).
    void validate() const;
};

DensityOperator pure_density(const VectorXcd& psi, std::shared_ptr<const SpaceLayout> layout);

// Precomputes the embedded jump operators once; rhs() may then be called
// repeatedly and is safe to share across threads (the column pass owns no
// shared mutable state).
class LindbladGenerator {
public:
    LindbladGenerator(OperatorMatrix h, BathSpec bath, std::shared_ptr<const SpaceLayout> layout);

    void rhs(const MatrixXcd& rho, MatrixXcd& out) const;
    // Naive dense implementation kept as the reference for tests/benchmarks.
    void rhs_serial_reference(const MatrixXcd& rho, MatrixXcd& out) const;

    const std::shared_ptr<const SpaceLayout>& layout() const { return layout_; }

private:
    OperatorMatrix h_;
    std::shared_ptr<const SpaceLayout> layout_;
    std::vector<double> gamma_, nbar_;
    std::vector<SparseCd> a_, adag_;
    std::vector<Eigen::VectorXd> diag_cool_, diag_heat_;  // diag(a^dag a), diag(a a^dag)
    Eigen::VectorXd w_diag_;  // summed anticommutator weights
};

// One-shot evaluation of the right-hand side.
MatrixXcd lindblad_rhs(const MatrixXcd& rho, const OperatorMatrix& h, const BathSpec& bath,
                       std::shared_ptr<const SpaceLayout> layout);

struct LindbladOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    double leak_threshold = default_leak_threshold;
    long max_steps = 50'000'000;
};

Trajectory propagate_lindblad(const DensityOperator& rho0, const OperatorMatrix& h,
                              const BathSpec& bath, const std::vector<double>& times_fs,
                              const LindbladOptions& opts = {});

// gamma_j = gamma0 * omega_j * exp(-omega_j / omega_cut). With omega in eV
// the couplings come out in 1/fs when gamma0 is in 1/(eV fs).
std::vector<double> ohmic_couplings(double gamma0, double omega_cut_ev,
                                    const std::vector<double>& omegas_ev);

// Single-broadband-cooling-laser model: all nbar set to zero and one common
// gamma (mean of the inputs unless given). Valid only while every nbar < 1.
struct BroadbandApprox {
    BathSpec bath;
    bool valid = true;
    double max_nbar = 0.0;
};

BroadbandApprox broadband_cooling_approx(const BathSpec& bath, double common_gamma = -1.0);

}  // namespace mqb
