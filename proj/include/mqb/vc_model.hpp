// vc_model.hpp — vibronic-coupling models and their operator form
//
// A VCModel holds the power-series expansion of the diabatic potential
// matrix: constant terms c0, linear terms c1 per mode, optional quadratic
// terms c2 per mode pair. All coefficients are real and symmetric in the
// electronic indices; energies are eV.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mqb/operator_matrix.hpp"

namespace mqb {

struct VCModel {
    int d = 0;
    int num_modes = 0;
    std::vector<double> omega;           // eV, size N
    Eigen::MatrixXd c0;                  // d x d, symmetric
    std::vector<Eigen::MatrixXd> c1;     // N entries, each d x d symmetric
    std::vector<Eigen::MatrixXd> c2;     // N*N entries (j*N+k) or empty for LVC
    std::vector<std::string> state_labels;
    std::vector<std::string> mode_labels;

    bool has_quadratic() const;
    const Eigen::MatrixXd& c2_at(int j, int k) const { return c2[static_cast<std::size_t>(j * num_modes + k)]; }
    Eigen::MatrixXd& c2_at(int j, int k) { return c2[static_cast<std::size_t>(j * num_modes + k)]; }

    // Throws std::invalid_argument naming the offending entry.
    void validate() const;
};

// Two-state Pauli parameterization of an LVC model:
//   H = 1/2 sum_j w_j(Q^2+P^2) - 1/2 dE sz + W0 sx
//       + sum_j (kappa_bar_j - 1/2 dkappa_j sz + lambda_j sx) Q_j
struct TwoStateLVCParams {
    double delta_e = 0.0;  // c0(1,1) - c0(0,0)
    double w0 = 0.0;       // c0(0,1)
    std::vector<double> kappa_bar;    // (c1_j(1,1)+c1_j(0,0))/2
    std::vector<double> delta_kappa;  // c1_j(1,1)-c1_j(0,0)
    std::vector<double> lambda;       // c1_j(0,1)
};

// H = sum_j w_j(n_j + 1/2) + sum_{n,m} C_{n,m} |n><m| with C truncated at
// second order. The oscillator term uses the number operator, which agrees
// with (Q^2+P^2)/2 everywhere below the top truncation level and keeps the
// exact harmonic spectrum on the retained levels.
OperatorMatrix build_hamiltonian(const VCModel& model, std::shared_ptr<const SpaceLayout> layout);

// Requires d = 2 and no quadratic terms.
TwoStateLVCParams pauli_form(const VCModel& model);

// Rebuild an LVC model from Pauli parameters; the global constant
// (c0(0,0)+c0(1,1))/2 of the source model is not recoverable.
VCModel lvc_from_pauli(const TwoStateLVCParams& params, const std::vector<double>& omega);

// Coherent displacement of the model along mode k by beta: Q_k -> Q_k - beta
// applied to the coefficient tensors. Electronic-identity constants produced
// by the displacement (the omega*beta^2/2 term and the trace of the c0
// update) are dropped.
VCModel displace_model(const VCModel& model, int mode_k, double beta);

// exp(-i beta P_k) |psi>, the state-side counterpart of displace_model.
VectorXcd displace_state(const VectorXcd& state, int mode_k, double beta,
                         std::shared_ptr<const SpaceLayout> layout);

// |electronic_index> (x) |0...0>
VectorXcd franck_condon_state(std::shared_ptr<const SpaceLayout> layout, int electronic_index);

}  // namespace mqb
