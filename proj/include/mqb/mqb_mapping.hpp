// mqb_mapping.hpp — translation of VC models onto mixed qudit-boson hardware
//
// Parameter relations (per mode j, states n, m):
//   delta_j      = F * omega_j
//   Theta'_{n,j} = F * c1_j(n,n) / sqrt(2)     (tuning modes)
//   Omega'_{n,m,k} = F * c1_k(n,m) / sqrt(2)   (coupling modes, n != m)
//   chi_n        = 2 F * c0(n,n)
// Frequencies/rates on the hardware side are rad/fs, times fs; model-side
// energies are eV and are converted through hbar where the two meet.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mqb/operator_matrix.hpp"
#include "mqb/vc_model.hpp"

namespace mqb {

struct RoleAssignment {
    std::vector<bool> tuning;    // per mode
    std::vector<bool> coupling;  // per mode
};

// tuning where any diagonal c1 entry is nonzero, coupling where any
// off-diagonal entry is; an uncoupled mode defaults to tuning.
RoleAssignment auto_roles(const VCModel& model);

struct MQBParams {
    double f = 1.0;
    std::vector<double> delta;                // F-scaled eV, per mode
    Eigen::MatrixXd theta_prime;              // d x N
    std::vector<Eigen::MatrixXd> omega_prime; // per mode: d x d, zero diagonal
    std::vector<double> chi;                  // per state
    std::vector<int> tuning_set, coupling_set;
};

// Maps an LVC model (diagonal c0, no quadratic terms) at scale factor F.
// Pass roles to override auto-detection.
MQBParams map_to_mqb(const VCModel& model, double f,
                     const std::optional<RoleAssignment>& roles = std::nullopt);

// Eq.-8-form Hamiltonian from the parameters:
//   sum_j delta_j n_j + 1/2 sum_n chi_n |n><n|
//   + sum_{j in t} sum_n Theta'_{n,j} |n><n| (a+ + a)
//   + sum_{k in c} sum_{n<m} Omega'_{n,m,k} (|n><m| + |m><n|) (a+ + a).
// Equals F * (build_hamiltonian(model) - sum_j omega_j/2) entrywise.
OperatorMatrix assemble_mqb_hamiltonian(const MQBParams& params,
                                        std::shared_ptr<const SpaceLayout> layout);

struct HardwareSpec {
    double tau_d_fs = 0.0;        // decoherence time
    double max_coupling = 0.0;    // largest achievable Theta'/Omega' (rad/fs)
    double dt_sim_min_fs = 0.0;   // minimum realizable simulator timestep
    std::vector<double> eta;          // Lamb-Dicke parameters, per mode
    std::vector<double> debye_waller; // D', per mode
    double alpha = 0.4;           // angular factor (2/5 for dipole transitions)
    std::vector<double> omega_ion;    // trap frequencies (rad/fs), per mode
    double gamma_min = 0.0, gamma_max = 0.0;    // sideband linewidth range (rad/fs)
    double omega0_min = 0.0, omega0_max = 0.0;  // carrier Rabi range (rad/fs)

    void validate() const;
};

struct PhysicalDrives {
    Eigen::MatrixXd theta;               // d x N: Theta_{n,j} = 2 Theta'_{n,j}/(eta_j D'_j)
    std::vector<Eigen::MatrixXd> omega;  // per mode: Omega_{n,m,k} = 2 Omega'/(eta_k D'_k)
    double phi = 0.0, phi_m = 0.0, phi_s = 0.0;  // fixed to zero
};

PhysicalDrives laser_drive_requirements(const MQBParams& params, const HardwareSpec& hw);

struct ScaleFactorBounds {
    double f_min = 0.0;       // M * t_max / tau_d
    double f_max_coupling = 0.0;
    double f_max_timestep = 0.0;
    bool feasible = false;
    double recommended = 0.0;  // min of the two maxima
};

// dt_mol_fs is the acceptable molecular-scale timestep supplied by the caller.
ScaleFactorBounds scale_factor_bounds(double t_max_fs, const HardwareSpec& hw, int trotter_m,
                                      const VCModel& model, double dt_mol_fs);

struct InteractionCount {
    long formula = 0;  // N^k * d(d+1)/2
    long actual = 0;   // nonzero coefficients, upper-triangle state pairs
};

InteractionCount interaction_count(const VCModel& model, int order);

struct ResourceReport {
    int modes = 0, states = 0, basis = 20;
    long digital_qubits = 0;       // 8N + ceil(log2 d)
    long trapped_ions = 0;         // ceil(N/3), vibrational carriers only
    long qudit_carrier_ions = 1;   // reported separately from trapped_ions
    long resonators = 0;           // ceil(N/20)
    double classical_log10_bytes = 0.0;  // log10(16 * d * basis^N)
    std::string classical_bytes;         // scientific-notation string
};

ResourceReport resource_estimate(int n_modes, int d, int basis = 20);

// (exp(omega/kB T) - 1)^-1; returns 0 at T = 0.
double bose_einstein(double omega_ev, double temperature_k);

// Occupations depend only on omega/kB*T, so a simulation at molecular
// temperature T runs at simulator temperature F*T.
double simulator_temperature(double temperature_k, double f);

// ---- thermal baths ---------------------------------------------------------

struct CoolingRealization {
    double delta = 0.0;     // carrier detuning (rad/fs), negative = red
    double gamma_sb = 0.0;  // carrier linewidth Gamma_j (rad/fs)
    double omega0 = 0.0;    // carrier Rabi frequency (rad/fs)
    double eta = 0.0;
    double alpha = 0.4;
};

struct BathSpec {
    std::vector<double> gamma;  // 1/fs, molecular frame
    std::vector<double> nbar;
    double temperature_k = 0.0;
    std::vector<CoolingRealization> realization;  // per mode; empty if unsolved

    void validate() const;
};

// gamma is frame-scaled like the Hamiltonian; nbar is dimensionless.
BathSpec scale_bath(const BathSpec& bath, double f);

// Heating/cooling sideband rates:
//   A-+ = eta^2 Gamma (B(delta +- omega_ion) + alpha B(delta)),
//   B(x) = omega0^2 / (Gamma^2 + 4 x^2),
// with the sign pairing chosen so red detuning (delta < 0) gives net cooling
// (A- resonant at delta = -omega_ion).
struct SidebandRates {
    double a_minus = 0.0;
    double a_plus = 0.0;
};

SidebandRates cooling_rates(double eta, double gamma_sb, double delta, double omega0,
                            double alpha, double omega_ion);

// Solves (delta, Gamma, omega0) such that A- - A+ = target_gamma and
// A+/(A- - A+) = target_nbar for mode j of hw. Two stages: bisection in
// delta (scanning Gamma over the hardware range if needed) fixes nbar, then
// omega0 is read off gamma = omega0^2 * K. Enforces omega0/Gamma <= 0.1.
CoolingRealization solve_cooling_params(double target_gamma, double target_nbar,
                                        const HardwareSpec& hw, int mode);

}  // namespace mqb
