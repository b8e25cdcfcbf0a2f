// closed_dynamics.hpp — pure-state propagation, exact and analog-Trotterized
//
// Two Trotter schemes are implemented. With parts H_1..H_M on top of an
// always-on base H_0, one step of length dt is
//   rescaling:  prod_{k=1..M} exp(-i(H0/M + H_k) dt)   (k = 1 applied first)
//   rewinding:  exp(-i H0 dt) prod_k [ exp(+i H0 dt) exp(-i(H0 + H_k) dt) ]
// Observables are recorded at step boundaries only.

#pragma once

#include <vector>

#include "mqb/expm.hpp"
#include "mqb/trajectory.hpp"
#include "mqb/vc_model.hpp"

namespace mqb {

enum class TrotterScheme { rescaling, rewinding };

struct TrotterPlan {
    OperatorMatrix h0;                  // always-on base (eV)
    std::vector<OperatorMatrix> parts;  // H_1..H_M (eV)
    TrotterScheme scheme = TrotterScheme::rescaling;
    double dt_fs = 0.5;

    int num_parts() const { return static_cast<int>(parts.size()); }
    OperatorMatrix total() const;
    void validate() const;
};

struct ExactOptions {
    double rel_tol = 1e-10;
    double leak_threshold = default_leak_threshold;
    bool store_states = false;
};

struct TrotterOptions {
    double rel_tol = 1e-10;
    double leak_threshold = default_leak_threshold;
    bool store_states = false;
    // exact states at the step boundaries; when set, a fidelity series is
    // recorded against them
    const std::vector<VectorXcd>* reference_states = nullptr;
};

// psi(t) = e^{-iHt/hbar} psi0 evaluated at each grid point (fs). A state
// whose norm is off by less than 1e-6 is renormalized (flagged on the
// trajectory); a larger defect throws.
Trajectory propagate_exact(const OperatorMatrix& h, const VectorXcd& psi0,
                           const std::vector<double>& times_fs, const ExactOptions& opts = {});

Trajectory propagate_trotter(const TrotterPlan& plan, const VectorXcd& psi0, double t_final_fs,
                             const TrotterOptions& opts = {});

// |<a|b>|^2
double fidelity(const VectorXcd& psi_a, const VectorXcd& psi_b);

struct ScanRow {
    double dt_fs = 0.0;
    double max_pop_error = 0.0;
    double min_fidelity = 1.0;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    double fitted_order = 0.0;  // slope of log(1 - min fidelity) vs log(dt)
};

// Runs the plan at every dt in dt_list against the exact evolution of
// plan.total(). Requires at least three dt values spanning a decade.
ScanResult trotter_error_scan(const TrotterPlan& plan, const std::vector<double>& dt_list_fs,
                              double t_final_fs, const VectorXcd& psi0, double rel_tol = 1e-10);

struct SchemeComparison {
    std::vector<double> times_fs;
    std::vector<double> fidelity_rescaling;
    std::vector<double> fidelity_rewinding;
    double max_abs_difference = 0.0;
};

// Both plans must share dt and the same partition.
SchemeComparison compare_schemes(const TrotterPlan& plan_res, const TrotterPlan& plan_rew,
                                 const VectorXcd& psi0, double t_final_fs);

// The paper-style partition: H0 = sum_j omega_j n_j (always on); part j
// carries mode j's linear interaction terms plus a stark_weights[j] share of
// the electronic constant operator. Weights default to 1/N each. Quadratic
// terms of mode pair (j,k) are assigned to part max(j,k).
TrotterPlan per_mode_partition(const VCModel& model, std::shared_ptr<const SpaceLayout> layout,
                               TrotterScheme scheme, double dt_fs,
                               std::vector<double> stark_weights = {});

}  // namespace mqb
