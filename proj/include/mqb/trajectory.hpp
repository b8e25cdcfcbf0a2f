// trajectory.hpp — time series of observables plus optional state snapshots

#pragma once

#include <vector>

#include "mqb/operator_matrix.hpp"

namespace mqb {

struct Trajectory {
    std::vector<double> times;                     // fs
    std::vector<std::vector<double>> populations;  // [state][step]
    std::vector<std::vector<double>> q_expect;     // [mode][step]
    std::vector<std::vector<double>> p_expect;     // [mode][step]
    std::vector<std::vector<double>> n_expect;     // [mode][step], <a+ a>

    std::vector<double> fidelity;                  // empty when no reference
    std::vector<double> leakage;                   // max over modes of top-level population
    std::vector<double> purity;                    // density runs only
    std::vector<double> trace_error;               // density runs only
    std::vector<VectorXcd> snapshots;              // empty unless requested
    bool leakage_warning = false;
    bool renormalized_input = false;

    int num_states() const { return static_cast<int>(populations.size()); }
    int num_modes() const { return static_cast<int>(q_expect.size()); }
    std::size_t size() const { return times.size(); }
};

// Precomputed measurement operators for one layout. Populations and leakage
// are read off the basis directly; Q/P go through the embedded sparse
// operators.
class ObservableSet {
public:
    explicit ObservableSet(std::shared_ptr<const SpaceLayout> layout);

    std::vector<double> populations(const VectorXcd& psi) const;
    double leakage(const VectorXcd& psi) const;
    void record(const VectorXcd& psi, double t_fs, Trajectory& traj) const;

    std::vector<double> populations(const MatrixXcd& rho) const;
    double leakage(const MatrixXcd& rho) const;
    void record(const MatrixXcd& rho, double t_fs, Trajectory& traj) const;

    const std::shared_ptr<const SpaceLayout>& layout() const { return layout_; }

private:
    std::shared_ptr<const SpaceLayout> layout_;
    std::vector<OperatorMatrix> q_ops_, p_ops_;
};

}  // namespace mqb
