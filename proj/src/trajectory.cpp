#include "mqb/trajectory.hpp"

#include <cmath>

#include "mqb/kernels.hpp"

namespace mqb {

ObservableSet::ObservableSet(std::shared_ptr<const SpaceLayout> layout)
    : layout_(std::move(layout)) {
    if (!layout_) throw std::invalid_argument("ObservableSet: layout is required");
    for (int j = 0; j < layout_->num_modes(); ++j) {
        q_ops_.push_back(embed_mode(position_q(layout_->truncation(j)), j, layout_));
        p_ops_.push_back(embed_mode(momentum_p(layout_->truncation(j)), j, layout_));
    }
}

std::vector<double> ObservableSet::populations(const VectorXcd& psi) const {
    // qudit index is slowest: each electronic state owns one contiguous block
    const long block = layout_->dim() / layout_->qudit_levels();
    std::vector<double> pops(static_cast<std::size_t>(layout_->qudit_levels()), 0.0);
    for (int n = 0; n < layout_->qudit_levels(); ++n)
        pops[static_cast<std::size_t>(n)] = psi.segment(n * block, block).squaredNorm();
    return pops;
}

double ObservableSet::leakage(const VectorXcd& psi) const {
    double worst = 0.0;
    for (int j = 0; j < layout_->num_modes(); ++j) {
        const int top = layout_->truncation(j) - 1;
        double pop = 0.0;
        for (long i = 0; i < layout_->dim(); ++i)
            if (layout_->fock_index_of(i, j) == top) pop += std::norm(psi(i));
        worst = std::max(worst, pop);
    }
    return worst;
}

void ObservableSet::record(const VectorXcd& psi, double t_fs, Trajectory& traj) const {
    if (traj.populations.empty()) {
        traj.populations.resize(static_cast<std::size_t>(layout_->qudit_levels()));
        traj.q_expect.resize(static_cast<std::size_t>(layout_->num_modes()));
        traj.p_expect.resize(static_cast<std::size_t>(layout_->num_modes()));
        traj.n_expect.resize(static_cast<std::size_t>(layout_->num_modes()));
    }
    traj.times.push_back(t_fs);
    const auto pops = populations(psi);
    for (std::size_t n = 0; n < pops.size(); ++n) traj.populations[n].push_back(pops[n]);
    for (int j = 0; j < layout_->num_modes(); ++j) {
        traj.q_expect[static_cast<std::size_t>(j)].push_back(
            std::real(psi.dot(q_ops_[static_cast<std::size_t>(j)].apply(psi))));
        traj.p_expect[static_cast<std::size_t>(j)].push_back(
            std::real(psi.dot(p_ops_[static_cast<std::size_t>(j)].apply(psi))));
        double occ = 0.0;
        for (long i = 0; i < layout_->dim(); ++i)
            occ += layout_->fock_index_of(i, j) * std::norm(psi(i));
        traj.n_expect[static_cast<std::size_t>(j)].push_back(occ);
    }
    traj.leakage.push_back(leakage(psi));
}

std::vector<double> ObservableSet::populations(const MatrixXcd& rho) const {
    const long block = layout_->dim() / layout_->qudit_levels();
    std::vector<double> pops(static_cast<std::size_t>(layout_->qudit_levels()), 0.0);
    for (int n = 0; n < layout_->qudit_levels(); ++n) {
        double acc = 0.0;
        for (long i = n * block; i < (n + 1) * block; ++i) acc += std::real(rho(i, i));
        pops[static_cast<std::size_t>(n)] = acc;
    }
    return pops;
}

double ObservableSet::leakage(const MatrixXcd& rho) const {
    double worst = 0.0;
    for (int j = 0; j < layout_->num_modes(); ++j) {
        const int top = layout_->truncation(j) - 1;
        double pop = 0.0;
        for (long i = 0; i < layout_->dim(); ++i)
            if (layout_->fock_index_of(i, j) == top) pop += std::real(rho(i, i));
        worst = std::max(worst, pop);
    }
    return worst;
}

void ObservableSet::record(const MatrixXcd& rho, double t_fs, Trajectory& traj) const {
    if (traj.populations.empty()) {
        traj.populations.resize(static_cast<std::size_t>(layout_->qudit_levels()));
        traj.q_expect.resize(static_cast<std::size_t>(layout_->num_modes()));
        traj.p_expect.resize(static_cast<std::size_t>(layout_->num_modes()));
        traj.n_expect.resize(static_cast<std::size_t>(layout_->num_modes()));
    }
    traj.times.push_back(t_fs);
    const auto pops = populations(rho);
    for (std::size_t n = 0; n < pops.size(); ++n) traj.populations[n].push_back(pops[n]);
    for (int j = 0; j < layout_->num_modes(); ++j) {
        traj.q_expect[static_cast<std::size_t>(j)].push_back(
            std::real(kernels::trace_product(rho, q_ops_[static_cast<std::size_t>(j)].sparse())));
        traj.p_expect[static_cast<std::size_t>(j)].push_back(
            std::real(kernels::trace_product(rho, p_ops_[static_cast<std::size_t>(j)].sparse())));
        double occ = 0.0;
        for (long i = 0; i < layout_->dim(); ++i)
            occ += layout_->fock_index_of(i, j) * std::real(rho(i, i));
        traj.n_expect[static_cast<std::size_t>(j)].push_back(occ);
    }
    traj.leakage.push_back(leakage(rho));
    traj.purity.push_back(rho.squaredNorm());  // tr(rho^2) for Hermitian rho
    traj.trace_error.push_back(std::abs(std::real(rho.trace()) - 1.0) +
                               std::abs(std::imag(rho.trace())));
}

}  // namespace mqb
