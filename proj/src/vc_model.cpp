#include "mqb/vc_model.hpp"

#include <cmath>
#include <stdexcept>

#include "mqb/expm.hpp"

namespace mqb {

namespace {

void require_symmetric(const Eigen::MatrixXd& m, const std::string& name, int d) {
    if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument("VCModel: " + name + " must be " + std::to_string(d) + "x" +
                                    std::to_string(d));
    for (int n = 0; n < d; ++n)
        for (int l = n + 1; l < d; ++l)
            if (m(n, l) != m(l, n))
                throw std::invalid_argument("VCModel: " + name + "[" + std::to_string(n) + "][" +
                                            std::to_string(l) + "] != " + name + "[" +
                                            std::to_string(l) + "][" + std::to_string(n) + "]");
}

// sum_{n,m} coeff(n,m) |n><m| as a qudit operator
OperatorMatrix electronic_operator(const Eigen::MatrixXd& coeff) {
    const int d = static_cast<int>(coeff.rows());
    SparseCd m(d, d);
    for (int n = 0; n < d; ++n)
        for (int l = 0; l < d; ++l)
            if (coeff(n, l) != 0.0) m.insert(n, l) = coeff(n, l);
    return OperatorMatrix(std::move(m));
}

}  // namespace

bool VCModel::has_quadratic() const {
    for (const auto& m : c2)
        if (m.size() > 0 && m.cwiseAbs().maxCoeff() > 0.0) return true;
    return false;
}

void VCModel::validate() const {
    if (d < 1) throw std::invalid_argument("VCModel: d must be >= 1");
    if (num_modes < 1) throw std::invalid_argument("VCModel: N must be >= 1");
    if (static_cast<int>(omega.size()) != num_modes)
        throw std::invalid_argument("VCModel: omega must have N entries");
    for (int j = 0; j < num_modes; ++j)
        if (!(omega[static_cast<std::size_t>(j)] > 0.0))
            throw std::invalid_argument("VCModel: omega[" + std::to_string(j) +
                                        "] must be positive");
    require_symmetric(c0, "c0", d);
    if (static_cast<int>(c1.size()) != num_modes)
        throw std::invalid_argument("VCModel: c1 must have N entries");
    for (int j = 0; j < num_modes; ++j)
        require_symmetric(c1[static_cast<std::size_t>(j)], "c1[" + std::to_string(j) + "]", d);
    if (!c2.empty()) {
        if (static_cast<int>(c2.size()) != num_modes * num_modes)
            throw std::invalid_argument("VCModel: c2 must have N*N entries");
        for (int j = 0; j < num_modes; ++j)
            for (int k = 0; k < num_modes; ++k) {
                require_symmetric(c2_at(j, k),
                                  "c2[" + std::to_string(j) + "][" + std::to_string(k) + "]", d);
                if ((c2_at(j, k) - c2_at(k, j)).cwiseAbs().maxCoeff() != 0.0)
                    throw std::invalid_argument("VCModel: c2 not symmetric under modes " +
                                                std::to_string(j) + "<->" + std::to_string(k));
            }
    }
    if (!state_labels.empty() && static_cast<int>(state_labels.size()) != d)
        throw std::invalid_argument("VCModel: state_labels count != d");
    if (!mode_labels.empty() && static_cast<int>(mode_labels.size()) != num_modes)
        throw std::invalid_argument("VCModel: mode_labels count != N");
}

OperatorMatrix build_hamiltonian(const VCModel& model, std::shared_ptr<const SpaceLayout> layout) {
    model.validate();
    if (!layout) throw std::invalid_argument("build_hamiltonian: layout is required");
    if (layout->qudit_levels() != model.d)
        throw std::invalid_argument("build_hamiltonian: layout qudit levels != model d");
    if (layout->num_modes() != model.num_modes)
        throw std::invalid_argument("build_hamiltonian: layout mode count != model N");

    SparseCd acc(layout->dim(), layout->dim());
    OperatorMatrix h(std::move(acc), layout);

    for (int j = 0; j < model.num_modes; ++j) {
        const int nmax = layout->truncation(j);
        OperatorMatrix osc = model.omega[static_cast<std::size_t>(j)] *
                             (number_operator(nmax) + 0.5 * identity_op(nmax));
        h = h + embed_mode(osc, j, layout);
    }

    if (model.c0.cwiseAbs().maxCoeff() > 0.0)
        h = h + embed_qudit(electronic_operator(model.c0), layout);

    for (int j = 0; j < model.num_modes; ++j) {
        const auto& cj = model.c1[static_cast<std::size_t>(j)];
        if (cj.cwiseAbs().maxCoeff() == 0.0) continue;
        OperatorMatrix term = embed_qudit(electronic_operator(cj), layout) *
                              embed_mode(position_q(layout->truncation(j)), j, layout);
        h = h + term;
    }

    if (!model.c2.empty()) {
        for (int j = 0; j < model.num_modes; ++j)
            for (int k = 0; k < model.num_modes; ++k) {
                const auto& cjk = model.c2_at(j, k);
                if (cjk.size() == 0 || cjk.cwiseAbs().maxCoeff() == 0.0) continue;
                OperatorMatrix qq = embed_mode(position_q(layout->truncation(j)), j, layout) *
                                    embed_mode(position_q(layout->truncation(k)), k, layout);
                h = h + embed_qudit(electronic_operator(cjk), layout) * qq;
            }
    }

    h.set_hermitian();
    return h;
}

TwoStateLVCParams pauli_form(const VCModel& model) {
    model.validate();
    if (model.d != 2) throw std::invalid_argument("pauli_form: model must have d = 2");
    if (model.has_quadratic())
        throw std::invalid_argument("pauli_form: model must be LVC (no quadratic terms)");
    TwoStateLVCParams p;
    p.delta_e = model.c0(1, 1) - model.c0(0, 0);
    p.w0 = model.c0(0, 1);
    for (int j = 0; j < model.num_modes; ++j) {
        const auto& cj = model.c1[static_cast<std::size_t>(j)];
        p.kappa_bar.push_back((cj(1, 1) + cj(0, 0)) / 2.0);
        p.delta_kappa.push_back(cj(1, 1) - cj(0, 0));
        p.lambda.push_back(cj(0, 1));
    }
    return p;
}

VCModel lvc_from_pauli(const TwoStateLVCParams& params, const std::vector<double>& omega) {
    const int n_modes = static_cast<int>(omega.size());
    if (params.kappa_bar.size() != omega.size() || params.delta_kappa.size() != omega.size() ||
        params.lambda.size() != omega.size())
        throw std::invalid_argument("lvc_from_pauli: parameter lists must match omega length");
    VCModel m;
    m.d = 2;
    m.num_modes = n_modes;
    m.omega = omega;
    m.c0 = Eigen::MatrixXd::Zero(2, 2);
    m.c0(0, 0) = -params.delta_e / 2.0;
    m.c0(1, 1) = params.delta_e / 2.0;
    m.c0(0, 1) = m.c0(1, 0) = params.w0;
    for (int j = 0; j < n_modes; ++j) {
        Eigen::MatrixXd cj = Eigen::MatrixXd::Zero(2, 2);
        const auto ju = static_cast<std::size_t>(j);
        cj(0, 0) = params.kappa_bar[ju] - params.delta_kappa[ju] / 2.0;
        cj(1, 1) = params.kappa_bar[ju] + params.delta_kappa[ju] / 2.0;
        cj(0, 1) = cj(1, 0) = params.lambda[ju];
        m.c1.push_back(cj);
    }
    m.validate();
    return m;
}

VCModel displace_model(const VCModel& model, int mode_k, double beta) {
    model.validate();
    if (mode_k < 0 || mode_k >= model.num_modes)
        throw std::out_of_range("displace_model: mode index out of range");
    VCModel out = model;
    const auto ku = static_cast<std::size_t>(mode_k);

    // c0 update from the linear (and, for QVC, diagonal quadratic) terms
    Eigen::MatrixXd dc0 = -beta * model.c1[ku];
    if (!model.c2.empty()) dc0 += beta * beta * model.c2_at(mode_k, mode_k);
    // drop the electronic-identity part: it is a global energy shift
    dc0 -= (dc0.trace() / model.d) * Eigen::MatrixXd::Identity(model.d, model.d);
    out.c0 += dc0;

    // cross terms 2*beta*c2[k][j] feed into the linear coefficients
    if (!model.c2.empty())
        for (int j = 0; j < model.num_modes; ++j)
            out.c1[static_cast<std::size_t>(j)] -= 2.0 * beta * model.c2_at(mode_k, j);

    // the harmonic term contributes -omega_k*beta*Q_k on the electronic identity
    out.c1[ku] -= beta * model.omega[ku] * Eigen::MatrixXd::Identity(model.d, model.d);

    return out;
}

VectorXcd displace_state(const VectorXcd& state, int mode_k, double beta,
                         std::shared_ptr<const SpaceLayout> layout) {
    if (!layout) throw std::invalid_argument("displace_state: layout is required");
    if (mode_k < 0 || mode_k >= layout->num_modes())
        throw std::out_of_range("displace_state: mode index out of range");
    if (beta == 0.0) return state;
    OperatorMatrix p = embed_mode(momentum_p(layout->truncation(mode_k)), mode_k, layout);
    return matrix_exponential_apply(p, state, beta);
}

VectorXcd franck_condon_state(std::shared_ptr<const SpaceLayout> layout, int electronic_index) {
    if (!layout) throw std::invalid_argument("franck_condon_state: layout is required");
    if (electronic_index < 0 || electronic_index >= layout->qudit_levels())
        throw std::out_of_range("franck_condon_state: electronic index out of range");
    VectorXcd psi = VectorXcd::Zero(layout->dim());
    psi(electronic_index * layout->stride(0)) = 1.0;
    return psi;
}

}  // namespace mqb
