#include "mqb/expm.hpp"

#include <cmath>
#include <stdexcept>

#include "mqb/errors.hpp"

namespace mqb {

namespace {

void require_finite(const OperatorMatrix& h, const VectorXcd& v) {
    for (long k = 0; k < h.sparse().nonZeros(); ++k) {
        const cd z = h.sparse().valuePtr()[k];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NumericError("matrix exponential: Hamiltonian has non-finite entries");
    }
    for (long i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
            throw NumericError("matrix exponential: state has non-finite entries");
    }
}

// exp(-i*tau*T) e1 * beta for a real symmetric tridiagonal T given by
// diagonals alpha (size m) and off-diagonals beta_off (size m-1).
VectorXcd small_exp_e1(const std::vector<double>& alpha, const std::vector<double>& beta_off,
                       int m, double tau, double scale) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < m; ++i) {
        t(i, i + 1) = beta_off[static_cast<std::size_t>(i)];
        t(i + 1, i) = beta_off[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    if (es.info() != Eigen::Success)
        throw NumericError("matrix exponential: small eigensolve failed");
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXd& u = es.eigenvectors();
    VectorXcd y(m);
    for (int i = 0; i < m; ++i) {
        cd acc(0.0, 0.0);
        for (int k = 0; k < m; ++k) {
            const cd phase(std::cos(lam(k) * tau), -std::sin(lam(k) * tau));
            acc += u(i, k) * phase * u(0, k);
        }
        y(i) = scale * acc;
    }
    return y;
}

// One Lanczos substep: w <- e^{-i*tau*H} w. The basis grows until the small
// exponential stops changing by more than tol; returns false when m_max is
// exhausted first (caller shrinks tau).
bool lanczos_substep(const OperatorMatrix& h, VectorXcd& w, double tau, double tol, int m_max) {
    const long n = w.size();
    const double beta0 = w.norm();
    if (beta0 == 0.0) return true;

    const int m_cap = static_cast<int>(std::min<long>(m_max, n));
    std::vector<VectorXcd> basis;
    basis.reserve(static_cast<std::size_t>(m_cap));
    std::vector<double> alpha, beta_off;
    basis.push_back(w / beta0);

    bool breakdown = false;
    bool converged = false;
    VectorXcd y, y_prev;
    for (int j = 0; j < m_cap; ++j) {
        VectorXcd u = h.apply(basis[static_cast<std::size_t>(j)]);
        const double a = std::real(basis[static_cast<std::size_t>(j)].dot(u));
        alpha.push_back(a);
        u -= a * basis[static_cast<std::size_t>(j)];
        if (j > 0) u -= beta_off[static_cast<std::size_t>(j - 1)] * basis[static_cast<std::size_t>(j - 1)];
        // full reorthogonalization; the subspaces are small
        for (const auto& q : basis) u -= q.dot(u) * q;
        const double b = u.norm();

        const int m = j + 1;
        if (b <= 1e-14 * beta0 || m == m_cap || m == n) {
            breakdown = b <= 1e-14 * beta0;
            y = small_exp_e1(alpha, beta_off, m, tau, beta0);
            break;
        }
        if (m >= 3 && (m & 1)) {  // check every other iteration
            y = small_exp_e1(alpha, beta_off, m, tau, beta0);
            if (y_prev.size() > 0) {
                double err2 = std::norm(y(m - 1)) + std::norm(y(m - 2));
                for (long i = 0; i + 2 < m; ++i) err2 += std::norm(y(i) - y_prev(i));
                if (std::sqrt(err2) <= tol * beta0) {
                    converged = true;
                    break;
                }
            }
            y_prev = y;
        }
        beta_off.push_back(b);
        basis.push_back(u / b);
    }

    const int m = static_cast<int>(basis.size());
    if (!converged && !breakdown && m == m_cap && m < n) return false;

    VectorXcd out = VectorXcd::Zero(n);
    for (int i = 0; i < m; ++i) out += y(i) * basis[static_cast<std::size_t>(i)];
    w = std::move(out);
    return true;
}

VectorXcd krylov_expv(const OperatorMatrix& h, VectorXcd v, double t, double tol) {
    const double hnorm = h.inf_norm();
    if (t == 0.0 || hnorm == 0.0) return v;

    const double sign = t > 0.0 ? 1.0 : -1.0;
    double remaining = std::abs(t);
    // keep the phase turned per substep moderate so the 40-vector subspace
    // converges comfortably
    const double tau_cap = 15.0 / hnorm;

    while (remaining > 0.0) {
        double tau = std::min(remaining, tau_cap);
        bool done = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            VectorXcd trial = v;
            if (lanczos_substep(h, trial, sign * tau, tol, 40)) {
                v = std::move(trial);
                done = true;
                break;
            }
            tau *= 0.5;
        }
        if (!done)
            throw NumericError("matrix exponential: Krylov substep failed to converge");
        remaining -= tau;
    }
    return v;
}

}  // namespace

VectorXcd matrix_exponential_apply(const OperatorMatrix& h, const VectorXcd& state,
                                   double t, double rel_tol) {
    if (h.dim() != state.size())
        throw std::invalid_argument("matrix_exponential_apply: dimension mismatch");
    if (!h.check_hermitian())
        throw std::invalid_argument("matrix_exponential_apply: Hamiltonian must be Hermitian");
    require_finite(h, state);

    if (h.dim() < dense_storage_limit) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.dense());
        if (es.info() != Eigen::Success)
            throw NumericError("matrix_exponential_apply: eigensolve failed");
        VectorXcd y = es.eigenvectors().adjoint() * state;
        for (long k = 0; k < y.size(); ++k) {
            const double ph = -es.eigenvalues()(k) * t;
            y(k) *= cd(std::cos(ph), std::sin(ph));
        }
        return es.eigenvectors() * y;
    }
    return krylov_expv(h, state, t, rel_tol);
}

Propagator::Propagator(OperatorMatrix h, double rel_tol) : h_(std::move(h)), tol_(rel_tol) {
    if (!h_.check_hermitian())
        throw std::invalid_argument("Propagator: Hamiltonian must be Hermitian");
    h_.set_hermitian();
    // diagonal generators evolve by pure phases
    bool diagonal = true;
    for (long c = 0; c < h_.sparse().outerSize() && diagonal; ++c)
        for (SparseCd::InnerIterator it(h_.sparse(), c); it; ++it)
            if (it.row() != it.col()) {
                diagonal = false;
                break;
            }
    if (diagonal) {
        diag_path_ = true;
        diag_ = Eigen::VectorXd::Zero(h_.dim());
        for (long c = 0; c < h_.sparse().outerSize(); ++c)
            for (SparseCd::InnerIterator it(h_.sparse(), c); it; ++it)
                diag_(it.row()) = std::real(it.value());
        return;
    }
    if (h_.dim() <= dense_propagation_limit) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h_.dense());
        if (es.info() != Eigen::Success)
            throw NumericError("Propagator: eigensolve failed");
        evals_ = es.eigenvalues();
        evecs_ = es.eigenvectors();
        dense_path_ = true;
    }
}

VectorXcd Propagator::evolve(const VectorXcd& psi, double t) const {
    if (psi.size() != h_.dim())
        throw std::invalid_argument("Propagator::evolve: dimension mismatch");
    if (diag_path_) {
        VectorXcd out(psi.size());
        for (long i = 0; i < psi.size(); ++i) {
            const double ph = -diag_(i) * t;
            out(i) = psi(i) * cd(std::cos(ph), std::sin(ph));
        }
        return out;
    }
    if (dense_path_) {
        VectorXcd y = evecs_.adjoint() * psi;
        for (long k = 0; k < y.size(); ++k) {
            const double ph = -evals_(k) * t;
            y(k) *= cd(std::cos(ph), std::sin(ph));
        }
        return evecs_ * y;
    }
    return krylov_expv(h_, psi, t, tol_);
}

VectorXcd Propagator::evolve_fs(const VectorXcd& psi, double t_fs) const {
    return evolve(psi, t_fs / hbar_ev_fs);
}

}  // namespace mqb
