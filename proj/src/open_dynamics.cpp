#include "mqb/open_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mqb/closed_dynamics.hpp"
#include "mqb/errors.hpp"
#include "mqb/kernels.hpp"

namespace mqb {

void DensityOperator::validate() const {
    if (!layout) throw std::invalid_argument("DensityOperator: layout is required");
    if (rho.rows() != rho.cols() || rho.rows() != layout->dim())
        throw std::invalid_argument("DensityOperator: dimension does not match layout");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10)
        throw std::invalid_argument("DensityOperator: Hermiticity defect " + std::to_string(herm));
    const cd tr = rho.trace();
    if (std::abs(tr - cd(1.0, 0.0)) > 1e-8)
        throw std::invalid_argument("DensityOperator: trace deviates from 1");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw std::invalid_argument("DensityOperator: negative eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
}

DensityOperator pure_density(const VectorXcd& psi, std::shared_ptr<const SpaceLayout> layout) {
    if (!layout || psi.size() != layout->dim())
        throw std::invalid_argument("pure_density: state does not match layout");
    DensityOperator rho;
    rho.layout = std::move(layout);
    rho.rho = psi * psi.adjoint();
    return rho;
}

LindbladGenerator::LindbladGenerator(OperatorMatrix h, BathSpec bath,
                                     std::shared_ptr<const SpaceLayout> layout)
    : h_(std::move(h)), layout_(std::move(layout)) {
    if (!layout_) throw std::invalid_argument("LindbladGenerator: layout is required");
    if (h_.dim() != layout_->dim())
        throw std::invalid_argument("LindbladGenerator: Hamiltonian does not match layout");
    if (!h_.check_hermitian())
        throw std::invalid_argument("LindbladGenerator: Hamiltonian must be Hermitian");
    bath.validate();
    if (static_cast<int>(bath.gamma.size()) != layout_->num_modes())
        throw std::invalid_argument("LindbladGenerator: bath must cover every mode");
    gamma_ = bath.gamma;
    nbar_ = bath.nbar;

    const long dim = layout_->dim();
    // anticommutator weights: -1/2 (W(r) + W(c)) rho(r,c) with
    // W = sum_j gamma_j ((nbar_j+1) diag(a+a) + nbar_j diag(a a+))
    w_diag_ = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j < layout_->num_modes(); ++j) {
        OperatorMatrix aj = embed_mode(annihilation(layout_->truncation(j)), j, layout_);
        a_.push_back(aj.sparse());
        adag_.push_back(SparseCd(aj.sparse().adjoint()));
        Eigen::VectorXd cool(dim), heat(dim);
        const int top = layout_->truncation(j) - 1;
        for (long i = 0; i < dim; ++i) {
            const int v = layout_->fock_index_of(i, j);
            cool(i) = static_cast<double>(v);                    // a^dag a
            heat(i) = v < top ? static_cast<double>(v + 1) : 0;  // a a^dag, truncated
        }
        const auto ju = static_cast<std::size_t>(j);
        w_diag_ += gamma_[ju] * ((nbar_[ju] + 1.0) * cool + nbar_[ju] * heat);
        diag_cool_.push_back(std::move(cool));
        diag_heat_.push_back(std::move(heat));
    }
}

void LindbladGenerator::rhs(const MatrixXcd& rho, MatrixXcd& out) const {
    const long dim = layout_->dim();
    if (rho.rows() != dim || rho.cols() != dim)
        throw std::invalid_argument("LindbladGenerator::rhs: dimension mismatch");
    out.resize(dim, dim);

    const cd mi_over_hbar(0.0, -1.0 / hbar_ev_fs);
    const SparseCd& hs = h_.sparse();
    const auto* h_outer = hs.outerIndexPtr();
    const auto* h_inner = hs.innerIndexPtr();
    const auto* h_vals = hs.valuePtr();
    const int n_modes = static_cast<int>(gamma_.size());

    // one fused pass per column: commutator, jump sandwiches and the diagonal
    // anticommutator all write out.col(c) exactly once
#pragma omp parallel if (kernels::parallel_enabled())
    {
        VectorXcd v(dim);
#pragma omp for schedule(static)
        for (long c = 0; c < dim; ++c) {
            auto out_c = out.col(c);
            const auto rho_c = rho.col(c);

            // -i/hbar * H rho: scatter over the columns H touches in rho_c
            out_c.setZero();
            for (long j = 0; j < dim; ++j) {
                const cd x = mi_over_hbar * rho_c(j);
                if (x == cd(0.0, 0.0)) continue;
                for (auto p = h_outer[j]; p < h_outer[j + 1]; ++p)
                    out_c(h_inner[p]) += h_vals[p] * x;
            }
            // +i/hbar * rho H: combination of rho columns picked by H's column c
            for (auto p = h_outer[c]; p < h_outer[c + 1]; ++p)
                out_c.noalias() -= (mi_over_hbar * h_vals[p]) * rho.col(h_inner[p]);

            for (int m = 0; m < n_modes; ++m) {
                const auto mu = static_cast<std::size_t>(m);
                const double g = gamma_[mu];
                if (g == 0.0) continue;
                const double gc = g * (nbar_[mu] + 1.0);
                const double gh = g * nbar_[mu];

                // gc * a (rho a+)(:,c); (rho a+).col(c) mixes few rho columns
                const SparseCd& ad = adag_[mu];
                const SparseCd& a = a_[mu];
                v.setZero();
                {
                    const auto* outer = ad.outerIndexPtr();
                    const auto* inner = ad.innerIndexPtr();
                    const auto* vals = ad.valuePtr();
                    for (auto p = outer[c]; p < outer[c + 1]; ++p)
                        v.noalias() += vals[p] * rho.col(inner[p]);
                    const auto* ao = a.outerIndexPtr();
                    const auto* ai = a.innerIndexPtr();
                    const auto* av = a.valuePtr();
                    for (long j = 0; j < dim; ++j) {
                        const cd x = gc * v(j);
                        if (x == cd(0.0, 0.0)) continue;
                        for (auto p = ao[j]; p < ao[j + 1]; ++p) out_c(ai[p]) += av[p] * x;
                    }
                }
                if (gh > 0.0) {
                    // gh * a+ (rho a)(:,c)
                    v.setZero();
                    const auto* outer = a.outerIndexPtr();
                    const auto* inner = a.innerIndexPtr();
                    const auto* vals = a.valuePtr();
                    for (auto p = outer[c]; p < outer[c + 1]; ++p)
                        v.noalias() += vals[p] * rho.col(inner[p]);
                    const auto* ao = ad.outerIndexPtr();
                    const auto* ai = ad.innerIndexPtr();
                    const auto* av = ad.valuePtr();
                    for (long j = 0; j < dim; ++j) {
                        const cd x = gh * v(j);
                        if (x == cd(0.0, 0.0)) continue;
                        for (auto p = ao[j]; p < ao[j + 1]; ++p) out_c(ai[p]) += av[p] * x;
                    }
                }
            }
            const double wc = w_diag_(c);
            for (long r = 0; r < dim; ++r)
                out_c(r) -= 0.5 * (w_diag_(r) + wc) * rho_c(r);
        }
    }
}

void LindbladGenerator::rhs_serial_reference(const MatrixXcd& rho, MatrixXcd& out) const {
    const MatrixXcd h = h_.dense();
    const cd mi_over_hbar(0.0, -1.0 / hbar_ev_fs);
    out = mi_over_hbar * (h * rho - rho * h);
    for (std::size_t j = 0; j < gamma_.size(); ++j) {
        const double g = gamma_[j];
        if (g == 0.0) continue;
        const MatrixXcd a = MatrixXcd(a_[j]);
        const MatrixXcd ad = MatrixXcd(adag_[j]);
        const MatrixXcd nc = ad * a;
        const MatrixXcd nh = a * ad;
        out += g * (nbar_[j] + 1.0) * (a * rho * ad - 0.5 * (nc * rho + rho * nc));
        out += g * nbar_[j] * (ad * rho * a - 0.5 * (nh * rho + rho * nh));
    }
}

MatrixXcd lindblad_rhs(const MatrixXcd& rho, const OperatorMatrix& h, const BathSpec& bath,
                       std::shared_ptr<const SpaceLayout> layout) {
    LindbladGenerator gen(h, bath, std::move(layout));
    MatrixXcd out;
    gen.rhs(rho, out);
    return out;
}

namespace {

// Dormand-Prince 4(5) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct Rk45Stepper {
    const LindbladGenerator& gen;
    double atol, rtol;
    MatrixXcd k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
    bool have_k1 = false;

    Rk45Stepper(const LindbladGenerator& g, double at, double rt) : gen(g), atol(at), rtol(rt) {}

    // attempts a step of size h; returns scaled error (<= 1 means accepted)
    double attempt(const MatrixXcd& y, double h) {
        if (!have_k1) {
            gen.rhs(y, k1);
            have_k1 = true;
        }
        ytmp = y + h * a21 * k1;
        gen.rhs(ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        gen.rhs(ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        gen.rhs(ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        gen.rhs(ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        gen.rhs(ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        gen.rhs(ynew, k7);  // FSAL
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double scaled = 0.0;
        for (long c = 0; c < y.cols(); ++c)
            for (long r = 0; r < y.rows(); ++r) {
                const double sc =
                    atol + rtol * std::max(std::abs(y(r, c)), std::abs(ynew(r, c)));
                scaled = std::max(scaled, std::abs(err(r, c)) / sc);
            }
        return scaled;
    }

    void accept(MatrixXcd& y) {
        y.swap(ynew);
        k1.swap(k7);  // FSAL reuse
        have_k1 = true;
    }
};

}  // namespace

Trajectory propagate_lindblad(const DensityOperator& rho0, const OperatorMatrix& h,
                              const BathSpec& bath, const std::vector<double>& times_fs,
                              const LindbladOptions& opts) {
    rho0.validate();
    if (times_fs.empty()) throw std::invalid_argument("propagate_lindblad: empty time grid");
    if (times_fs.front() < 0.0)
        throw std::invalid_argument("propagate_lindblad: times must start at >= 0");
    for (std::size_t k = 1; k < times_fs.size(); ++k)
        if (times_fs[k] <= times_fs[k - 1])
            throw std::invalid_argument("propagate_lindblad: times must be ascending");

    LindbladGenerator gen(h, bath, rho0.layout);
    ObservableSet obs(rho0.layout);
    Rk45Stepper stepper(gen, opts.abs_tol, opts.rel_tol);

    Trajectory traj;
    MatrixXcd rho = rho0.rho;
    double t = 0.0;
    // initial step from the Hamiltonian scale
    double h_step = 0.05 * hbar_ev_fs / std::max(h.inf_norm(), 1e-12);
    long steps = 0;

    for (double target : times_fs) {
        while (t < target) {
            const double h_try = std::min(h_step, target - t);
            const double scaled = stepper.attempt(rho, h_try);
            if (scaled <= 1.0) {
                stepper.accept(rho);
                t += h_try;
                const double grow = scaled > 0.0 ? 0.9 * std::pow(scaled, -0.2) : 5.0;
                h_step = h_try * std::clamp(grow, 0.2, 5.0);
            } else {
                stepper.have_k1 = true;  // k1 still valid at unchanged state
                h_step = h_try * std::clamp(0.9 * std::pow(scaled, -0.2), 0.1, 0.9);
            }
            if (++steps > opts.max_steps)
                throw NumericError("propagate_lindblad: step limit exceeded at t = " +
                                   std::to_string(t) + " fs, step size " +
                                   std::to_string(h_step) + " fs");
        }
        obs.record(rho, target, traj);
        const double tr_err = traj.trace_error.back();
        if (tr_err > 1e-5)
            throw NumericError("propagate_lindblad: trace drift " + std::to_string(tr_err) +
                               " at t = " + std::to_string(target) + " fs");
    }
    for (double l : traj.leakage)
        if (l > opts.leak_threshold) traj.leakage_warning = true;
    return traj;
}

std::vector<double> ohmic_couplings(double gamma0, double omega_cut_ev,
                                    const std::vector<double>& omegas_ev) {
    if (gamma0 < 0.0) throw std::invalid_argument("ohmic_couplings: gamma0 must be >= 0");
    if (!(omega_cut_ev > 0.0))
        throw std::invalid_argument("ohmic_couplings: cutoff must be positive");
    std::vector<double> out;
    out.reserve(omegas_ev.size());
    for (double w : omegas_ev) out.push_back(gamma0 * w * std::exp(-w / omega_cut_ev));
    return out;
}

BroadbandApprox broadband_cooling_approx(const BathSpec& bath, double common_gamma) {
    bath.validate();
    BroadbandApprox out;
    out.bath = bath;
    for (double n : bath.nbar) out.max_nbar = std::max(out.max_nbar, n);
    out.valid = out.max_nbar < 1.0;
    double g = common_gamma;
    if (g < 0.0) {
        g = 0.0;
        for (double gi : bath.gamma) g += gi;
        g /= bath.gamma.empty() ? 1.0 : static_cast<double>(bath.gamma.size());
    }
    std::fill(out.bath.gamma.begin(), out.bath.gamma.end(), g);
    std::fill(out.bath.nbar.begin(), out.bath.nbar.end(), 0.0);
    return out;
}

}  // namespace mqb
