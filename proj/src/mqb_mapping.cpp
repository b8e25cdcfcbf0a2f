#include "mqb/mqb_mapping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mqb/constants.hpp"
#include "mqb/errors.hpp"

namespace mqb {

RoleAssignment auto_roles(const VCModel& model) {
    RoleAssignment roles;
    roles.tuning.assign(static_cast<std::size_t>(model.num_modes), false);
    roles.coupling.assign(static_cast<std::size_t>(model.num_modes), false);
    for (int j = 0; j < model.num_modes; ++j) {
        const auto& cj = model.c1[static_cast<std::size_t>(j)];
        bool any = false;
        for (int n = 0; n < model.d; ++n)
            if (cj(n, n) != 0.0) {
                roles.tuning[static_cast<std::size_t>(j)] = true;
                any = true;
            }
        for (int n = 0; n < model.d; ++n)
            for (int m = n + 1; m < model.d; ++m)
                if (cj(n, m) != 0.0) {
                    roles.coupling[static_cast<std::size_t>(j)] = true;
                    any = true;
                }
        if (!any) roles.tuning[static_cast<std::size_t>(j)] = true;
    }
    return roles;
}

MQBParams map_to_mqb(const VCModel& model, double f,
                     const std::optional<RoleAssignment>& roles_in) {
    model.validate();
    if (!(f > 0.0)) throw std::invalid_argument("map_to_mqb: scale factor F must be positive");
    if (model.has_quadratic())
        throw std::invalid_argument(
            "map_to_mqb: quadratic terms have no MQB parameter slot; map an LVC model");
    for (int n = 0; n < model.d; ++n)
        for (int m = n + 1; m < model.d; ++m)
            if (model.c0(n, m) != 0.0)
                throw std::invalid_argument(
                    "map_to_mqb: constant off-diagonal coupling c0(" + std::to_string(n) + "," +
                    std::to_string(m) + ") has no MQB term");

    RoleAssignment roles = roles_in ? *roles_in : auto_roles(model);
    if (static_cast<int>(roles.tuning.size()) != model.num_modes ||
        static_cast<int>(roles.coupling.size()) != model.num_modes)
        throw std::invalid_argument("map_to_mqb: role assignment size mismatch");

    const double s = 1.0 / std::sqrt(2.0);
    MQBParams p;
    p.f = f;
    p.theta_prime = Eigen::MatrixXd::Zero(model.d, model.num_modes);
    for (int j = 0; j < model.num_modes; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        p.delta.push_back(f * model.omega[ju]);
        const auto& cj = model.c1[ju];
        const bool is_t = roles.tuning[ju];
        const bool is_c = roles.coupling[ju];
        if (!is_t && !is_c)
            throw std::invalid_argument("map_to_mqb: mode " + std::to_string(j) +
                                        " has no role assigned");
        Eigen::MatrixXd op = Eigen::MatrixXd::Zero(model.d, model.d);
        for (int n = 0; n < model.d; ++n) {
            if (cj(n, n) != 0.0) {
                if (!is_t)
                    throw std::invalid_argument("map_to_mqb: mode " + std::to_string(j) +
                                                " has diagonal couplings but no tuning role");
                p.theta_prime(n, j) = f * (cj(n, n) * s);
            }
            for (int m = n + 1; m < model.d; ++m) {
                if (cj(n, m) != 0.0) {
                    if (!is_c)
                        throw std::invalid_argument("map_to_mqb: mode " + std::to_string(j) +
                                                    " has off-diagonal couplings but no coupling role");
                    op(n, m) = op(m, n) = f * (cj(n, m) * s);
                }
            }
        }
        p.omega_prime.push_back(op);
        if (is_t) p.tuning_set.push_back(j);
        if (is_c) p.coupling_set.push_back(j);
    }
    for (int n = 0; n < model.d; ++n) p.chi.push_back(2.0 * f * model.c0(n, n));
    return p;
}

OperatorMatrix assemble_mqb_hamiltonian(const MQBParams& params,
                                        std::shared_ptr<const SpaceLayout> layout) {
    if (!layout) throw std::invalid_argument("assemble_mqb_hamiltonian: layout is required");
    const int d = layout->qudit_levels();
    const int n_modes = layout->num_modes();
    if (static_cast<int>(params.delta.size()) != n_modes ||
        static_cast<int>(params.chi.size()) != d)
        throw std::invalid_argument("assemble_mqb_hamiltonian: parameter sizes do not match layout");

    OperatorMatrix h(SparseCd(layout->dim(), layout->dim()), layout);
    for (int j = 0; j < n_modes; ++j)
        h = h + params.delta[static_cast<std::size_t>(j)] *
                    embed_mode(number_operator(layout->truncation(j)), j, layout);

    {
        SparseCd m(d, d);
        for (int n = 0; n < d; ++n)
            if (params.chi[static_cast<std::size_t>(n)] != 0.0)
                m.insert(n, n) = 0.5 * params.chi[static_cast<std::size_t>(n)];
        h = h + embed_qudit(OperatorMatrix(std::move(m)), layout);
    }

    for (int j : params.tuning_set) {
        SparseCd m(d, d);
        bool any = false;
        for (int n = 0; n < d; ++n)
            if (params.theta_prime(n, j) != 0.0) {
                m.insert(n, n) = params.theta_prime(n, j);
                any = true;
            }
        if (!any) continue;
        OperatorMatrix a = annihilation(layout->truncation(j));
        OperatorMatrix x = creation(layout->truncation(j)) + a;  // a+ + a
        h = h + embed_qudit(OperatorMatrix(std::move(m)), layout) * embed_mode(x, j, layout);
    }

    for (int k : params.coupling_set) {
        const auto& op = params.omega_prime[static_cast<std::size_t>(k)];
        if (op.cwiseAbs().maxCoeff() == 0.0) continue;
        SparseCd m(d, d);
        for (int n = 0; n < d; ++n)
            for (int l = 0; l < d; ++l)
                if (n != l && op(n, l) != 0.0) m.insert(n, l) = op(n, l);
        OperatorMatrix a = annihilation(layout->truncation(k));
        OperatorMatrix x = creation(layout->truncation(k)) + a;
        h = h + embed_qudit(OperatorMatrix(std::move(m)), layout) * embed_mode(x, k, layout);
    }

    h.set_hermitian();
    return h;
}

void HardwareSpec::validate() const {
    if (!(tau_d_fs > 0.0)) throw std::invalid_argument("HardwareSpec: tau_d must be positive");
    if (!(max_coupling > 0.0))
        throw std::invalid_argument("HardwareSpec: max_coupling must be positive");
    if (!(dt_sim_min_fs > 0.0))
        throw std::invalid_argument("HardwareSpec: dt_sim_min must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("HardwareSpec: alpha must be in (0, 1]");
    for (double e : eta)
        if (!(e > 0.0)) throw std::invalid_argument("HardwareSpec: eta entries must be positive");
    for (double d : debye_waller)
        if (!(d > 0.0))
            throw std::invalid_argument("HardwareSpec: Debye-Waller entries must be positive");
    for (double w : omega_ion)
        if (!(w > 0.0))
            throw std::invalid_argument("HardwareSpec: omega_ion entries must be positive");
}

PhysicalDrives laser_drive_requirements(const MQBParams& params, const HardwareSpec& hw) {
    const int d = static_cast<int>(params.chi.size());
    const int n_modes = static_cast<int>(params.delta.size());
    if (static_cast<int>(hw.eta.size()) < n_modes ||
        static_cast<int>(hw.debye_waller.size()) < n_modes)
        throw std::invalid_argument("laser_drive_requirements: hardware spec misses per-mode factors");
    PhysicalDrives out;
    out.theta = Eigen::MatrixXd::Zero(d, n_modes);
    for (int j = 0; j < n_modes; ++j) {
        const double ed = hw.eta[static_cast<std::size_t>(j)] *
                          hw.debye_waller[static_cast<std::size_t>(j)];
        if (!(ed > 0.0))
            throw std::invalid_argument("laser_drive_requirements: eta*D' must be positive");
        for (int n = 0; n < d; ++n) out.theta(n, j) = 2.0 * params.theta_prime(n, j) / ed;
        Eigen::MatrixXd om = Eigen::MatrixXd::Zero(d, d);
        if (j < static_cast<int>(params.omega_prime.size()))
            om = 2.0 * params.omega_prime[static_cast<std::size_t>(j)] / ed;
        out.omega.push_back(om);
    }
    return out;
}

ScaleFactorBounds scale_factor_bounds(double t_max_fs, const HardwareSpec& hw, int trotter_m,
                                      const VCModel& model, double dt_mol_fs) {
    hw.validate();
    if (!(t_max_fs > 0.0)) throw std::invalid_argument("scale_factor_bounds: t_max must be positive");
    if (trotter_m < 1) throw std::invalid_argument("scale_factor_bounds: M must be >= 1");
    if (!(dt_mol_fs > 0.0))
        throw std::invalid_argument("scale_factor_bounds: dt_mol must be positive");

    ScaleFactorBounds b;
    b.f_min = trotter_m * t_max_fs / hw.tau_d_fs;

    // largest linear coefficient in the model, as angular frequency
    double cmax = 0.0;
    for (const auto& cj : model.c1) cmax = std::max(cmax, cj.cwiseAbs().maxCoeff());
    if (cmax == 0.0)
        throw std::invalid_argument("scale_factor_bounds: model has no linear couplings");
    b.f_max_coupling = hw.max_coupling / (cmax / hbar_ev_fs);
    b.f_max_timestep = dt_mol_fs / hw.dt_sim_min_fs;
    b.recommended = std::min(b.f_max_coupling, b.f_max_timestep);
    b.feasible = b.recommended >= b.f_min;
    return b;
}

InteractionCount interaction_count(const VCModel& model, int order) {
    model.validate();
    if (order != 1 && order != 2)
        throw std::invalid_argument("interaction_count: order must be 1 or 2");
    InteractionCount out;
    const long pairs = static_cast<long>(model.d) * (model.d + 1) / 2;
    long nk = 1;
    for (int i = 0; i < order; ++i) nk *= model.num_modes;
    out.formula = nk * pairs;

    if (order == 1) {
        for (const auto& cj : model.c1)
            for (int n = 0; n < model.d; ++n)
                for (int m = n; m < model.d; ++m)
                    if (cj(n, m) != 0.0) ++out.actual;
    } else {
        if (!model.c2.empty())
            for (int j = 0; j < model.num_modes; ++j)
                for (int k = 0; k < model.num_modes; ++k) {
                    const auto& c = model.c2_at(j, k);
                    if (c.size() == 0) continue;
                    for (int n = 0; n < model.d; ++n)
                        for (int m = n; m < model.d; ++m)
                            if (c(n, m) != 0.0) ++out.actual;
                }
    }
    return out;
}

ResourceReport resource_estimate(int n_modes, int d, int basis) {
    if (n_modes < 1) throw std::invalid_argument("resource_estimate: N must be >= 1");
    if (d < 2) throw std::invalid_argument("resource_estimate: d must be >= 2");
    if (basis < 2) throw std::invalid_argument("resource_estimate: basis must be >= 2");
    ResourceReport r;
    r.modes = n_modes;
    r.states = d;
    r.basis = basis;
    r.digital_qubits = 8L * n_modes + static_cast<long>(std::ceil(std::log2(d)));
    r.trapped_ions = (n_modes + 2) / 3;   // 3 vibrations per ion
    r.qudit_carrier_ions = 1;
    r.resonators = (n_modes + 19) / 20;   // 20 modes per resonator
    r.classical_log10_bytes = std::log10(16.0 * d) + n_modes * std::log10(static_cast<double>(basis));
    const double mantissa = std::pow(10.0, r.classical_log10_bytes -
                                               std::floor(r.classical_log10_bytes));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3fe+%02d", mantissa,
                  static_cast<int>(std::floor(r.classical_log10_bytes)));
    r.classical_bytes = buf;
    return r;
}

double bose_einstein(double omega_ev, double temperature_k) {
    if (!(omega_ev > 0.0)) throw std::invalid_argument("bose_einstein: omega must be positive");
    if (temperature_k < 0.0)
        throw std::invalid_argument("bose_einstein: temperature must be >= 0");
    if (temperature_k == 0.0) return 0.0;
    return 1.0 / std::expm1(omega_ev / (kb_ev_per_k * temperature_k));
}

double simulator_temperature(double temperature_k, double f) {
    if (!(f > 0.0)) throw std::invalid_argument("simulator_temperature: F must be positive");
    return f * temperature_k;
}

void BathSpec::validate() const {
    if (gamma.size() != nbar.size())
        throw std::invalid_argument("BathSpec: gamma and nbar must have equal length");
    for (double g : gamma)
        if (g < 0.0) throw std::invalid_argument("BathSpec: gamma entries must be >= 0");
    for (double n : nbar)
        if (n < 0.0) throw std::invalid_argument("BathSpec: nbar entries must be >= 0");
}

BathSpec scale_bath(const BathSpec& bath, double f) {
    bath.validate();
    if (!(f > 0.0)) throw std::invalid_argument("scale_bath: F must be positive");
    BathSpec out = bath;
    for (double& g : out.gamma) g *= f;
    return out;
}

namespace {
double lorentzian_b(double omega0, double gamma_sb, double x) {
    return omega0 * omega0 / (gamma_sb * gamma_sb + 4.0 * x * x);
}
}  // namespace

SidebandRates cooling_rates(double eta, double gamma_sb, double delta, double omega0,
                            double alpha, double omega_ion) {
    SidebandRates r;
    const double common = alpha * lorentzian_b(omega0, gamma_sb, delta);
    r.a_minus = eta * eta * gamma_sb * (lorentzian_b(omega0, gamma_sb, delta + omega_ion) + common);
    r.a_plus = eta * eta * gamma_sb * (lorentzian_b(omega0, gamma_sb, delta - omega_ion) + common);
    return r;
}

CoolingRealization solve_cooling_params(double target_gamma, double target_nbar,
                                        const HardwareSpec& hw, int mode) {
    hw.validate();
    if (mode < 0 || mode >= static_cast<int>(hw.omega_ion.size()))
        throw std::out_of_range("solve_cooling_params: mode index out of range");
    if (!(target_nbar > 0.0))
        throw std::invalid_argument(
            "solve_cooling_params: nbar target is unreachable (B(delta) > 0 forces nbar > 0)");
    if (!(target_gamma > 0.0))
        throw std::invalid_argument("solve_cooling_params: gamma target must be positive");
    if (!(hw.gamma_min > 0.0) || hw.gamma_max < hw.gamma_min)
        throw std::invalid_argument("solve_cooling_params: hardware Gamma range is empty");

    const double eta = hw.eta.at(static_cast<std::size_t>(mode));
    const double w_ion = hw.omega_ion.at(static_cast<std::size_t>(mode));
    const double alpha = hw.alpha;

    // nbar as a function of delta at fixed Gamma; omega0 cancels in the ratio
    auto nbar_of = [&](double delta, double gamma_sb) {
        const SidebandRates r = cooling_rates(eta, gamma_sb, delta, 1.0, alpha, w_ion);
        return r.a_plus / (r.a_minus - r.a_plus);
    };

    // log grid over the hardware Gamma range
    const int n_gamma = hw.gamma_max > hw.gamma_min ? 25 : 1;
    for (int ig = 0; ig < n_gamma; ++ig) {
        const double gamma_sb =
            n_gamma == 1 ? hw.gamma_min
                         : hw.gamma_min * std::pow(hw.gamma_max / hw.gamma_min,
                                                   static_cast<double>(ig) / (n_gamma - 1));
        // locate the minimum of nbar(delta) on a grid of red detunings
        double best_delta = -w_ion, best_nbar = nbar_of(-w_ion, gamma_sb);
        for (int i = 0; i <= 400; ++i) {
            const double delta = -w_ion * std::pow(10.0, -2.0 + 3.0 * i / 400.0);  // -0.01..-10 w_ion
            const double nb = nbar_of(delta, gamma_sb);
            if (nb > 0.0 && nb < best_nbar) {
                best_nbar = nb;
                best_delta = delta;
            }
        }
        if (best_nbar > target_nbar) continue;  // this Gamma cannot reach the target

        // nbar grows monotonically toward delta -> 0-, so bracket on
        // [best_delta, -tiny] and bisect
        double lo = best_delta;              // nbar(lo) <= target
        double hi = -1e-9 * w_ion;           // nbar(hi) huge
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (nbar_of(mid, gamma_sb) <= target_nbar)
                lo = mid;
            else
                hi = mid;
            if (std::abs(hi - lo) <= 1e-10 * std::abs(lo)) break;
        }
        const double delta = lo;

        const SidebandRates unit = cooling_rates(eta, gamma_sb, delta, 1.0, alpha, w_ion);
        const double k = unit.a_minus - unit.a_plus;  // gamma = omega0^2 * k
        if (!(k > 0.0)) continue;
        const double omega0 = std::sqrt(target_gamma / k);
        if (omega0 > 0.1 * gamma_sb)
            throw InfeasibleError(
                "solve_cooling_params: omega0/Gamma = " + std::to_string(omega0 / gamma_sb) +
                " violates the omega0 << Gamma validity condition");
        if (hw.omega0_max > 0.0 && (omega0 < hw.omega0_min || omega0 > hw.omega0_max))
            throw InfeasibleError("solve_cooling_params: omega0 outside the hardware range");

        CoolingRealization sol;
        sol.delta = delta;
        sol.gamma_sb = gamma_sb;
        sol.omega0 = omega0;
        sol.eta = eta;
        sol.alpha = alpha;
        return sol;
    }
    throw InfeasibleError("solve_cooling_params: no detuning in range achieves nbar = " +
                          std::to_string(target_nbar));
}

}  // namespace mqb
