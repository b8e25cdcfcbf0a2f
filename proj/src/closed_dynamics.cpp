#include "mqb/closed_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mqb {

namespace {

VectorXcd checked_initial_state(const VectorXcd& psi0, bool* renormalized) {
    const double norm = psi0.norm();
    if (std::abs(norm - 1.0) >= 1e-6)
        throw std::invalid_argument("initial state norm deviates from 1 by " +
                                    std::to_string(std::abs(norm - 1.0)));
    if (norm != 1.0 && renormalized) *renormalized = true;
    return psi0 / norm;
}

std::vector<double> boundary_grid(double dt_fs, int n_steps) {
    std::vector<double> t(static_cast<std::size_t>(n_steps) + 1);
    for (int k = 0; k <= n_steps; ++k) t[static_cast<std::size_t>(k)] = k * dt_fs;
    return t;
}

int step_count(double t_final_fs, double dt_fs) {
    const int n = static_cast<int>(std::llround(t_final_fs / dt_fs));
    if (n < 1 || std::abs(n * dt_fs - t_final_fs) > 1e-9)
        throw std::invalid_argument("t_final is not an integer multiple of dt");
    return n;
}

}  // namespace

OperatorMatrix TrotterPlan::total() const {
    OperatorMatrix sum = h0;
    for (const auto& p : parts) sum = sum + p;
    return sum;
}

void TrotterPlan::validate() const {
    if (parts.empty()) throw std::invalid_argument("TrotterPlan: needs at least one part");
    if (!(dt_fs > 0.0)) throw std::invalid_argument("TrotterPlan: dt must be positive");
    for (const auto& p : parts)
        if (p.dim() != h0.dim())
            throw std::invalid_argument("TrotterPlan: part dimension mismatch");
    if (!total().check_hermitian())
        throw std::invalid_argument("TrotterPlan: total Hamiltonian is not Hermitian");
}

Trajectory propagate_exact(const OperatorMatrix& h, const VectorXcd& psi0,
                           const std::vector<double>& times_fs, const ExactOptions& opts) {
    if (!h.check_hermitian())
        throw std::invalid_argument("propagate_exact: Hamiltonian must be Hermitian");
    if (!h.has_layout())
        throw std::invalid_argument("propagate_exact: Hamiltonian needs a space layout");
    if (times_fs.empty()) throw std::invalid_argument("propagate_exact: empty time grid");
    if (times_fs.front() < 0.0)
        throw std::invalid_argument("propagate_exact: times must start at >= 0");
    for (std::size_t k = 1; k < times_fs.size(); ++k)
        if (times_fs[k] <= times_fs[k - 1])
            throw std::invalid_argument("propagate_exact: times must be ascending");

    Trajectory traj;
    VectorXcd psi = checked_initial_state(psi0, &traj.renormalized_input);

    OperatorMatrix hh = h;
    hh.set_hermitian();
    Propagator prop(hh, opts.rel_tol);
    ObservableSet obs(h.layout());

    double t_now = 0.0;
    for (double t : times_fs) {
        if (t > t_now) {
            psi = prop.evolve_fs(psi, t - t_now);
            t_now = t;
        }
        obs.record(psi, t, traj);
        if (opts.store_states) traj.snapshots.push_back(psi);
    }
    for (double l : traj.leakage)
        if (l > opts.leak_threshold) traj.leakage_warning = true;
    return traj;
}

Trajectory propagate_trotter(const TrotterPlan& plan, const VectorXcd& psi0, double t_final_fs,
                             const TrotterOptions& opts) {
    plan.validate();
    if (!plan.h0.has_layout())
        throw std::invalid_argument("propagate_trotter: base Hamiltonian needs a space layout");
    const int n_steps = step_count(t_final_fs, plan.dt_fs);
    const int m = plan.num_parts();

    if (opts.reference_states &&
        static_cast<int>(opts.reference_states->size()) != n_steps + 1)
        throw std::invalid_argument("propagate_trotter: reference state count mismatch");

    Trajectory traj;
    VectorXcd psi = checked_initial_state(psi0, &traj.renormalized_input);

    // per-part step generators
    std::vector<Propagator> props;
    props.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        OperatorMatrix gen = plan.scheme == TrotterScheme::rescaling
                                 ? (1.0 / m) * plan.h0 + plan.parts[static_cast<std::size_t>(k)]
                                 : plan.h0 + plan.parts[static_cast<std::size_t>(k)];
        gen.set_hermitian();
        props.emplace_back(std::move(gen), opts.rel_tol);
    }
    std::unique_ptr<Propagator> rewind;
    if (plan.scheme == TrotterScheme::rewinding) {
        OperatorMatrix base = plan.h0;
        base.set_hermitian();
        rewind = std::make_unique<Propagator>(std::move(base), opts.rel_tol);
    }

    ObservableSet obs(plan.h0.layout());
    const double dt = plan.dt_fs;

    auto record = [&](int step) {
        obs.record(psi, step * dt, traj);
        if (opts.reference_states)
            traj.fidelity.push_back(
                fidelity(psi, (*opts.reference_states)[static_cast<std::size_t>(step)]));
        if (opts.store_states) traj.snapshots.push_back(psi);
    };

    record(0);
    for (int step = 1; step <= n_steps; ++step) {
        for (int k = 0; k < m; ++k) {
            if (plan.scheme == TrotterScheme::rewinding && k > 0)
                psi = rewind->evolve_fs(psi, -dt);  // exp(+i H0 dt)
            psi = props[static_cast<std::size_t>(k)].evolve_fs(psi, dt);
        }
        record(step);
    }
    for (double l : traj.leakage)
        if (l > opts.leak_threshold) traj.leakage_warning = true;
    return traj;
}

double fidelity(const VectorXcd& psi_a, const VectorXcd& psi_b) {
    if (psi_a.size() != psi_b.size())
        throw std::invalid_argument("fidelity: dimension mismatch");
    return std::norm(psi_a.dot(psi_b));
}

ScanResult trotter_error_scan(const TrotterPlan& plan, const std::vector<double>& dt_list_fs,
                              double t_final_fs, const VectorXcd& psi0, double rel_tol) {
    if (dt_list_fs.size() < 3)
        throw std::invalid_argument("trotter_error_scan: need at least 3 dt values");
    const auto [mn, mx] = std::minmax_element(dt_list_fs.begin(), dt_list_fs.end());
    if (!(*mn > 0.0) || *mx / *mn < 10.0 * (1.0 - 1e-9))
        throw std::invalid_argument("trotter_error_scan: dt values must span at least a decade");

    ScanResult result;
    result.rows.resize(dt_list_fs.size());

    OperatorMatrix h_total = plan.total();
    h_total.set_hermitian();

    const long n_rows = static_cast<long>(dt_list_fs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n_rows; ++i) {
        const double dt = dt_list_fs[static_cast<std::size_t>(i)];
        ExactOptions eopts;
        eopts.rel_tol = rel_tol;
        eopts.store_states = true;
        const int n_steps = static_cast<int>(std::llround(t_final_fs / dt));
        Trajectory exact = propagate_exact(h_total, psi0, boundary_grid(dt, n_steps), eopts);

        TrotterPlan p = plan;
        p.dt_fs = dt;
        TrotterOptions topts;
        topts.rel_tol = rel_tol;
        topts.reference_states = &exact.snapshots;
        Trajectory trot = propagate_trotter(p, psi0, t_final_fs, topts);

        ScanRow row;
        row.dt_fs = dt;
        for (std::size_t s = 0; s < trot.times.size(); ++s) {
            for (int n = 0; n < trot.num_states(); ++n)
                row.max_pop_error =
                    std::max(row.max_pop_error,
                             std::abs(trot.populations[static_cast<std::size_t>(n)][s] -
                                      exact.populations[static_cast<std::size_t>(n)][s]));
            row.min_fidelity = std::min(row.min_fidelity, trot.fidelity[s]);
        }
        result.rows[static_cast<std::size_t>(i)] = row;
    }

    // least-squares slope of log(1 - min fidelity) vs log(dt)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(result.rows.size());
    for (const auto& row : result.rows) {
        const double x = std::log(row.dt_fs);
        const double y = std::log(std::max(1.0 - row.min_fidelity, 1e-16));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    result.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return result;
}

SchemeComparison compare_schemes(const TrotterPlan& plan_res, const TrotterPlan& plan_rew,
                                 const VectorXcd& psi0, double t_final_fs) {
    if (plan_res.scheme != TrotterScheme::rescaling ||
        plan_rew.scheme != TrotterScheme::rewinding)
        throw std::invalid_argument("compare_schemes: plans must be (rescaling, rewinding)");
    if (plan_res.dt_fs != plan_rew.dt_fs)
        throw std::invalid_argument("compare_schemes: plans differ in dt");
    if (plan_res.num_parts() != plan_rew.num_parts())
        throw std::invalid_argument("compare_schemes: mismatched partitions");
    const double scale = std::max(plan_res.h0.max_abs(), 1.0);
    auto same = [scale](const OperatorMatrix& a, const OperatorMatrix& b) {
        return (a - b).max_abs() <= 1e-12 * scale;
    };
    if (!same(plan_res.h0, plan_rew.h0))
        throw std::invalid_argument("compare_schemes: mismatched partitions (base)");
    for (int k = 0; k < plan_res.num_parts(); ++k)
        if (!same(plan_res.parts[static_cast<std::size_t>(k)],
                  plan_rew.parts[static_cast<std::size_t>(k)]))
            throw std::invalid_argument("compare_schemes: mismatched partitions (part " +
                                        std::to_string(k) + ")");

    const int n_steps = step_count(t_final_fs, plan_res.dt_fs);
    OperatorMatrix h_total = plan_res.total();
    h_total.set_hermitian();
    ExactOptions eopts;
    eopts.store_states = true;
    Trajectory exact =
        propagate_exact(h_total, psi0, boundary_grid(plan_res.dt_fs, n_steps), eopts);

    TrotterOptions topts;
    topts.reference_states = &exact.snapshots;
    Trajectory res = propagate_trotter(plan_res, psi0, t_final_fs, topts);
    Trajectory rew = propagate_trotter(plan_rew, psi0, t_final_fs, topts);

    SchemeComparison cmp;
    cmp.times_fs = res.times;
    cmp.fidelity_rescaling = res.fidelity;
    cmp.fidelity_rewinding = rew.fidelity;
    for (std::size_t s = 0; s < cmp.times_fs.size(); ++s)
        cmp.max_abs_difference = std::max(
            cmp.max_abs_difference, std::abs(cmp.fidelity_rescaling[s] - cmp.fidelity_rewinding[s]));
    return cmp;
}

TrotterPlan per_mode_partition(const VCModel& model, std::shared_ptr<const SpaceLayout> layout,
                               TrotterScheme scheme, double dt_fs,
                               std::vector<double> stark_weights) {
    model.validate();
    if (!layout) throw std::invalid_argument("per_mode_partition: layout is required");
    if (layout->qudit_levels() != model.d || layout->num_modes() != model.num_modes)
        throw std::invalid_argument("per_mode_partition: layout does not match model");
    const int n_modes = model.num_modes;
    if (stark_weights.empty())
        stark_weights.assign(static_cast<std::size_t>(n_modes), 1.0 / n_modes);
    if (static_cast<int>(stark_weights.size()) != n_modes)
        throw std::invalid_argument("per_mode_partition: weight count != N");
    double wsum = 0.0;
    for (double w : stark_weights) wsum += w;
    if (std::abs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("per_mode_partition: stark weights must sum to 1");

    TrotterPlan plan;
    plan.scheme = scheme;
    plan.dt_fs = dt_fs;

    SparseCd zero(layout->dim(), layout->dim());
    OperatorMatrix h0(zero, layout);
    for (int j = 0; j < n_modes; ++j)
        h0 = h0 + model.omega[static_cast<std::size_t>(j)] *
                      embed_mode(number_operator(layout->truncation(j)), j, layout);
    h0.set_hermitian();
    plan.h0 = h0;

    OperatorMatrix c0_op(SparseCd(layout->dim(), layout->dim()), layout);
    {
        SparseCd m(model.d, model.d);
        for (int n = 0; n < model.d; ++n)
            for (int l = 0; l < model.d; ++l)
                if (model.c0(n, l) != 0.0) m.insert(n, l) = model.c0(n, l);
        c0_op = embed_qudit(OperatorMatrix(std::move(m)), layout);
    }

    for (int j = 0; j < n_modes; ++j) {
        OperatorMatrix part = stark_weights[static_cast<std::size_t>(j)] * c0_op;
        const auto& cj = model.c1[static_cast<std::size_t>(j)];
        if (cj.cwiseAbs().maxCoeff() != 0.0) {
            SparseCd m(model.d, model.d);
            for (int n = 0; n < model.d; ++n)
                for (int l = 0; l < model.d; ++l)
                    if (cj(n, l) != 0.0) m.insert(n, l) = cj(n, l);
            part = part + embed_qudit(OperatorMatrix(std::move(m)), layout) *
                              embed_mode(position_q(layout->truncation(j)), j, layout);
        }
        if (!model.c2.empty()) {
            for (int a = 0; a < n_modes; ++a)
                for (int b = 0; b < n_modes; ++b) {
                    if (std::max(a, b) != j) continue;
                    const auto& cab = model.c2_at(a, b);
                    if (cab.size() == 0 || cab.cwiseAbs().maxCoeff() == 0.0) continue;
                    SparseCd m(model.d, model.d);
                    for (int n = 0; n < model.d; ++n)
                        for (int l = 0; l < model.d; ++l)
                            if (cab(n, l) != 0.0) m.insert(n, l) = cab(n, l);
                    part = part + embed_qudit(OperatorMatrix(std::move(m)), layout) *
                                      embed_mode(position_q(layout->truncation(a)), a, layout) *
                                      embed_mode(position_q(layout->truncation(b)), b, layout);
                }
        }
        part.set_hermitian();
        plan.parts.push_back(std::move(part));
    }
    return plan;
}

}  // namespace mqb
