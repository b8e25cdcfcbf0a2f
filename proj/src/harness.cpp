#include "mqb/harness.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "mqb/closed_dynamics.hpp"
#include "mqb/constants.hpp"
#include "mqb/errors.hpp"
#include "mqb/kernels.hpp"
#include "mqb/model_io.hpp"
#include "mqb/open_dynamics.hpp"

namespace mqb {

using nlohmann::json;

namespace {

const std::set<std::string> kExperiments = {"propagate",   "trotter-scan", "compare-schemes",
                                            "open-system", "map",          "feasibility",
                                            "resources"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const RunConfig& cfg) : out_(path) {
        if (!out_) throw ParseError("cannot open output file: " + path.string());
        out_ << "# mqbsim " << tool_version << " experiment=" << cfg.experiment
             << " config_hash=" << cfg.config_hash << " seed=" << cfg.seed << "\n";
        if (cfg.timestamps) {
            const auto now = std::chrono::system_clock::now();
            out_ << "# timestamp=" << std::chrono::duration_cast<std::chrono::seconds>(
                                          now.time_since_epoch())
                                          .count()
                 << "\n";
        }
    }
    void line(const std::string& s) { out_ << s << "\n"; }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) out_ << ",";
            out_ << fmt(vals[i]);
        }
        out_ << "\n";
    }
    std::ofstream& stream() { return out_; }

private:
    std::ofstream out_;
};

void write_trajectory(const std::filesystem::path& path, const RunConfig& cfg,
                      const Trajectory& traj, bool open_columns) {
    CsvFile csv(path, cfg);
    std::string header = "time_fs";
    for (int n = 0; n < traj.num_states(); ++n) header += ",pop_" + std::to_string(n);
    for (int j = 0; j < traj.num_modes(); ++j) header += ",q_" + std::to_string(j + 1);
    for (int j = 0; j < traj.num_modes(); ++j) header += ",p_" + std::to_string(j + 1);
    header += ",fidelity,leakage";
    if (open_columns) header += ",purity,trace_error";
    csv.line(header);
    for (std::size_t s = 0; s < traj.size(); ++s) {
        std::vector<double> vals;
        vals.push_back(traj.times[s]);
        for (int n = 0; n < traj.num_states(); ++n)
            vals.push_back(traj.populations[static_cast<std::size_t>(n)][s]);
        for (int j = 0; j < traj.num_modes(); ++j)
            vals.push_back(traj.q_expect[static_cast<std::size_t>(j)][s]);
        for (int j = 0; j < traj.num_modes(); ++j)
            vals.push_back(traj.p_expect[static_cast<std::size_t>(j)][s]);
        vals.push_back(traj.fidelity.empty() ? 1.0 : traj.fidelity[s]);
        vals.push_back(traj.leakage[s]);
        if (open_columns) {
            vals.push_back(traj.purity[s]);
            vals.push_back(traj.trace_error[s]);
        }
        csv.row(vals);
    }
}

struct LoadedModel {
    ModelFile file;
    std::shared_ptr<const SpaceLayout> layout;
    VectorXcd psi0;
};

LoadedModel prepare(const RunConfig& cfg) {
    if (cfg.model_path.empty()) throw ParseError("config: model path is required");
    LoadedModel lm;
    lm.file = load_model(cfg.model_path);
    std::vector<int> trunc = cfg.truncations;
    if (trunc.empty()) trunc.assign(static_cast<std::size_t>(lm.file.model.num_modes), 20);
    if (static_cast<int>(trunc.size()) != lm.file.model.num_modes)
        throw ParseError("config: truncations must have one entry per mode");
    lm.layout = std::make_shared<SpaceLayout>(lm.file.model.d, trunc);
    lm.psi0 = franck_condon_state(lm.layout, cfg.electronic_index);
    if (!cfg.displacements.empty()) {
        if (static_cast<int>(cfg.displacements.size()) != lm.file.model.num_modes)
            throw ParseError("config: displacements must have one entry per mode");
        for (int j = 0; j < lm.file.model.num_modes; ++j)
            if (cfg.displacements[static_cast<std::size_t>(j)] != 0.0)
                lm.psi0 = displace_state(lm.psi0, j,
                                         cfg.displacements[static_cast<std::size_t>(j)], lm.layout);
    }
    return lm;
}

std::vector<double> output_grid(double t_final, double dt_out) {
    std::vector<double> t;
    for (double x = 0.0; x <= t_final + 1e-9; x += dt_out) t.push_back(std::min(x, t_final));
    return t;
}

TrotterScheme scheme_from(const std::string& s) {
    if (s == "rescaling") return TrotterScheme::rescaling;
    if (s == "rewinding") return TrotterScheme::rewinding;
    throw ParseError("config: unknown trotter scheme \"" + s + "\"");
}

std::optional<RoleAssignment> roles_from(const ModelFile& mf) {
    if (mf.roles.empty()) return std::nullopt;
    RoleAssignment r;
    for (const auto& s : mf.roles) {
        r.tuning.push_back(s == "tuning" || s == "both");
        r.coupling.push_back(s == "coupling" || s == "both");
    }
    return r;
}

BathSpec make_bath(const RunConfig& cfg, const VCModel& model, double gamma0) {
    BathSpec bath;
    bath.temperature_k = cfg.temperature_k;
    bath.gamma = ohmic_couplings(gamma0, cfg.omega_cut_ev, model.omega);
    for (double w : model.omega)
        bath.nbar.push_back(cfg.temperature_k > 0.0 ? bose_einstein(w, cfg.temperature_k) : 0.0);
    return bath;
}

// ---- experiments ---------------------------------------------------------

void run_propagate(const RunConfig& cfg) {
    LoadedModel lm = prepare(cfg);
    OperatorMatrix h = build_hamiltonian(lm.file.model, lm.layout);
    Trajectory traj = propagate_exact(h, lm.psi0, output_grid(cfg.t_final_fs, cfg.dt_out_fs));
    write_trajectory(std::filesystem::path(cfg.out_dir) / "trajectory.csv", cfg, traj, false);
    if (traj.leakage_warning)
        std::fprintf(stderr, "warning: top Fock level population exceeded %g\n",
                     default_leak_threshold);
}

void run_trotter_scan(const RunConfig& cfg) {
    LoadedModel lm = prepare(cfg);
    std::vector<double> dts = cfg.dt_list_fs;
    if (dts.empty()) dts = {0.15, 0.3, 0.5, 1.0, 1.5};
    TrotterPlan plan = per_mode_partition(lm.file.model, lm.layout,
                                          scheme_from(cfg.trotter_scheme), cfg.trotter_dt_fs,
                                          cfg.stark_split);
    ScanResult scan = trotter_error_scan(plan, dts, cfg.t_final_fs, lm.psi0);
    CsvFile csv(std::filesystem::path(cfg.out_dir) / "scan.csv", cfg);
    csv.line("dt_fs,max_pop_error,min_fidelity,fitted_order");
    for (const auto& row : scan.rows)
        csv.row({row.dt_fs, row.max_pop_error, row.min_fidelity, scan.fitted_order});
}

void run_compare_schemes(const RunConfig& cfg) {
    LoadedModel lm = prepare(cfg);
    TrotterPlan res = per_mode_partition(lm.file.model, lm.layout, TrotterScheme::rescaling,
                                         cfg.trotter_dt_fs, cfg.stark_split);
    TrotterPlan rew = res;
    rew.scheme = TrotterScheme::rewinding;
    SchemeComparison cmp = compare_schemes(res, rew, lm.psi0, cfg.t_final_fs);
    CsvFile csv(std::filesystem::path(cfg.out_dir) / "compare.csv", cfg);
    csv.line("time_fs,fidelity_rescaling,fidelity_rewinding,abs_difference");
    for (std::size_t s = 0; s < cmp.times_fs.size(); ++s)
        csv.row({cmp.times_fs[s], cmp.fidelity_rescaling[s], cmp.fidelity_rewinding[s],
                 std::abs(cmp.fidelity_rescaling[s] - cmp.fidelity_rewinding[s])});
}

void run_open_system(const RunConfig& cfg) {
    LoadedModel lm = prepare(cfg);
    OperatorMatrix h = build_hamiltonian(lm.file.model, lm.layout);
    DensityOperator rho0 = pure_density(lm.psi0, lm.layout);
    const std::vector<double> grid = output_grid(cfg.t_final_fs, cfg.dt_out_fs);
    std::vector<double> gammas = cfg.gamma0_grid;
    if (gammas.empty()) gammas = {cfg.gamma0};

    CsvFile summary(std::filesystem::path(cfg.out_dir) / "sweep_summary.csv", cfg);
    summary.line("gamma0,peak_to_trough_pop,file");
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        BathSpec bath = make_bath(cfg, lm.file.model, gammas[i]);
        if (cfg.broadband) {
            BroadbandApprox approx = broadband_cooling_approx(bath);
            if (!approx.valid)
                throw InfeasibleError("broadband approximation invalid: max nbar = " +
                                      std::to_string(approx.max_nbar) + " >= 1");
            bath = approx.bath;
        }
        Trajectory traj = propagate_lindblad(rho0, h, bath, grid);
        const std::string name = "open_g" + std::to_string(i) + ".csv";
        write_trajectory(std::filesystem::path(cfg.out_dir) / name, cfg, traj, true);

        // amplitude of the initial electronic state's population, late window
        double lo = 1.0, hi = 0.0;
        for (std::size_t s = 0; s < traj.size(); ++s) {
            if (traj.times[s] < cfg.t_final_fs / 3.0) continue;
            const double p =
                traj.populations[static_cast<std::size_t>(cfg.electronic_index)][s];
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        summary.row({gammas[i], hi - lo, static_cast<double>(i)});
    }
}

void run_map(const RunConfig& cfg) {
    LoadedModel lm = prepare(cfg);
    MQBParams params = map_to_mqb(lm.file.model, cfg.f, roles_from(lm.file));
    CsvFile csv(std::filesystem::path(cfg.out_dir) / "mqb_params.csv", cfg);
    csv.line("parameter,index,value_ev,value_rad_per_fs");
    csv.stream() << "F,-," << fmt(params.f) << ",-\n";
    for (std::size_t j = 0; j < params.delta.size(); ++j)
        csv.stream() << "delta," << j << "," << fmt(params.delta[j]) << ","
                     << fmt(params.delta[j] / hbar_ev_fs) << "\n";
    for (int n = 0; n < params.theta_prime.rows(); ++n)
        for (int j = 0; j < params.theta_prime.cols(); ++j)
            if (params.theta_prime(n, j) != 0.0)
                csv.stream() << "theta_prime," << n << ";" << j << ","
                             << fmt(params.theta_prime(n, j)) << ","
                             << fmt(params.theta_prime(n, j) / hbar_ev_fs) << "\n";
    for (std::size_t k = 0; k < params.omega_prime.size(); ++k)
        for (int n = 0; n < params.omega_prime[k].rows(); ++n)
            for (int m = n + 1; m < params.omega_prime[k].cols(); ++m)
                if (params.omega_prime[k](n, m) != 0.0)
                    csv.stream() << "omega_prime," << n << ";" << m << ";" << k << ","
                                 << fmt(params.omega_prime[k](n, m)) << ","
                                 << fmt(params.omega_prime[k](n, m) / hbar_ev_fs) << "\n";
    for (std::size_t n = 0; n < params.chi.size(); ++n)
        csv.stream() << "chi," << n << "," << fmt(params.chi[n]) << ","
                     << fmt(params.chi[n] / hbar_ev_fs) << "\n";

    if (!cfg.hardware_path.empty()) {
        HardwareSpec hw = load_hardware(cfg.hardware_path);
        PhysicalDrives drives = laser_drive_requirements(params, hw);
        CsvFile dcsv(std::filesystem::path(cfg.out_dir) / "drives.csv", cfg);
        dcsv.line("drive,index,value_rad_per_fs");
        for (int n = 0; n < drives.theta.rows(); ++n)
            for (int j = 0; j < drives.theta.cols(); ++j)
                if (drives.theta(n, j) != 0.0)
                    dcsv.stream() << "theta," << n << ";" << j << ","
                                  << fmt(drives.theta(n, j) / hbar_ev_fs) << "\n";
        for (std::size_t k = 0; k < drives.omega.size(); ++k)
            for (int n = 0; n < drives.omega[k].rows(); ++n)
                for (int m = n + 1; m < drives.omega[k].cols(); ++m)
                    if (drives.omega[k](n, m) != 0.0)
                        dcsv.stream() << "omega," << n << ";" << m << ";" << k << ","
                                      << fmt(drives.omega[k](n, m) / hbar_ev_fs) << "\n";
    }
}

void run_feasibility(const RunConfig& cfg) {
    if (cfg.hardware_path.empty()) throw ParseError("config: hardware path is required");
    LoadedModel lm = prepare(cfg);
    HardwareSpec hw = load_hardware(cfg.hardware_path);
    ScaleFactorBounds b =
        scale_factor_bounds(cfg.t_max_fs, hw, cfg.trotter_m, lm.file.model, cfg.dt_mol_fs);

    CsvFile txt(std::filesystem::path(cfg.out_dir) / "feasibility.txt", cfg);
    txt.stream() << "F_min = " << fmt(b.f_min) << "\n"
                 << "F_max_coupling = " << fmt(b.f_max_coupling) << "\n"
                 << "F_max_timestep = " << fmt(b.f_max_timestep) << "\n"
                 << "recommended_F = " << fmt(b.recommended) << "\n"
                 << "feasible = " << (b.feasible ? "yes" : "no") << "\n";
    if (!b.feasible)
        throw InfeasibleError("F_min = " + fmt(b.f_min) + " exceeds F_max = " +
                              fmt(b.recommended));
}

void run_resources(const RunConfig& cfg) {
    ResourceReport r = resource_estimate(cfg.resources_n, cfg.resources_d, cfg.resources_basis);
    CsvFile txt(std::filesystem::path(cfg.out_dir) / "resources.txt", cfg);
    txt.stream() << "modes = " << r.modes << "\n"
                 << "states = " << r.states << "\n"
                 << "digital_qubits = " << r.digital_qubits << "\n"
                 << "trapped_ions = " << r.trapped_ions << "\n"
                 << "qudit_carrier_ions = " << r.qudit_carrier_ions
                 << "  (the qudit host is counted separately from the vibration carriers)\n"
                 << "resonators = " << r.resonators << "\n"
                 << "classical_memory_bytes = " << r.classical_bytes << " (log10 = "
                 << fmt(r.classical_log10_bytes) << ")\n";
}

}  // namespace

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }

    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ParseError("override must be KEY=VALUE: " + ov);
        std::string key = ov.substr(0, eq);
        const std::string raw = ov.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::exception&) {
            value = raw;  // plain string
        }
        for (auto& c : key)
            if (c == '.') c = '/';
        j[json::json_pointer("/" + key)] = value;
    }

    RunConfig cfg;
    try {
        cfg.experiment = j.at("experiment").get<std::string>();
        if (j.contains("model")) cfg.model_path = j["model"].get<std::string>();
        if (j.contains("truncations")) cfg.truncations = j["truncations"].get<std::vector<int>>();
        if (j.contains("initial_state")) {
            const auto& is = j["initial_state"];
            if (is.contains("electronic_index"))
                cfg.electronic_index = is["electronic_index"].get<int>();
            if (is.contains("displacements"))
                cfg.displacements = is["displacements"].get<std::vector<double>>();
        }
        if (j.contains("time")) {
            const auto& t = j["time"];
            if (t.contains("t_final_fs")) cfg.t_final_fs = t["t_final_fs"].get<double>();
            if (t.contains("dt_out_fs")) cfg.dt_out_fs = t["dt_out_fs"].get<double>();
        }
        if (j.contains("trotter")) {
            const auto& t = j["trotter"];
            if (t.contains("scheme")) cfg.trotter_scheme = t["scheme"].get<std::string>();
            if (t.contains("dt_fs")) cfg.trotter_dt_fs = t["dt_fs"].get<double>();
            if (t.contains("stark_split"))
                cfg.stark_split = t["stark_split"].get<std::vector<double>>();
            if (t.contains("dt_list_fs"))
                cfg.dt_list_fs = t["dt_list_fs"].get<std::vector<double>>();
        }
        if (j.contains("bath")) {
            const auto& b = j["bath"];
            if (b.contains("gamma0")) cfg.gamma0 = b["gamma0"].get<double>();
            if (b.contains("omega_cut_ev")) cfg.omega_cut_ev = b["omega_cut_ev"].get<double>();
            if (b.contains("temperature_k")) cfg.temperature_k = b["temperature_k"].get<double>();
            if (b.contains("gamma0_grid"))
                cfg.gamma0_grid = b["gamma0_grid"].get<std::vector<double>>();
            if (b.contains("broadband")) cfg.broadband = b["broadband"].get<bool>();
        }
        if (j.contains("hardware")) cfg.hardware_path = j["hardware"].get<std::string>();
        if (j.contains("mapping")) {
            const auto& m = j["mapping"];
            if (m.contains("F")) cfg.f = m["F"].get<double>();
            if (m.contains("t_max_fs")) cfg.t_max_fs = m["t_max_fs"].get<double>();
            if (m.contains("M")) cfg.trotter_m = m["M"].get<int>();
            if (m.contains("dt_mol_fs")) cfg.dt_mol_fs = m["dt_mol_fs"].get<double>();
        }
        if (j.contains("resources")) {
            const auto& r = j["resources"];
            if (r.contains("N")) cfg.resources_n = r["N"].get<int>();
            if (r.contains("d")) cfg.resources_d = r["d"].get<int>();
            if (r.contains("basis")) cfg.resources_basis = r["basis"].get<int>();
        }
        if (j.contains("output")) {
            const auto& o = j["output"];
            if (o.contains("dir")) cfg.out_dir = o["dir"].get<std::string>();
            if (o.contains("timestamps")) cfg.timestamps = o["timestamps"].get<bool>();
        }
        if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned long long>();
        if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }

    if (!kExperiments.count(cfg.experiment))
        throw ParseError("config: unknown experiment \"" + cfg.experiment + "\"");
    for (int t : cfg.truncations)
        if (t < 2) throw ParseError("config: truncations must be >= 2");

    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a(j.dump())));
    cfg.config_hash = hash;
    return cfg;
}

void run(const RunConfig& cfg) {
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    kernels::set_parallel_enabled(cfg.threads != 1);
    std::filesystem::create_directories(cfg.out_dir);

    if (cfg.experiment == "propagate")
        run_propagate(cfg);
    else if (cfg.experiment == "trotter-scan")
        run_trotter_scan(cfg);
    else if (cfg.experiment == "compare-schemes")
        run_compare_schemes(cfg);
    else if (cfg.experiment == "open-system")
        run_open_system(cfg);
    else if (cfg.experiment == "map")
        run_map(cfg);
    else if (cfg.experiment == "feasibility")
        run_feasibility(cfg);
    else if (cfg.experiment == "resources")
        run_resources(cfg);
    else
        throw ParseError("unknown experiment: " + cfg.experiment);
}

}  // namespace mqb
