// harness.hpp — experiment orchestration behind the CLI
//
// One config file drives one experiment; --override KEY=VALUE edits dotted
// paths in the parsed config. Outputs are CSV/plain text, each file headed
// by the tool version and a hash of the effective config. Identical config
// and seed give byte-identical bodies (timestamps only with the flag).

#pragma once

#include <string>
#include <vector>

namespace mqb {

struct RunConfig {
    std::string experiment;  // propagate | trotter-scan | compare-schemes |
                             // open-system | map | feasibility | resources
    std::string model_path;
    std::vector<int> truncations;
    int electronic_index = 0;
    std::vector<double> displacements;  // per mode, optional

    double t_final_fs = 300.0;
    double dt_out_fs = 1.0;

    std::string trotter_scheme = "rescaling";
    double trotter_dt_fs = 0.5;
    std::vector<double> stark_split;
    std::vector<double> dt_list_fs;

    double gamma0 = 0.1;              // 1/(eV fs), Ohmic prefactor
    double omega_cut_ev = 0.3;
    double temperature_k = 300.0;
    std::vector<double> gamma0_grid;  // open-system sweep
    bool broadband = false;

    std::string hardware_path;
    double f = 1.0;
    double t_max_fs = 300.0;
    int trotter_m = 2;
    double dt_mol_fs = 0.5;

    int resources_n = 2;
    int resources_d = 2;
    int resources_basis = 20;

    std::string out_dir = "out";
    unsigned long long seed = 0;
    int threads = 0;
    bool timestamps = false;

    std::string config_hash;  // filled by the loader
};

// Parses the config file and applies KEY=VALUE overrides (dotted paths,
// values parsed as JSON literals). Computes the config hash.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

// Runs the configured experiment; writes artifacts into config.out_dir.
// Throws ParseError/NumericError/InfeasibleError for the CLI to map onto
// exit codes 2/3/4.
void run(const RunConfig& config);

}  // namespace mqb
