// mqbsim — vibronic-dynamics simulation and MQB hardware-mapping CLI
//
// exit codes: 0 ok, 1 usage, 2 parse/validation, 3 numeric failure,
// 4 infeasible mapping

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mqb/constants.hpp"
#include "mqb/errors.hpp"
#include "mqb/harness.hpp"
#include "mqb/mqb_mapping.hpp"
#include "mqb/model_io.hpp"

namespace {

int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const mqb::ParseError& e) {
        std::fprintf(stderr, "error kind=parse reason=\"%s\"\n", e.what());
        return 2;
    } catch (const mqb::InfeasibleError& e) {
        std::fprintf(stderr, "error kind=infeasible reason=\"%s\"\n", e.what());
        return 4;
    } catch (const mqb::NumericError& e) {
        std::fprintf(stderr, "error kind=numeric reason=\"%s\"\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error kind=invalid reason=\"%s\"\n", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mqbsim: vibronic dynamics on mixed qudit-boson simulators"};
    app.set_version_flag("--version", std::string(mqb::tool_version));
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    int threads = 0;
    long long seed = -1;
    bool timestamps = false;
    run_cmd->add_option("--config", config_path, "config file (JSON)")->required();
    run_cmd->add_option("--override", overrides, "KEY=VALUE config override (repeatable)");
    run_cmd->add_option("--out", out_dir, "output directory (overrides config)");
    run_cmd->add_option("--threads", threads, "worker threads (0 = hardware default)");
    run_cmd->add_option("--seed", seed, "random seed recorded in output headers");
    run_cmd->add_flag("--timestamps", timestamps, "emit timestamps in output headers");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "check a model file");
    std::string model_path;
    val_cmd->add_option("model", model_path, "model file (JSON)")->required();

    // map
    auto* map_cmd = app.add_subcommand("map", "map a model onto MQB parameters");
    std::string map_model, map_hw, map_out = "out";
    double map_f = 1.0;
    map_cmd->add_option("--model", map_model, "model file")->required();
    map_cmd->add_option("--f", map_f, "scale factor F");
    map_cmd->add_option("--hardware", map_hw, "hardware spec (for drive strengths)");
    map_cmd->add_option("--out", map_out, "output directory");

    // resources
    auto* res_cmd = app.add_subcommand("resources", "hardware resource estimates");
    int res_n = 2, res_d = 2, res_b = 20;
    res_cmd->add_option("--modes", res_n, "number of vibrational modes")->required();
    res_cmd->add_option("--states", res_d, "number of electronic states");
    res_cmd->add_option("--basis", res_b, "classical basis size per mode");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) {
        return guarded([&] {
            mqb::RunConfig cfg = mqb::load_config(config_path, overrides);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (threads != 0) cfg.threads = threads;
            if (seed >= 0) cfg.seed = static_cast<unsigned long long>(seed);
            if (timestamps) cfg.timestamps = true;
            mqb::run(cfg);
        });
    }
    if (val_cmd->parsed()) {
        return guarded([&] {
            mqb::ValidationReport report = mqb::validate_model_file(model_path);
            for (const auto& msg : report.messages)
                std::fprintf(stderr, "validate: %s\n", msg.c_str());
            if (!report.ok) throw mqb::ParseError(model_path + ": validation failed");
            std::printf("%s: ok\n", model_path.c_str());
        });
    }
    if (map_cmd->parsed()) {
        return guarded([&] {
            mqb::RunConfig cfg;
            cfg.experiment = "map";
            cfg.model_path = map_model;
            cfg.hardware_path = map_hw;
            cfg.f = map_f;
            cfg.out_dir = map_out;
            cfg.config_hash = "cli";
            mqb::run(cfg);
        });
    }
    if (res_cmd->parsed()) {
        return guarded([&] {
            mqb::ResourceReport r = mqb::resource_estimate(res_n, res_d, res_b);
            std::printf("modes = %d\nstates = %d\n", r.modes, r.states);
            std::printf("digital_qubits = %ld\n", r.digital_qubits);
            std::printf("trapped_ions = %ld (+%ld qudit carrier)\n", r.trapped_ions,
                        r.qudit_carrier_ions);
            std::printf("resonators = %ld\n", r.resonators);
            std::printf("classical_memory_bytes = %s\n", r.classical_bytes.c_str());
        });
    }
    return 1;
}
