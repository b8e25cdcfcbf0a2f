// model_io.hpp — structured-text (JSON) ingestion of models and hardware specs
//
// Model files must carry a units tag ("eV"). Quadratic terms are given as a
// sparse list of {j, k, n, m, value} records; each record is mirrored onto
// its symmetry images (j<->k, n<->m).

#pragma once

#include <string>
#include <vector>

#include "mqb/mqb_mapping.hpp"
#include "mqb/vc_model.hpp"

namespace mqb {

struct ModelFile {
    VCModel model;
    std::vector<std::string> roles;  // per mode: "tuning" | "coupling" | "both"; may be empty
    std::string source;              // free-text provenance from the file
};

ModelFile load_model(const std::string& path);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> messages;

    void fail(std::string msg) {
        ok = false;
        messages.push_back(std::move(msg));
    }
};

// Full file check: parse, units tag, tensor symmetry (offending indices
// named), positive frequencies, label counts, role consistency.
ValidationReport validate_model_file(const std::string& path);

// Hardware files use rad/fs for rates/frequencies and fs for times.
HardwareSpec load_hardware(const std::string& path);

}  // namespace mqb
