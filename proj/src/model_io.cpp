#include "mqb/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "mqb/errors.hpp"

namespace mqb {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

Eigen::MatrixXd read_matrix(const json& j, const std::string& name, int rows, int cols) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw ParseError(name + ": expected " + std::to_string(rows) + " rows");
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError(name + ": row " + std::to_string(r) + " must have " +
                             std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

ModelFile parse_model(const json& j, const std::string& path) {
    if (!j.contains("units") || j["units"].get<std::string>() != "eV")
        throw ParseError(path + ": units tag \"eV\" is required");
    ModelFile out;
    VCModel& m = out.model;
    m.d = j.at("d").get<int>();
    m.num_modes = j.at("N").get<int>();
    if (m.d < 1 || m.num_modes < 1) throw ParseError(path + ": d and N must be >= 1");
    m.omega = j.at("omega").get<std::vector<double>>();
    if (static_cast<int>(m.omega.size()) != m.num_modes)
        throw ParseError(path + ": omega must have N entries");
    m.c0 = read_matrix(j.at("c0"), "c0", m.d, m.d);
    const auto& c1 = j.at("c1");
    if (!c1.is_array() || static_cast<int>(c1.size()) != m.num_modes)
        throw ParseError(path + ": c1 must have N entries");
    for (int jj = 0; jj < m.num_modes; ++jj)
        m.c1.push_back(read_matrix(c1[static_cast<std::size_t>(jj)],
                                   "c1[" + std::to_string(jj) + "]", m.d, m.d));
    if (j.contains("c2")) {
        m.c2.assign(static_cast<std::size_t>(m.num_modes * m.num_modes),
                    Eigen::MatrixXd::Zero(m.d, m.d));
        for (const auto& rec : j["c2"]) {
            const int a = rec.at("j").get<int>();
            const int b = rec.at("k").get<int>();
            const int n = rec.at("n").get<int>();
            const int l = rec.at("m").get<int>();
            const double v = rec.at("value").get<double>();
            if (a < 0 || a >= m.num_modes || b < 0 || b >= m.num_modes || n < 0 || n >= m.d ||
                l < 0 || l >= m.d)
                throw ParseError(path + ": c2 record index out of range");
            // mirror onto the symmetry images
            m.c2_at(a, b)(n, l) = v;
            m.c2_at(a, b)(l, n) = v;
            m.c2_at(b, a)(n, l) = v;
            m.c2_at(b, a)(l, n) = v;
        }
    }
    if (j.contains("state_labels"))
        m.state_labels = j["state_labels"].get<std::vector<std::string>>();
    if (j.contains("mode_labels"))
        m.mode_labels = j["mode_labels"].get<std::vector<std::string>>();
    if (j.contains("roles")) out.roles = j["roles"].get<std::vector<std::string>>();
    if (j.contains("source")) out.source = j["source"].get<std::string>();
    return out;
}

}  // namespace

ModelFile load_model(const std::string& path) {
    const json j = read_json(path);
    ModelFile out;
    try {
        out = parse_model(j, path);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        out.model.validate();
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return out;
}

ValidationReport validate_model_file(const std::string& path) {
    ValidationReport report;
    json j;
    try {
        j = read_json(path);
    } catch (const std::exception& e) {
        report.fail(e.what());
        return report;
    }
    if (!j.contains("units"))
        report.fail("missing units tag (\"eV\" required)");
    else if (j["units"].get<std::string>() != "eV")
        report.fail("units must be \"eV\", got \"" + j["units"].get<std::string>() + "\"");
    j["units"] = "eV";  // keep parsing to collect the remaining problems

    ModelFile mf;
    try {
        mf = parse_model(j, path);
    } catch (const std::exception& e) {
        report.fail(e.what());
        return report;
    }

    const VCModel& m = mf.model;
    for (int jj = 0; jj < m.num_modes; ++jj)
        if (!(m.omega[static_cast<std::size_t>(jj)] > 0.0))
            report.fail("omega[" + std::to_string(jj) + "] must be positive");
    for (int n = 0; n < m.d; ++n)
        for (int l = n + 1; l < m.d; ++l)
            if (m.c0(n, l) != m.c0(l, n))
                report.fail("c0[" + std::to_string(n) + "][" + std::to_string(l) +
                            "] != c0[" + std::to_string(l) + "][" + std::to_string(n) + "]");
    for (int jj = 0; jj < m.num_modes; ++jj)
        for (int n = 0; n < m.d; ++n)
            for (int l = n + 1; l < m.d; ++l)
                if (m.c1[static_cast<std::size_t>(jj)](n, l) !=
                    m.c1[static_cast<std::size_t>(jj)](l, n))
                    report.fail("c1[" + std::to_string(jj) + "][" + std::to_string(n) + "][" +
                                std::to_string(l) + "] != c1[" + std::to_string(jj) + "][" +
                                std::to_string(l) + "][" + std::to_string(n) + "]");
    if (!m.state_labels.empty() && static_cast<int>(m.state_labels.size()) != m.d)
        report.fail("state_labels count != d");
    if (!m.mode_labels.empty() && static_cast<int>(m.mode_labels.size()) != m.num_modes)
        report.fail("mode_labels count != N");

    if (!mf.roles.empty()) {
        if (static_cast<int>(mf.roles.size()) != m.num_modes) {
            report.fail("roles count != N");
        } else {
            for (int jj = 0; jj < m.num_modes; ++jj) {
                const std::string& r = mf.roles[static_cast<std::size_t>(jj)];
                if (r != "tuning" && r != "coupling" && r != "both") {
                    report.fail("roles[" + std::to_string(jj) + "]: unknown role \"" + r + "\"");
                    continue;
                }
                const auto& cj = m.c1[static_cast<std::size_t>(jj)];
                bool diag = false, offdiag = false;
                for (int n = 0; n < m.d; ++n) {
                    if (cj(n, n) != 0.0) diag = true;
                    for (int l = n + 1; l < m.d; ++l)
                        if (cj(n, l) != 0.0) offdiag = true;
                }
                if (diag && r == "coupling")
                    report.fail("mode " + std::to_string(jj) +
                                " has diagonal couplings but role \"coupling\"");
                if (offdiag && r == "tuning")
                    report.fail("mode " + std::to_string(jj) +
                                " has off-diagonal couplings but role \"tuning\"");
            }
        }
    }
    return report;
}

HardwareSpec load_hardware(const std::string& path) {
    const json j = read_json(path);
    HardwareSpec hw;
    try {
        hw.tau_d_fs = j.at("tau_d_fs").get<double>();
        hw.max_coupling = j.at("max_coupling_rad_per_fs").get<double>();
        hw.dt_sim_min_fs = j.at("dt_sim_min_fs").get<double>();
        hw.eta = j.at("eta").get<std::vector<double>>();
        hw.debye_waller = j.at("debye_waller").get<std::vector<double>>();
        if (j.contains("alpha")) hw.alpha = j["alpha"].get<double>();
        if (j.contains("omega_ion_rad_per_fs"))
            hw.omega_ion = j["omega_ion_rad_per_fs"].get<std::vector<double>>();
        if (j.contains("gamma_range_rad_per_fs")) {
            hw.gamma_min = j["gamma_range_rad_per_fs"].at(0).get<double>();
            hw.gamma_max = j["gamma_range_rad_per_fs"].at(1).get<double>();
        }
        if (j.contains("omega0_range_rad_per_fs")) {
            hw.omega0_min = j["omega0_range_rad_per_fs"].at(0).get<double>();
            hw.omega0_max = j["omega0_range_rad_per_fs"].at(1).get<double>();
        }
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        hw.validate();
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return hw;
}

}  // namespace mqb
