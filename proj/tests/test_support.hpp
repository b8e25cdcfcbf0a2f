// test_support.hpp — shared helpers for the test suites

#pragma once

#include <cstdlib>
#include <random>
#include <string>

#include "mqb/vc_model.hpp"

namespace mqb::testing {

inline std::string data_dir() {
    const char* env = std::getenv("MQBSIM_DATA");
    return env ? env : "data";
}

// Random LVC model with diagonal c0 (the domain of the MQB mapping).
inline VCModel random_lvc(std::mt19937& rng, int d, int n_modes, double coupling_scale = 0.1) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VCModel m;
    m.d = d;
    m.num_modes = n_modes;
    for (int j = 0; j < n_modes; ++j) m.omega.push_back(0.05 + 0.1 * std::abs(u(rng)));
    m.c0 = Eigen::MatrixXd::Zero(d, d);
    for (int n = 0; n < d; ++n) m.c0(n, n) = 0.5 * u(rng);
    for (int j = 0; j < n_modes; ++j) {
        Eigen::MatrixXd cj(d, d);
        for (int n = 0; n < d; ++n) {
            cj(n, n) = coupling_scale * u(rng);
            for (int l = n + 1; l < d; ++l) cj(n, l) = cj(l, n) = coupling_scale * u(rng);
        }
        m.c1.push_back(cj);
    }
    return m;
}

// Dense oracle operators built independently of the library factories.
inline Eigen::MatrixXcd dense_annihilation(int n_max) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_max, n_max);
    for (int n = 1; n < n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline Eigen::MatrixXcd dense_position(int n_max) {
    const Eigen::MatrixXcd a = dense_annihilation(n_max);
    return (a + a.adjoint()) / std::sqrt(2.0);
}

inline Eigen::MatrixXcd dense_momentum(int n_max) {
    const Eigen::MatrixXcd a = dense_annihilation(n_max);
    return std::complex<double>(0.0, 1.0) * (a.adjoint() - a) / std::sqrt(2.0);
}

}  // namespace mqb::testing
