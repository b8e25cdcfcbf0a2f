// constants.hpp — unit system and tool identity
//
// Energies are eV, times are fs, temperatures are K. hbar carries the
// eV<->fs conversion; angular frequencies in rad/fs are energy/hbar.

#pragma once

namespace mqb {

inline constexpr double hbar_ev_fs = 0.6582119569;     // eV * fs
inline constexpr double kb_ev_per_k = 8.617333262e-5;  // eV / K

inline constexpr const char* tool_version = "0.1.0";

// Dense eigendecomposition is allowed for repeated propagation up to this
// dimension; larger problems always go through Krylov on the vector.
inline constexpr long dense_propagation_limit = 512;

// Dimensions below this keep a dense mirror of the sparse operator and use
// dense mat-vec.
inline constexpr long dense_storage_limit = 64;

// Default warning threshold for population in the top Fock level of any mode.
inline constexpr double default_leak_threshold = 1e-4;

}  // namespace mqb
