#pragma once
// Orbital reduced density matrices by fermionic-sign-correct partial trace:
// target orbitals are reordered to the front modes, then amplitudes are
// grouped by the remaining occupation pattern.
//
// Local one-orbital basis order: (|0>, |up>, |down>, |up down>), index
// n_up + 2 n_down. Two-orbital index: 4*loc_i + loc_j (orbital i major).

#include <span>

#include <Eigen/Dense>

#include "orbcorr/fock.hpp"

namespace orbcorr {

// 4x4; i is 1-based
Eigen::MatrixXcd one_orbital_rdm(const WaveFunction& psi, int i);

// 16x16 over (orbital i) x (orbital j); i != j, both 1-based
Eigen::MatrixXcd two_orbital_rdm(const WaveFunction& psi, int i, int j);

// 4^k x 4^k for k <= 2 (larger reductions are out of scope; use
// pure_state_entanglement for entropies across bigger splits)
Eigen::MatrixXcd orbital_rdm(const WaveFunction& psi, std::span<const int> orbitals);

// entanglement entropy of the pure state psi across (orbitals | complement),
// from the singular values of the grouped coefficient matrix; both reduced
// spectra are identical so either side's entropy is returned
double pure_state_entanglement(const WaveFunction& psi, std::span<const int> orbitals);

// component of psi whose orbital occupation lies in loc_mask (bit l set keeps
// local state l); unnormalized, squared norm = sector weight
WaveFunction project_orbital_occupation(const WaveFunction& psi, int orbital,
                                        unsigned loc_mask);

}  // namespace orbcorr
