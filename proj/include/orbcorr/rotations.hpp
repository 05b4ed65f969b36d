#pragma once
// Orbital-basis rotations applied to CI vectors, reference bond states, and
// the benzene atomic-like transform built from its published two-orbital steps.

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "orbcorr/fock.hpp"

namespace orbcorr {

// identity except the 2x2 block on (1-based) orbitals i, j:
//   row i: (cos t, sin t), row j: (-sin t, cos t)
// so under apply_rotation, new_i = cos(t) old_i + sin(t) old_j
Eigen::MatrixXd jacobi_rotation(int D, int i, int j, double theta);

// the published 6x6 map from benzene p_z ring orbitals to canonical MOs
// (rows = MOs over ring-ordered sites; rows 1..3 are the occupied ones)
Eigen::MatrixXd benzene_printed_u();

// inverse transform U^-1 composed from the three two-orbital rotation steps;
// the step registers end up holding the atomic-like orbitals in permuted
// slots, so rows are relabeled by matching against U^T and the match is
// asserted to 1e-12 (throws std::runtime_error with the residual otherwise)
Eigen::MatrixXd benzene_atomiclike();

// Re-expresses psi on the rotated orbitals chi_p = sum_q R(p,q) phi_q
// (rows of R are the new orbitals over the old ones; same R for both spins).
// Realized as a product of lifted plane rotations from a Givens factorization;
// preserves the (N, 2Sz) sector and the norm (checked to 1e-12). Sequential
// changes compose right to left: applying R1 then R2 equals applying R2*R1.
WaveFunction apply_rotation(const WaveFunction& psi, const Eigen::MatrixXd& R);

// rows = eigenvectors of the symmetric matrix h, ascending eigenvalues,
// each row's largest-|entry| component made positive
Eigen::MatrixXd canonical_rows(const Eigen::MatrixXd& h);

// cos(t)|1_A 0_B> + e^{i phi} sin(t)|0_A 1_B>, one up electron on 2 orbitals
WaveFunction single_electron_state(double theta, double phi);

// definite-bond states on 2 orbitals (phi = orbital 1, phibar = orbital 2):
//   1: f+_{phi u}|vac>              2: f+_{phi u} f+_{phi d}|vac>
//   3: f+_{phi u} f+_{phi d} f+_{phibar u}|vac>   4: all four modes filled
WaveFunction bond_state(int which);

// product of K doubly-occupied bonding orbitals, bond k on orbitals (2k-1, 2k)
WaveFunction k_fold_bond_state(int K);

// plain-text row-major matrix I/O: first line "rows cols", then entries
Eigen::MatrixXd read_matrix(const std::string& path);
void write_matrix(const Eigen::MatrixXd& m, std::ostream& out);

}  // namespace orbcorr
