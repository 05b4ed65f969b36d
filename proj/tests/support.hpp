#pragma once
// Shared oracles for the test suites, implemented independently of the
// library's reordering/RDM machinery: full-Fock-space operator matrices,
// inversion-count permutation signs, and a brute-force pair reduction that
// works directly on 4^D amplitudes.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "orbcorr/fock.hpp"
#include "orbcorr/integrals.hpp"
#include "orbcorr/rng.hpp"

namespace testsupport {

using orbcorr::Det;

// f+_m over the full 2^(2D)-dim Fock space, ket convention f0^dag f1^dag ...
inline Eigen::MatrixXd full_creation(int D, int mode) {
  const int dim = 1 << (2 * D);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(dim, dim);
  for (int d = 0; d < dim; ++d) {
    if ((d >> mode) & 1) continue;
    int sign = 1;
    for (int k = 0; k < mode; ++k)
      if ((d >> k) & 1) sign = -sign;
    C(d | (1 << mode), d) = sign;
  }
  return C;
}

// parity of the inversions in a sequence of distinct integers
inline int inversion_sign(const std::vector<int>& seq) {
  int inv = 0;
  for (std::size_t a = 0; a < seq.size(); ++a)
    for (std::size_t b = a + 1; b < seq.size(); ++b)
      if (seq[a] > seq[b]) ++inv;
  return (inv & 1) ? -1 : 1;
}

// sector wavefunction embedded as full-Fock-space amplitudes
inline Eigen::VectorXcd embed_full(const orbcorr::WaveFunction& psi) {
  const int D = psi.basis->orbitals;
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(1 << (2 * D));
  for (std::int64_t k = 0; k < psi.basis->size(); ++k)
    full(static_cast<int>(psi.basis->dets[k])) = psi.amps(k);
  return full;
}

// 16x16 reduction onto orbitals (i, j), index 4*loc_i + loc_j, computed by
// regrouping the full amplitude vector with inversion-count signs
inline Eigen::MatrixXcd brute_pair_rdm(const orbcorr::WaveFunction& psi, int i, int j) {
  const int D = psi.basis->orbitals;
  const int front[4] = {2 * (i - 1), 2 * (i - 1) + 1, 2 * (j - 1), 2 * (j - 1) + 1};
  std::vector<int> rest;
  for (int m = 0; m < 2 * D; ++m)
    if (m != front[0] && m != front[1] && m != front[2] && m != front[3])
      rest.push_back(m);
  const Eigen::VectorXcd full = embed_full(psi);
  Eigen::MatrixXcd grouped = Eigen::MatrixXcd::Zero(16, 1 << (2 * D - 4));
  for (int d = 0; d < full.size(); ++d) {
    if (full(d) == std::complex<double>(0.0, 0.0)) continue;
    // old modes listed in their regrouped ket order: front first, then rest
    std::vector<int> seq;
    int a = 0, r = 0;
    for (int k = 0; k < 4; ++k)
      if ((d >> front[k]) & 1) {
        seq.push_back(front[k]);
        a |= 1 << k;
      }
    for (std::size_t k = 0; k < rest.size(); ++k)
      if ((d >> rest[k]) & 1) {
        seq.push_back(rest[k]);
        r |= 1 << k;
      }
    const int loc = 4 * ((a & 1) + 2 * ((a >> 1) & 1)) + ((a >> 2) & 1) + 2 * ((a >> 3) & 1);
    grouped(loc, r) += double(inversion_sign(seq)) * full(d);
  }
  return grouped * grouped.adjoint();
}

// Hilbert-Schmidt random density matrix
inline Eigen::MatrixXcd random_density(int dim, std::uint64_t seed) {
  orbcorr::Rng rng(seed);
  Eigen::MatrixXcd G(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) G(r, c) = rng.gauss_complex();
  Eigen::MatrixXcd rho = G * G.adjoint();
  rho /= rho.trace().real();
  return rho;
}

// random normalized sector wavefunction
inline orbcorr::WaveFunction random_state(int D, int N, int tz, std::uint64_t seed) {
  orbcorr::WaveFunction psi;
  psi.basis = orbcorr::build_sector_basis(D, N, tz);
  psi.amps.resize(psi.basis->size());
  orbcorr::Rng rng(seed);
  for (std::int64_t k = 0; k < psi.basis->size(); ++k)
    psi.amps(k) = rng.gauss_complex();
  psi.amps /= psi.amps.norm();
  return psi;
}

// random symmetric integral set over canonical quadruple keys
inline orbcorr::IntegralSet random_integrals(int D, std::uint64_t seed, bool two_body) {
  orbcorr::IntegralSet ints;
  ints.orbitals = D;
  orbcorr::Rng rng(seed);
  Eigen::MatrixXd h(D, D);
  for (int p = 0; p < D; ++p)
    for (int q = 0; q <= p; ++q) h(p, q) = h(q, p) = rng.gauss();
  ints.h = h;
  ints.e_core = rng.gauss();
  if (two_body)
    for (int p = 0; p < D; ++p)
      for (int q = 0; q < D; ++q)
        for (int r = 0; r < D; ++r)
          for (int s = 0; s < D; ++s)
            if (ints.canonical(p, q, r, s) == std::array<int, 4>{p, q, r, s})
              ints.set_g(p, q, r, s, 0.3 * rng.gauss());
  return ints;
}

}  // namespace testsupport
