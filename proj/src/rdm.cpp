#include "orbcorr/rdm.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <Eigen/SVD>

namespace orbcorr {

namespace {

struct GroupedAmps {
  // per det of the reordered state: front-space index, rest pattern, amplitude
  struct Entry {
    Det rest;
    int front;
    std::complex<double> amp;
  };
  std::vector<Entry> entries;  // sorted by (rest, front)
  int front_dim;
};

// front index of a reordered det: orbital at front position m contributes
// loc_m * 4^(k-1-m), loc = n_up + 2 n_down
int front_index(Det d, int k) {
  int idx = 0;
  for (int m = 0; m < k; ++m) {
    const int loc = static_cast<int>((d >> (2 * m)) & 1ULL) +
                    2 * static_cast<int>((d >> (2 * m + 1)) & 1ULL);
    idx = idx * 4 + loc;
  }
  return idx;
}

GroupedAmps group_by_rest(const WaveFunction& psi, std::span<const int> orbitals) {
  const int k = static_cast<int>(orbitals.size());
  const WaveFunction re =
      reorder_modes(psi, orbitals_to_front(psi.basis->orbitals, orbitals));
  GroupedAmps out;
  out.front_dim = 1 << (2 * k);
  out.entries.reserve(static_cast<std::size_t>(re.basis->size()));
  const Det front_mask = (1ULL << (2 * k)) - 1;
  for (std::int64_t a = 0; a < re.basis->size(); ++a) {
    const std::complex<double> amp = re.amps[a];
    if (amp == std::complex<double>(0.0, 0.0)) continue;
    const Det d = re.basis->dets[static_cast<std::size_t>(a)];
    out.entries.push_back({d >> (2 * k), front_index(d & front_mask, k), amp});
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const auto& x, const auto& y) {
              return x.rest != y.rest ? x.rest < y.rest : x.front < y.front;
            });
  return out;
}

void check_orbitals(const WaveFunction& psi, std::span<const int> orbitals) {
  for (const int p : orbitals)
    if (p < 1 || p > psi.basis->orbitals)
      throw std::invalid_argument("orbital index out of range: " + std::to_string(p));
  for (std::size_t a = 0; a < orbitals.size(); ++a)
    for (std::size_t b = a + 1; b < orbitals.size(); ++b)
      if (orbitals[a] == orbitals[b])
        throw std::invalid_argument("repeated orbital in reduction list");
}

}  // namespace

Eigen::MatrixXcd orbital_rdm(const WaveFunction& psi, std::span<const int> orbitals) {
  check_orbitals(psi, orbitals);
  if (orbitals.size() < 1 || orbitals.size() > 2)
    throw std::invalid_argument("orbital RDMs supported for 1 or 2 orbitals");
  const GroupedAmps grouped = group_by_rest(psi, orbitals);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(grouped.front_dim, grouped.front_dim);
  std::size_t lo = 0;
  while (lo < grouped.entries.size()) {
    std::size_t hi = lo;
    while (hi < grouped.entries.size() &&
           grouped.entries[hi].rest == grouped.entries[lo].rest)
      ++hi;
    for (std::size_t a = lo; a < hi; ++a)
      for (std::size_t b = lo; b < hi; ++b)
        rho(grouped.entries[a].front, grouped.entries[b].front) +=
            grouped.entries[a].amp * std::conj(grouped.entries[b].amp);
    lo = hi;
  }
  // drop sub-roundoff crumbs so downstream eigen/log calls stay stable
  for (Eigen::Index r = 0; r < rho.rows(); ++r)
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
      if (std::abs(rho(r, c)) < 1e-14) rho(r, c) = 0.0;
  return rho;
}

Eigen::MatrixXcd one_orbital_rdm(const WaveFunction& psi, int i) {
  const int orbs[1] = {i};
  return orbital_rdm(psi, orbs);
}

Eigen::MatrixXcd two_orbital_rdm(const WaveFunction& psi, int i, int j) {
  if (i == j) throw std::invalid_argument("two-orbital RDM needs distinct orbitals");
  const int orbs[2] = {i, j};
  return orbital_rdm(psi, orbs);
}

double pure_state_entanglement(const WaveFunction& psi, std::span<const int> orbitals) {
  check_orbitals(psi, orbitals);
  const int k = static_cast<int>(orbitals.size());
  if (k < 1 || 2 * k >= 64)
    throw std::invalid_argument("bad reduction size");
  const GroupedAmps grouped = group_by_rest(psi, orbitals);
  // entries are sorted by rest: assign column indices on the fly
  std::vector<Det> rest_values;
  for (const auto& e : grouped.entries)
    if (rest_values.empty() || rest_values.back() != e.rest)
      rest_values.push_back(e.rest);
  Eigen::MatrixXcd M =
      Eigen::MatrixXcd::Zero(grouped.front_dim, static_cast<Eigen::Index>(rest_values.size()));
  std::size_t col = 0;
  for (const auto& e : grouped.entries) {
    while (rest_values[col] != e.rest) ++col;
    M(e.front, static_cast<Eigen::Index>(col)) = e.amp;
  }
  const Eigen::VectorXd sv = M.jacobiSvd().singularValues();
  double s = 0.0;
  for (Eigen::Index a = 0; a < sv.size(); ++a) {
    const double p = sv[a] * sv[a];
    if (p > 1e-14) s -= p * std::log(p);
  }
  return s;
}

WaveFunction project_orbital_occupation(const WaveFunction& psi, int orbital,
                                        unsigned loc_mask) {
  if (orbital < 1 || orbital > psi.basis->orbitals)
    throw std::invalid_argument("orbital index out of range");
  const int mu = mode_index(orbital, Spin::up);
  const int md = mode_index(orbital, Spin::down);
  WaveFunction out;
  out.basis = psi.basis;
  out.amps.setZero(psi.amps.size());
  for (std::int64_t a = 0; a < psi.basis->size(); ++a) {
    const Det d = psi.basis->dets[static_cast<std::size_t>(a)];
    const int loc = static_cast<int>(occupied(d, mu)) +
                    2 * static_cast<int>(occupied(d, md));
    if (loc_mask & (1u << loc)) out.amps[a] = psi.amps[a];
  }
  return out;
}

}  // namespace orbcorr
