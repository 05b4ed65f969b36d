#include "orbcorr/fock.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace orbcorr {

namespace {

// next bit pattern with the same popcount (Gosper's hack); v != 0
Det next_bit_permutation(Det v) {
  const Det t = v | (v - 1);
  return (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
}

// all masks of `bits` bits with exactly `count` set, ascending as integers
std::vector<Det> masks_with_popcount(int bits, int count) {
  std::vector<Det> out;
  if (count == 0) {
    out.push_back(0);
    return out;
  }
  if (count > bits) return out;
  const Det top = ((1ULL << count) - 1) << (bits - count);
  Det v = (1ULL << count) - 1;
  while (true) {
    out.push_back(v);
    if (v == top) break;
    v = next_bit_permutation(v);
  }
  return out;
}

// spread a spin-channel mask onto even (up) or odd (down) bit positions
Det interleave(Det channel, int offset) {
  Det out = 0;
  while (channel) {
    const int k = std::countr_zero(channel);
    channel &= channel - 1;
    out |= 1ULL << (2 * k + offset);
  }
  return out;
}

}  // namespace

std::int64_t SectorBasis::find(Det d) const {
  const auto it = std::lower_bound(dets.begin(), dets.end(), d, lex_less);
  if (it == dets.end() || *it != d) return -1;
  return it - dets.begin();
}

std::shared_ptr<const SectorBasis> build_sector_basis(int orbitals, int particles,
                                                      int two_sz) {
  if (orbitals < 1 || 2 * orbitals > 64)
    throw std::invalid_argument("orbital count out of range: " +
                                std::to_string(orbitals));
  if (particles < 0 || particles > 2 * orbitals)
    throw std::invalid_argument("particle count out of range: " +
                                std::to_string(particles));
  if ((particles + two_sz) % 2 != 0)
    throw std::invalid_argument("particle number and 2*Sz must have equal parity");
  const int n_up = (particles + two_sz) / 2;
  const int n_dn = (particles - two_sz) / 2;
  if (n_up < 0 || n_dn < 0 || n_up > orbitals || n_dn > orbitals)
    throw std::invalid_argument("no states with N=" + std::to_string(particles) +
                                ", 2Sz=" + std::to_string(two_sz) + " in " +
                                std::to_string(orbitals) + " orbitals");

  auto basis = std::make_shared<SectorBasis>();
  basis->orbitals = orbitals;
  basis->particles = particles;
  basis->two_sz = two_sz;

  const auto ups = masks_with_popcount(orbitals, n_up);
  const auto downs = masks_with_popcount(orbitals, n_dn);
  basis->dets.reserve(ups.size() * downs.size());
  for (const Det u : ups)
    for (const Det d : downs)
      basis->dets.push_back(interleave(u, 0) | interleave(d, 1));
  std::sort(basis->dets.begin(), basis->dets.end(), lex_less);
  return basis;
}

double occupation(const WaveFunction& psi, int orbital, Spin s) {
  const int m = mode_index(orbital, s);
  double acc = 0.0;
  const auto& dets = psi.basis->dets;
  for (std::size_t i = 0; i < dets.size(); ++i)
    if (occupied(dets[i], m)) acc += std::norm(psi.amps[static_cast<long>(i)]);
  return acc;
}

WaveFunction reorder_modes(const WaveFunction& psi, std::span<const int> new_order) {
  const int modes = 2 * psi.basis->orbitals;
  if (static_cast<int>(new_order.size()) != modes)
    throw std::invalid_argument("mode permutation has wrong length");
  std::vector<char> seen(modes, 0);
  for (int j = 0; j < modes; ++j) {
    const int m = new_order[j];
    if (m < 0 || m >= modes || seen[m])
      throw std::invalid_argument("mode permutation is not a bijection");
    if (m % 2 != j % 2)
      throw std::invalid_argument("mode permutation must map up modes to up "
                                  "positions and down to down");
    seen[m] = 1;
  }
  // position of old mode m in the new labeling
  std::vector<int> new_pos(modes);
  for (int j = 0; j < modes; ++j) new_pos[new_order[j]] = j;

  WaveFunction out;
  out.basis = psi.basis;  // same (N, 2Sz) sector, only labels move
  out.amps = Eigen::VectorXcd::Zero(psi.amps.size());

  std::vector<int> occ;
  occ.reserve(64);
  const auto& dets = psi.basis->dets;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (psi.amps[static_cast<long>(i)] == std::complex<double>(0.0, 0.0)) continue;
    Det d = dets[i];
    occ.clear();
    Det nd = 0;
    while (d) {
      const int m = std::countr_zero(d);
      d &= d - 1;
      occ.push_back(new_pos[m]);  // ascending old-mode order = operator order
      nd |= 1ULL << new_pos[m];
    }
    // parity of the permutation that sorts the relabeled operator string
    int swaps = 0;
    for (std::size_t a = 1; a < occ.size(); ++a)
      for (std::size_t b = 0; b < a; ++b)
        if (occ[b] > occ[a]) ++swaps;
    const std::int64_t k = psi.basis->find(nd);
    out.amps[k] = ((swaps & 1) ? -1.0 : 1.0) * psi.amps[static_cast<long>(i)];
  }
  return out;
}

std::vector<int> orbitals_to_front(int orbitals, std::span<const int> front) {
  std::vector<char> taken(orbitals + 1, 0);
  std::vector<int> orb_order;
  orb_order.reserve(orbitals);
  for (const int p : front) {
    if (p < 1 || p > orbitals || taken[p])
      throw std::invalid_argument("bad orbital in front list: " + std::to_string(p));
    taken[p] = 1;
    orb_order.push_back(p);
  }
  for (int p = 1; p <= orbitals; ++p)
    if (!taken[p]) orb_order.push_back(p);
  std::vector<int> order(2 * orbitals);
  for (int j = 0; j < orbitals; ++j) {
    order[2 * j] = mode_index(orb_order[j], Spin::up);
    order[2 * j + 1] = mode_index(orb_order[j], Spin::down);
  }
  return order;
}

}  // namespace orbcorr
