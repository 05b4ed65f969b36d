#pragma once
// Fermionic Fock-space plumbing: machine-word determinants over interleaved
// spin orbitals, fixed-(N, Sz) sector bases, and the signed mode reordering
// that realizes tensor factorizations of configuration states.
//
// Conventions used everywhere in this library:
//   mode index of (orbital p, spin s) = 2*(p-1) + (0 for up, 1 for down)
//   |n_0, n_1, ...> = (f_0^dag)^{n_0} (f_1^dag)^{n_1} ... |vac>
// so a creation operator on mode m picks up (-1)^(occupied modes below m).
// Orbitals are 1-based in the public API; modes are 0-based.

#include <bit>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace orbcorr {

using Det = std::uint64_t;

enum class Spin : int { up = 0, down = 1 };

inline int mode_index(int orbital, Spin s) {
  return 2 * (orbital - 1) + static_cast<int>(s);
}

inline bool occupied(Det d, int mode) { return (d >> mode) & 1ULL; }

inline int particle_count(Det d) { return std::popcount(d); }

// 2*Sz of a configuration: up modes sit on even bits
inline int two_sz_of(Det d) {
  return std::popcount(d & 0x5555555555555555ULL) -
         std::popcount(d & 0xaaaaaaaaaaaaaaaaULL);
}

// sign == 0 marks a vanished result
struct SignedDet {
  Det det = 0;
  int sign = 0;
};

inline SignedDet apply_creation(Det d, int mode) {
  if (occupied(d, mode)) return {0, 0};
  const Det below = d & ((1ULL << mode) - 1);
  return {d | (1ULL << mode), (std::popcount(below) & 1) ? -1 : 1};
}

inline SignedDet apply_annihilation(Det d, int mode) {
  if (!occupied(d, mode)) return {0, 0};
  const Det below = d & ((1ULL << mode) - 1);
  return {d & ~(1ULL << mode), (std::popcount(below) & 1) ? -1 : 1};
}

// order on occupation sequences (n_0, n_1, ...): first differing mode decides,
// empty before occupied
inline bool lex_less(Det a, Det b) {
  const Det x = a ^ b;
  if (!x) return false;
  const int k = std::countr_zero(x);
  return !((a >> k) & 1ULL);
}

struct SectorBasis {
  int orbitals = 0;
  int particles = 0;
  int two_sz = 0;
  std::vector<Det> dets;  // sorted by lex_less

  std::int64_t size() const { return static_cast<std::int64_t>(dets.size()); }
  // index of a determinant, -1 if not in the sector
  std::int64_t find(Det d) const;
};

// enumerates every determinant with the requested particle number and spin
// projection; throws std::invalid_argument for impossible sectors or 2*orbitals > 64
std::shared_ptr<const SectorBasis> build_sector_basis(int orbitals, int particles,
                                                      int two_sz);

struct WaveFunction {
  std::shared_ptr<const SectorBasis> basis;
  Eigen::VectorXcd amps;

  double norm() const { return amps.norm(); }
};

// <n_{orbital, spin}>
double occupation(const WaveFunction& psi, int orbital, Spin s);

// Relabel modes so that new position j holds old mode new_order[j]; amplitudes
// pick up the parity of the occupied-mode permutation. new_order must be a
// bijection on modes that keeps the up/down pattern (new_order[j] % 2 == j % 2),
// which every whole-orbital move satisfies; the sector is then unchanged.
WaveFunction reorder_modes(const WaveFunction& psi, std::span<const int> new_order);

// mode permutation that moves the given orbitals (1-based, in order) to the
// front, remaining orbitals following in ascending order
std::vector<int> orbitals_to_front(int orbitals, std::span<const int> front);

}  // namespace orbcorr
