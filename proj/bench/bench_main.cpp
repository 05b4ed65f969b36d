// Timing comparison of the OpenMP kernels against their serial references:
// Hamiltonian assembly, repeated matvec, and the classical-state walk.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <Eigen/Dense>

#include "orbcorr/fock.hpp"
#include "orbcorr/hamiltonian.hpp"
#include "orbcorr/integrals.hpp"
#include "orbcorr/measures.hpp"
#include "orbcorr/rdm.hpp"
#include "orbcorr/rng.hpp"
#include "orbcorr/rotations.hpp"
#include "orbcorr/solver.hpp"

using namespace orbcorr;

namespace {

template <class F>
double time_of(F&& f, int reps = 1) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

IntegralSet chain_hubbard(int D) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < D; ++i) edges.push_back({i, i + 1});
  return build_hubbard(D, edges, 1.0, 4.0);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif

  for (const int D : {8, 10}) {
    const IntegralSet ints = chain_hubbard(D);
    auto basis = build_sector_basis(D, D, 0);
    std::printf("\nchain D=%d, sector dim %lld\n", D,
                static_cast<long long>(basis->size()));

    SparseHamiltonian H;
    const double ta = time_of([&] { H = assemble_hamiltonian(ints, basis); });
    const double ts = time_of([&] { (void)assemble_hamiltonian_serial(ints, basis); });
    std::printf("  assembly   parallel %8.3f ms   serial %8.3f ms   speedup %.2fx\n",
                ta * 1e3, ts * 1e3, ts / ta);

    Rng rng(1);
    Eigen::VectorXd x(H.dim()), y(H.dim());
    for (int i = 0; i < x.size(); ++i) x(i) = rng.gauss();
    const int reps = 20;
    const double ma = time_of([&] { H.multiply(x, y); }, reps);
    const double ms = time_of([&] { H.multiply_serial(x, y); }, reps);
    std::printf("  matvec     parallel %8.3f ms   serial %8.3f ms   speedup %.2fx\n",
                ma * 1e3, ms * 1e3, ms / ma);
  }

  {
    // overlapping rotations leave the pair reduction genuinely mixed
    WaveFunction rot = apply_rotation(k_fold_bond_state(2),
                                      jacobi_rotation(4, 1, 2, 0.7853981633974483));
    rot = apply_rotation(rot, jacobi_rotation(4, 2, 3, 0.5));
    const Eigen::MatrixXcd rho = two_orbital_rdm(rot, 1, 2);
    WalkConfig cfg;
    const double tw = time_of([&] { (void)closest_classical_state(rho, 4, 4, cfg); });
    std::printf("\nclassical-state walk (%d restarts x %d steps): %8.1f ms\n",
                cfg.restarts, cfg.steps, tw * 1e3);
    EntanglementConfig ecfg;
    const double te =
        time_of([&] { (void)entanglement_mixed_upper(rho, 4, 4, ecfg); });
    std::printf("separable-bound search  (%d FW iterations + refinement): %8.1f ms\n",
                ecfg.fw_iterations, te * 1e3);
  }
  return 0;
}
