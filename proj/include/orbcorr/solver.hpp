#pragma once
// Lowest eigenpair of a sector Hamiltonian: dense diagonalization for small
// dimensions, restarted Lanczos with full reorthogonalization otherwise.

#include <stdexcept>

#include "orbcorr/hamiltonian.hpp"

namespace orbcorr {

struct SolverConfig {
  enum class Method { dense, lanczos, auto_select };
  Method method = Method::auto_select;
  double tol = 1e-10;        // residual threshold, relative to max(1, |E|)
  int max_iter = 4000;       // matrix-vector product budget (lanczos)
  int krylov_dim = 80;       // per restart cycle
  std::uint64_t seed = 1;    // start vector
  std::int64_t dense_cutoff = 2000;  // auto_select switches above this
};

struct GroundStateResult {
  double energy = 0.0;
  WaveFunction psi;
  double residual = 0.0;  // ||H psi - E psi||, recomputed after the solve
  double gap = 0.0;       // estimate of E1 - E0 from the same solve
  bool degenerate = false;  // gap < 1e-8
  int matvecs = 0;
};

struct ConvergenceError : std::runtime_error {
  double best_residual;
  ConvergenceError(double r, const std::string& what_)
      : std::runtime_error(what_), best_residual(r) {}
};

// throws ConvergenceError when the residual bound is not reached within the
// matvec budget; deterministic for a given config
GroundStateResult ground_state(const SparseHamiltonian& H, const SolverConfig& cfg = {});

}  // namespace orbcorr
