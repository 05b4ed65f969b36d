#include "orbcorr/solver.hpp"

#include <cmath>
#include <string>

#include "orbcorr/rng.hpp"

namespace orbcorr {

namespace {

// amplitude with the largest magnitude made real positive
void fix_phase(Eigen::VectorXcd& v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best + 1e-15) {
      best = a;
      imax = i;
    }
  }
  const std::complex<double> z = v[imax];
  if (std::abs(z) == 0.0) return;
  v *= std::conj(z) / std::abs(z);
}

GroundStateResult finish(const SparseHamiltonian& H, double energy,
                         const Eigen::VectorXd& x, double gap, int matvecs,
                         double tol) {
  GroundStateResult res;
  res.energy = energy;
  res.gap = gap;
  res.degenerate = gap < 1e-8;
  res.matvecs = matvecs;
  res.psi.basis = H.basis;
  res.psi.amps = x.normalized().cast<std::complex<double>>();
  fix_phase(res.psi.amps);
  const Eigen::VectorXd xr = res.psi.amps.real();
  Eigen::VectorXd hx;
  H.multiply(xr, hx);
  res.residual = (hx - energy * xr).norm();
  if (res.residual > tol * std::max(1.0, std::abs(energy)))
    throw ConvergenceError(res.residual, "post-solve residual check failed: " +
                                             std::to_string(res.residual));
  return res;
}

GroundStateResult solve_dense(const SparseHamiltonian& H, const SolverConfig& cfg) {
  const Eigen::MatrixXd A = H.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const double e0 = es.eigenvalues()[0];
  const double gap = A.rows() > 1 ? es.eigenvalues()[1] - e0 : INFINITY;
  return finish(H, e0, es.eigenvectors().col(0), gap, 0, cfg.tol);
}

GroundStateResult solve_lanczos(const SparseHamiltonian& H, const SolverConfig& cfg) {
  const std::int64_t n = H.dim();
  const int m = static_cast<int>(std::min<std::int64_t>(cfg.krylov_dim, n));
  Rng rng(derive_seed(cfg.seed, 0x6c616e637a6f73ULL));
  Eigen::VectorXd v(n);
  for (std::int64_t i = 0; i < n; ++i) v[i] = rng.gauss();
  v.normalize();

  int matvecs = 0;
  double best_residual = INFINITY;
  Eigen::MatrixXd V(n, m);
  Eigen::VectorXd alpha(m), beta(m), w(n);

  while (matvecs < cfg.max_iter) {
    V.col(0) = v;
    int built = 0;
    for (int j = 0; j < m && matvecs < cfg.max_iter; ++j) {
      H.multiply(V.col(j), w);
      ++matvecs;
      alpha[j] = V.col(j).dot(w);
      built = j + 1;
      // full reorthogonalization (twice) subsumes the three-term recurrence
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) w -= (V.col(i).dot(w)) * V.col(i);
      beta[j] = w.norm();
      if (j + 1 == m) break;
      if (beta[j] < 1e-13) break;  // invariant subspace reached
      V.col(j + 1) = w / beta[j];
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(built, built);
    for (int j = 0; j < built; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < built) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double theta = es.eigenvalues()[0];
    const double gap = built > 1 ? es.eigenvalues()[1] - theta : INFINITY;
    Eigen::VectorXd x = V.leftCols(built) * es.eigenvectors().col(0);
    x.normalize();
    H.multiply(x, w);
    ++matvecs;
    const double res = (w - theta * x).norm();
    best_residual = std::min(best_residual, res);
    if (res <= cfg.tol * std::max(1.0, std::abs(theta)))
      return finish(H, theta, x, gap, matvecs, cfg.tol);
    v = x;  // restart from the Ritz vector
  }
  throw ConvergenceError(best_residual, "lanczos did not reach tolerance within " +
                                            std::to_string(cfg.max_iter) +
                                            " matvecs; best residual " +
                                            std::to_string(best_residual));
}

}  // namespace

GroundStateResult ground_state(const SparseHamiltonian& H, const SolverConfig& cfg) {
  if (H.dim() < 1) throw std::invalid_argument("empty Hamiltonian");
  const bool dense = cfg.method == SolverConfig::Method::dense ||
                     (cfg.method == SolverConfig::Method::auto_select &&
                      H.dim() <= cfg.dense_cutoff);
  return dense ? solve_dense(H, cfg) : solve_lanczos(H, cfg);
}

}  // namespace orbcorr
