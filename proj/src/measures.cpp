#include "orbcorr/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace orbcorr {

namespace {

constexpr double kEigFloor = 1e-14;      // entropy support cutoff
constexpr double kKernelEig = 1e-12;     // sigma kernel threshold
constexpr double kKernelWeight = 1e-10;  // rho weight tolerated on the kernel

void check_square(const Eigen::MatrixXcd& rho, int dA, int dB, const char* who) {
  if (dA < 1 || dB < 1 || rho.rows() != dA * dB || rho.cols() != dA * dB)
    throw std::invalid_argument(std::string(who) + ": matrix is not dA*dB square");
}

double prob_entropy(const Eigen::VectorXd& q) {
  double s = 0.0;
  for (int i = 0; i < q.size(); ++i)
    if (q(i) > kEigFloor) s -= q(i) * std::log(q(i));
  return s;
}

}  // namespace

double vn_entropy(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("vn_entropy: not square");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-8)
    throw std::invalid_argument("vn_entropy: trace deviates from one by " +
                                std::to_string(std::abs(tr - 1.0)));
  Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return prob_entropy(es.eigenvalues());
}

double relative_entropy(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  if (rho.rows() != rho.cols() || sigma.rows() != sigma.cols() ||
      rho.rows() != sigma.rows())
    throw std::invalid_argument("relative_entropy: dimension mismatch");
  Eigen::MatrixXcd hs = 0.5 * (sigma + sigma.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hs);
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXcd& v = es.eigenvectors();

  // diagonal of rho in sigma's eigenbasis
  Eigen::MatrixXcd rv = rho * v;
  Eigen::VectorXd w(lam.size());
  for (int i = 0; i < lam.size(); ++i) w(i) = std::real(v.col(i).dot(rv.col(i)));

  double kernel_weight = 0.0, tr_rho_ln_sigma = 0.0;
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) < kKernelEig)
      kernel_weight += std::max(0.0, w(i));
    else
      tr_rho_ln_sigma += w(i) * std::log(lam(i));
  }
  if (kernel_weight > kKernelWeight)
    return std::numeric_limits<double>::infinity();
  return -vn_entropy(rho) - tr_rho_ln_sigma;
}

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, int dA, int dB, int keep) {
  check_square(rho, dA, dB, "partial_trace");
  if (keep != 0 && keep != 1)
    throw std::invalid_argument("partial_trace: keep must be 0 (A) or 1 (B)");
  if (keep == 0) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dA, dA);
    for (int a = 0; a < dA; ++a)
      for (int c = 0; c < dA; ++c)
        for (int b = 0; b < dB; ++b) out(a, c) += rho(a * dB + b, c * dB + b);
    return out;
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dB, dB);
  for (int b = 0; b < dB; ++b)
    for (int d = 0; d < dB; ++d)
      for (int a = 0; a < dA; ++a) out(b, d) += rho(a * dB + b, a * dB + d);
  return out;
}

double mutual_information(const Eigen::MatrixXcd& rho, int dA, int dB) {
  return vn_entropy(partial_trace(rho, dA, dB, 0)) +
         vn_entropy(partial_trace(rho, dA, dB, 1)) - vn_entropy(rho);
}

std::array<int, 4> orbital_grading(Ssr mode) {
  switch (mode) {
    case Ssr::parity:
      return {0, 1, 1, 0};
    case Ssr::number:
      return {0, 1, 1, 2};
    default:
      return {0, 0, 0, 0};
  }
}

Eigen::MatrixXcd ssr_project(const Eigen::MatrixXcd& rho, int dA, int dB, Ssr mode) {
  check_square(rho, dA, dB, "ssr_project");
  if (mode == Ssr::none) return rho;
  if (dA != 4 || dB != 4)
    throw std::invalid_argument("ssr_project: charge grading is defined for 4-dim orbital factors only");
  const std::array<int, 4> g = orbital_grading(mode);
  Eigen::MatrixXcd out = rho;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          if (g[a] != g[c] || g[b] != g[d]) out(a * 4 + b, c * 4 + d) = 0.0;
  return out;
}

namespace {

Eigen::MatrixXcd product_unitary(const Eigen::MatrixXcd& ua, const Eigen::MatrixXcd& ub) {
  const int dA = static_cast<int>(ua.rows()), dB = static_cast<int>(ub.rows());
  Eigen::MatrixXcd m(dA * dB, dA * dB);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dB; ++j)
      for (int a = 0; a < dA; ++a)
        for (int b = 0; b < dB; ++b) m(a * dB + b, i * dB + j) = ua(a, i) * ub(b, j);
  return m;
}

Eigen::VectorXd dephasing_probs(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd c = rho * m;
  Eigen::VectorXd q(m.cols());
  for (int j = 0; j < m.cols(); ++j)
    q(j) = std::max(0.0, std::real(m.col(j).dot(c.col(j))));
  return q;
}

// M-th root of a unitary through its spectral decomposition; principal
// branch keeps the root within O(1/M) of the identity for Haar W
Eigen::MatrixXcd unitary_root(const Eigen::MatrixXcd& w, int m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(w);
  Eigen::VectorXcd lam = ces.eigenvalues();
  Eigen::VectorXcd r(lam.size());
  for (int i = 0; i < lam.size(); ++i)
    r(i) = std::polar(1.0, std::arg(lam(i)) / static_cast<double>(m));
  return ces.eigenvectors() * r.asDiagonal() * ces.eigenvectors().inverse();
}

// QR with the R-diagonal phase fix: leaves a near-unitary input essentially
// unchanged while restoring orthonormality lost to accumulated rounding
void reorthonormalize(Eigen::MatrixXcd& u) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(u);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < u.cols(); ++j) {
    std::complex<double> rd = r(j, j);
    double a = std::abs(rd);
    q.col(j) *= (a > 0) ? rd / a : 1.0;
  }
  u = q;
}

double walk_objective(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& ua,
                      const Eigen::MatrixXcd& ub) {
  return prob_entropy(dephasing_probs(rho, product_unitary(ua, ub)));
}

}  // namespace

ClassicalStateResult closest_classical_state(const Eigen::MatrixXcd& rho, int dA,
                                             int dB, const WalkConfig& cfg) {
  check_square(rho, dA, dB, "closest_classical_state");
  if (cfg.restarts < 1 || cfg.steps < 0 || cfg.step_divisor < 1)
    throw std::invalid_argument("closest_classical_state: bad walk configuration");

  ClassicalStateResult res;
  res.seed = cfg.seed;
  res.s_rho = vn_entropy(rho);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esa(partial_trace(rho, dA, dB, 0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esb(partial_trace(rho, dA, dB, 1));

  double global_best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXcd best_a, best_b;

  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(derive_seed(cfg.seed, 0x636c6173730000ULL + static_cast<std::uint64_t>(r)));
    Eigen::MatrixXcd ua, ub;
    if (r == 0) {
      ua = Eigen::MatrixXcd::Identity(dA, dA);
      ub = Eigen::MatrixXcd::Identity(dB, dB);
    } else if (r == 1) {
      ua = esa.eigenvectors();
      ub = esb.eigenvectors();
    } else {
      ua = haar_unitary(dA, rng);
      ub = haar_unitary(dB, rng);
    }

    double cur = walk_objective(rho, ua, ub);
    double best = cur;
    Eigen::MatrixXcd ba = ua, bb = ub;
    int since_orth = 0;

    for (int n = 0; n < cfg.steps; ++n) {
      Eigen::MatrixXcd ta = ua * unitary_root(haar_unitary(dA, rng), cfg.step_divisor);
      Eigen::MatrixXcd tb = ub * unitary_root(haar_unitary(dB, rng), cfg.step_divisor);
      const double val = walk_objective(rho, ta, tb);
      bool take = val < cur;
      if (!take && cfg.annealed) {
        const double t = cfg.anneal_t0 * (1.0 - static_cast<double>(n) / cfg.steps);
        if (t > 0.0 && rng.uniform() < std::exp((cur - val) / t)) take = true;
      }
      if (!take) continue;
      ua.swap(ta);
      ub.swap(tb);
      cur = val;
      ++res.accepted;
      if (++since_orth >= 256) {
        reorthonormalize(ua);
        reorthonormalize(ub);
        cur = walk_objective(rho, ua, ub);
        since_orth = 0;
      }
      if (cur < best) {
        best = cur;
        ba = ua;
        bb = ub;
      }
    }
    res.restart_best.push_back(best);
    if (best < global_best) {
      global_best = best;
      best_a.swap(ba);
      best_b.swap(bb);
    }
  }

  reorthonormalize(best_a);
  reorthonormalize(best_b);
  res.basis_a = best_a;
  res.basis_b = best_b;

  Eigen::MatrixXcd m = product_unitary(best_a, best_b);
  Eigen::VectorXd q = dephasing_probs(rho, m);
  q /= q.sum();
  res.chi = m * q.cast<std::complex<double>>().asDiagonal() * m.adjoint();
  res.chi = 0.5 * (res.chi + res.chi.adjoint()).eval();
  res.q_value = relative_entropy(rho, res.chi);
  return res;
}

double classical_correlation(const ClassicalStateResult& res, int dA, int dB) {
  return mutual_information(res.chi, dA, dB);
}

double entanglement_pure(const Eigen::MatrixXcd& rho, int dA, int dB) {
  check_square(rho, dA, dB, "entanglement_pure");
  const double purity = (rho * rho).trace().real();
  if (purity < 1.0 - 1e-10)
    throw std::invalid_argument(
        "entanglement_pure: purity " + std::to_string(purity) +
        " indicates a mixed state; use entanglement_mixed_upper");
  const double sa = vn_entropy(partial_trace(rho, dA, dB, 0));
  const double sb = vn_entropy(partial_trace(rho, dA, dB, 1));
  if (std::abs(sa - sb) > 1e-10)
    throw std::runtime_error("entanglement_pure: reduction entropies disagree by " +
                             std::to_string(std::abs(sa - sb)));
  return 0.5 * (sa + sb);
}

Eigen::MatrixXcd SeparableEnsemble::density(int dA, int dB) const {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dA * dB, dA * dB);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    Eigen::VectorXcd p(dA * dB);
    for (int ia = 0; ia < dA; ++ia)
      for (int ib = 0; ib < dB; ++ib) p(ia * dB + ib) = a[k](ia) * b[k](ib);
    s.noalias() += weights[k] * (p * p.adjoint());
  }
  return 0.5 * (s + s.adjoint());
}

namespace {

struct Atom {
  Eigen::VectorXcd a, b;   // unit local factors
  Eigen::VectorXcd prod;   // a (x) b, composite index ia*dB+ib
  double w = 0.0;
};

Eigen::VectorXcd product_vec(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd p(a.size() * b.size());
  for (int ia = 0; ia < a.size(); ++ia)
    for (int ib = 0; ib < b.size(); ++ib) p(ia * b.size() + ib) = a(ia) * b(ib);
  return p;
}

Eigen::MatrixXcd mixture(const std::vector<Atom>& atoms, int d) {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d, d);
  for (const Atom& at : atoms)
    if (at.w > 0.0) s.noalias() += at.w * (at.prod * at.prod.adjoint());
  return 0.5 * (s + s.adjoint());
}

// S(rho || (1-eps) sigma + eps I/d); the admixture keeps the argument full
// rank, and since I/d is itself separable the value stays a valid bound
double mixture_objective(const Eigen::MatrixXcd& rho, double s_rho,
                         const Eigen::MatrixXcd& sigma, double eps) {
  const int d = static_cast<int>(sigma.rows());
  Eigen::MatrixXcd se = (1.0 - eps) * sigma;
  se.diagonal().array() += eps / d;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(se);
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXcd& v = es.eigenvectors();
  Eigen::MatrixXcd rv = rho * v;
  double tr_ln = 0.0;
  for (int i = 0; i < d; ++i)
    tr_ln += std::real(v.col(i).dot(rv.col(i))) * std::log(std::max(lam(i), 1e-300));
  return -s_rho - tr_ln;
}

double loewner_log(double x, double y) {
  if (std::abs(x - y) <= 1e-13 * (x + y)) return 2.0 / (x + y);
  return (std::log(x) - std::log(y)) / (x - y);
}

// gradient of -Tr[rho ln sigma_eval] at sigma; negative semidefinite
Eigen::MatrixXcd mixture_gradient(const Eigen::MatrixXcd& rho,
                                  const Eigen::MatrixXcd& sigma, double eps) {
  const int d = static_cast<int>(sigma.rows());
  Eigen::MatrixXcd se = (1.0 - eps) * sigma;
  se.diagonal().array() += eps / d;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(se);
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXcd& v = es.eigenvectors();
  Eigen::MatrixXcd rt = v.adjoint() * rho * v;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      rt(i, j) *= loewner_log(std::max(lam(i), 1e-300), std::max(lam(j), 1e-300));
  Eigen::MatrixXcd g = -(v * rt * v.adjoint());
  return 0.5 * (g + g.adjoint());
}

// min_{unit a,b} <a (x) b| G |a (x) b> by alternating 4x4 (dA x dA / dB x dB)
// minimum-eigenvector sweeps from several starting b vectors
struct OracleOut {
  Eigen::VectorXcd a, b;
  double val = std::numeric_limits<double>::infinity();
};

OracleOut product_min(const Eigen::MatrixXcd& g, int dA, int dB, Rng& rng,
                      const std::vector<const Atom*>& warm) {
  OracleOut out;
  std::vector<Eigen::VectorXcd> b_starts;
  for (const Atom* at : warm) b_starts.push_back(at->b);
  for (int t = 0; t < 3; ++t) {
    Eigen::VectorXcd bv(dB);
    for (int i = 0; i < dB; ++i) bv(i) = rng.gauss_complex();
    b_starts.push_back(bv.normalized());
  }
  Eigen::MatrixXcd ma(dA, dA), mb(dB, dB);
  for (const Eigen::VectorXcd& b0 : b_starts) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(dA), b = b0;
    double prev = std::numeric_limits<double>::infinity(), val = prev;
    for (int sweep = 0; sweep < 40; ++sweep) {
      for (int ia = 0; ia < dA; ++ia)
        for (int ic = 0; ic < dA; ++ic) {
          std::complex<double> z = 0.0;
          for (int ib = 0; ib < dB; ++ib)
            for (int id = 0; id < dB; ++id)
              z += std::conj(b(ib)) * g(ia * dB + ib, ic * dB + id) * b(id);
          ma(ia, ic) = z;
        }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(ma);
      a = ea.eigenvectors().col(0);
      for (int ib = 0; ib < dB; ++ib)
        for (int id = 0; id < dB; ++id) {
          std::complex<double> z = 0.0;
          for (int ia = 0; ia < dA; ++ia)
            for (int ic = 0; ic < dA; ++ic)
              z += std::conj(a(ia)) * g(ia * dB + ib, ic * dB + id) * a(ic);
          mb(ib, id) = z;
        }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eb(mb);
      b = eb.eigenvectors().col(0);
      val = eb.eigenvalues()(0);
      if (std::abs(prev - val) < 1e-13) break;
      prev = val;
    }
    if (val < out.val) {
      out.val = val;
      out.a = a;
      out.b = b;
    }
  }
  return out;
}

// golden-section minimum of f over [0, hi]
template <typename F>
double golden_min(F&& f, double hi, int iters) {
  const double inv_phi = 0.6180339887498949;
  double a = 0.0, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

void normalize_weights(std::vector<Atom>& atoms) {
  double s = 0.0;
  for (Atom& at : atoms) s += std::max(at.w, 0.0);
  for (Atom& at : atoms) at.w = std::max(at.w, 0.0) / s;
}

void drop_negligible(std::vector<Atom>& atoms, std::size_t cap) {
  atoms.erase(std::remove_if(atoms.begin(), atoms.end(),
                             [](const Atom& at) { return at.w < 1e-14; }),
              atoms.end());
  while (atoms.size() > cap) {
    auto it = std::min_element(atoms.begin(), atoms.end(),
                               [](const Atom& x, const Atom& y) { return x.w < y.w; });
    atoms.erase(it);
  }
  normalize_weights(atoms);
}

// multiplicative (exponentiated-gradient) descent on the weight simplex with
// atoms fixed; each step backtracks until the objective does not increase
void polish_weights(const Eigen::MatrixXcd& rho, double s_rho, std::vector<Atom>& atoms,
                    double eps, int d, int rounds) {
  if (atoms.size() < 2) return;
  Eigen::MatrixXcd sigma = mixture(atoms, d);
  double cur = mixture_objective(rho, s_rho, sigma, eps);
  for (int round = 0; round < rounds; ++round) {
    Eigen::MatrixXcd g = mixture_gradient(rho, sigma, eps);
    Eigen::VectorXd gk(atoms.size());
    for (std::size_t k = 0; k < atoms.size(); ++k)
      gk(k) = std::real(atoms[k].prod.dot(g * atoms[k].prod));
    const double scale = gk.cwiseAbs().maxCoeff();
    if (scale <= 0.0) break;
    double eta = 1.0 / scale;
    bool moved = false;
    for (int bt = 0; bt < 8; ++bt) {
      std::vector<Atom> trial = atoms;
      for (std::size_t k = 0; k < trial.size(); ++k)
        trial[k].w *= std::exp(-eta * (gk(k) - gk.minCoeff()));
      normalize_weights(trial);
      Eigen::MatrixXcd ts = mixture(trial, d);
      const double tv = mixture_objective(rho, s_rho, ts, eps);
      if (tv <= cur) {
        atoms.swap(trial);
        sigma.swap(ts);
        cur = tv;
        moved = true;
        break;
      }
      eta *= 0.5;
    }
    if (!moved) break;
  }
}

struct FwOutcome {
  std::vector<Atom> atoms;
  double value = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
};

FwOutcome frank_wolfe(const Eigen::MatrixXcd& rho, double s_rho, std::vector<Atom> atoms,
                      int dA, int dB, const EntanglementConfig& cfg, Rng& rng) {
  const int d = dA * dB;
  normalize_weights(atoms);
  Eigen::MatrixXcd sigma = mixture(atoms, d);
  double cur = mixture_objective(rho, s_rho, sigma, cfg.epsilon);
  FwOutcome best{atoms, cur, std::numeric_limits<double>::infinity()};

  for (int iter = 0; iter < cfg.fw_iterations; ++iter) {
    Eigen::MatrixXcd g = mixture_gradient(rho, sigma, cfg.epsilon);

    Eigen::VectorXd gk(atoms.size());
    for (std::size_t k = 0; k < atoms.size(); ++k)
      gk(k) = std::real(atoms[k].prod.dot(g * atoms[k].prod));

    // warm-start the oracle with the best active atom so the reported gap
    // can never go negative
    std::size_t k_best = 0, k_away = atoms.size();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (gk(k) < gk(k_best)) k_best = k;
      if (atoms[k].w > 1e-14 && (k_away == atoms.size() || gk(k) > gk(k_away)))
        k_away = k;
    }
    std::vector<const Atom*> warm{&atoms[k_best]};
    OracleOut fw = product_min(g, dA, dB, rng, warm);

    double tr_g_sigma = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) tr_g_sigma += atoms[k].w * gk(k);
    const double gap = std::max(0.0, tr_g_sigma - fw.val);
    if (cur < best.value) {
      best.atoms = atoms;
      best.value = cur;
      best.gap = gap;
    } else if (gap < best.gap && std::abs(cur - best.value) < 1e-12) {
      best.gap = gap;
    }
    if (gap <= cfg.fw_gap_tol) break;

    Atom cand;
    cand.a = fw.a;
    cand.b = fw.b;
    cand.prod = product_vec(fw.a, fw.b);

    // pairwise step: move weight from the worst active atom onto the oracle
    // atom; fall back to a plain step toward the oracle atom
    const Eigen::MatrixXcd p_new = cand.prod * cand.prod.adjoint();
    bool pairwise = k_away < atoms.size() && atoms.size() > 1 &&
                    atoms[k_away].w > 1e-12 && k_away != k_best;
    double gamma = 0.0;
    if (pairwise) {
      const Eigen::MatrixXcd p_away = atoms[k_away].prod * atoms[k_away].prod.adjoint();
      const double hi = atoms[k_away].w;
      auto f = [&](double t) {
        return mixture_objective(rho, s_rho, sigma + t * (p_new - p_away), cfg.epsilon);
      };
      gamma = golden_min(f, hi, 30);
      if (f(gamma) >= cur) pairwise = false;
      if (pairwise) {
        sigma += gamma * (p_new - p_away);
        atoms[k_away].w -= gamma;
        cand.w = gamma;
      }
    }
    if (!pairwise) {
      auto f = [&](double t) {
        return mixture_objective(rho, s_rho,
                                 ((1.0 - t) * sigma + t * p_new).eval(), cfg.epsilon);
      };
      gamma = golden_min(f, 1.0, 30);
      if (gamma <= 0.0) break;
      for (Atom& at : atoms) at.w *= (1.0 - gamma);
      sigma = (1.0 - gamma) * sigma + gamma * p_new;
      cand.w = gamma;
    }

    // merge with a coinciding atom instead of duplicating it
    bool merged = false;
    for (Atom& at : atoms) {
      if (std::abs(at.a.dot(cand.a)) > 1.0 - 1e-12 &&
          std::abs(at.b.dot(cand.b)) > 1.0 - 1e-12) {
        at.w += cand.w;
        merged = true;
        break;
      }
    }
    if (!merged) atoms.push_back(std::move(cand));

    if ((iter + 1) % 25 == 0) {
      drop_negligible(atoms, static_cast<std::size_t>(cfg.ensemble_size));
      polish_weights(rho, s_rho, atoms, cfg.epsilon, d, 30);
      sigma = mixture(atoms, d);
    }
    cur = mixture_objective(rho, s_rho, sigma, cfg.epsilon);
  }

  if (cur < best.value) {
    best.atoms = atoms;
    best.value = cur;
  }
  drop_negligible(best.atoms, static_cast<std::size_t>(cfg.ensemble_size));
  best.value = mixture_objective(rho, s_rho, mixture(best.atoms, d), cfg.epsilon);
  return best;
}

// rejection polish: random small moves of single factors or weights,
// accepted only when the objective improves
void perturb_polish(const Eigen::MatrixXcd& rho, double s_rho, std::vector<Atom>& atoms,
                    int dA, int dB, const EntanglementConfig& cfg, Rng& rng,
                    double& value) {
  const int d = dA * dB;
  for (int step = 0; step < cfg.perturb_steps; ++step) {
    if (atoms.empty()) break;
    std::vector<Atom> trial = atoms;
    const int k = rng.index(static_cast<int>(trial.size()));
    const double delta = 0.05 * (1.0 - 0.8 * step / std::max(1, cfg.perturb_steps));
    const int move = rng.index(3);
    if (move == 0) {
      for (int i = 0; i < dA; ++i) trial[k].a(i) += delta * rng.gauss_complex();
      trial[k].a.normalize();
    } else if (move == 1) {
      for (int i = 0; i < dB; ++i) trial[k].b(i) += delta * rng.gauss_complex();
      trial[k].b.normalize();
    } else {
      trial[k].w *= std::exp(delta * rng.gauss());
      normalize_weights(trial);
    }
    trial[k].prod = product_vec(trial[k].a, trial[k].b);
    const double tv = mixture_objective(rho, s_rho, mixture(trial, d), cfg.epsilon);
    if (tv < value) {
      atoms.swap(trial);
      value = tv;
    }
  }
}

// ---- corrective refinement ---------------------------------------------------
// atoms re-parametrized as unnormalized product vectors x_k (x) y_k, so
// sigma(theta) = sum_k (x_k x_k^+) (x) (y_k y_k^+) / tr[...]; the weights live
// in the vector norms and the simplex constraint disappears, leaving a smooth
// unconstrained problem the quasi-Newton steps can drive to the optimum of the
// convex sigma-problem within the current atom support

struct RefineMap {
  int dA = 0, dB = 0, K = 0;
  int per_atom() const { return 2 * (dA + dB); }
  int dim() const { return K * per_atom(); }

  void unpack(const Eigen::VectorXd& th, std::vector<Eigen::VectorXcd>& x,
              std::vector<Eigen::VectorXcd>& y) const {
    x.assign(K, Eigen::VectorXcd(dA));
    y.assign(K, Eigen::VectorXcd(dB));
    for (int k = 0; k < K; ++k) {
      const int o = k * per_atom();
      for (int i = 0; i < dA; ++i)
        x[k](i) = {th(o + 2 * i), th(o + 2 * i + 1)};
      for (int i = 0; i < dB; ++i)
        y[k](i) = {th(o + 2 * dA + 2 * i), th(o + 2 * dA + 2 * i + 1)};
    }
  }
};

// limited-memory BFGS with Armijo backtracking; fg(theta, grad_out) returns
// the objective and fills the gradient when grad_out is non-null
template <typename FG>
double lbfgs_minimize(FG&& fg, Eigen::VectorXd& th, int max_iters) {
  constexpr int mem = 8;
  std::vector<Eigen::VectorXd> sv, yv;
  std::vector<double> rhov;
  Eigen::VectorXd g(th.size()), gn(th.size()), q, thn;
  double f = fg(th, &g);
  int stalled = 0, failed = 0;
  for (int it = 0; it < max_iters; ++it) {
    q = g;
    std::vector<double> alpha(sv.size());
    for (int i = static_cast<int>(sv.size()) - 1; i >= 0; --i) {
      alpha[i] = rhov[i] * sv[i].dot(q);
      q -= alpha[i] * yv[i];
    }
    if (!sv.empty()) q *= sv.back().dot(yv.back()) / yv.back().squaredNorm();
    for (std::size_t i = 0; i < sv.size(); ++i)
      q += (alpha[i] - rhov[i] * yv[i].dot(q)) * sv[i];
    Eigen::VectorXd p = -q;
    double slope = g.dot(p);
    if (slope >= 0.0) {
      sv.clear();
      yv.clear();
      rhov.clear();
      p = -g;
      slope = -g.squaredNorm();
    }
    if (slope > -1e-18) break;
    double step = 1.0, fn = std::numeric_limits<double>::infinity();
    bool ok = false;
    for (int bt = 0; bt < 40; ++bt) {
      thn = th + step * p;
      fn = fg(thn, &gn);
      if (fn <= f + 1e-4 * step * slope) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) {
      if (++failed >= 2) break;
      sv.clear();
      yv.clear();
      rhov.clear();
      continue;
    }
    failed = 0;
    Eigen::VectorXd sk = thn - th, yk = gn - g;
    const double sy = sk.dot(yk);
    if (sy > 1e-14 * sk.norm() * yk.norm()) {
      sv.push_back(std::move(sk));
      yv.push_back(std::move(yk));
      rhov.push_back(1.0 / sy);
      if (static_cast<int>(sv.size()) > mem) {
        sv.erase(sv.begin());
        yv.erase(yv.begin());
        rhov.erase(rhov.begin());
      }
    }
    const double drop = f - fn;
    th.swap(thn);
    g.swap(gn);
    f = fn;
    if (g.norm() <= 1e-10) break;
    stalled = drop <= 1e-14 * (1.0 + std::abs(f)) ? stalled + 1 : 0;
    if (stalled >= 3) break;
  }
  return f;
}

// corrective rounds: optimize all atom coordinates, then test optimality with
// the product oracle and insert its atom when that still helps; for the convex
// sigma-problem a vanishing linearization gap certifies (near-)optimality
void ensemble_refine(const Eigen::MatrixXcd& rho, double s_rho, std::vector<Atom>& atoms,
                     int dA, int dB, const EntanglementConfig& cfg, Rng& rng,
                     double& value, double& gap) {
  const int d = dA * dB;
  if (atoms.empty() || cfg.refine_rounds <= 0) return;
  for (int round = 0; round < cfg.refine_rounds; ++round) {
    drop_negligible(atoms, static_cast<std::size_t>(cfg.ensemble_size));

    RefineMap map{dA, dB, static_cast<int>(atoms.size())};
    Eigen::VectorXd th(map.dim());
    for (int k = 0; k < map.K; ++k) {
      const int o = k * map.per_atom();
      const double r = std::sqrt(std::max(atoms[k].w, 0.0));
      for (int i = 0; i < dA; ++i) {
        th(o + 2 * i) = r * atoms[k].a(i).real();
        th(o + 2 * i + 1) = r * atoms[k].a(i).imag();
      }
      for (int i = 0; i < dB; ++i) {
        th(o + 2 * dA + 2 * i) = atoms[k].b(i).real();
        th(o + 2 * dA + 2 * i + 1) = atoms[k].b(i).imag();
      }
    }

    std::vector<Eigen::VectorXcd> x, y;
    Eigen::VectorXcd pv(d);
    auto fg = [&](const Eigen::VectorXd& t, Eigen::VectorXd* gout) -> double {
      map.unpack(t, x, y);
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
      double s = 0.0;
      for (int k = 0; k < map.K; ++k) {
        for (int i = 0; i < dA; ++i)
          for (int j = 0; j < dB; ++j) pv(i * dB + j) = x[k](i) * y[k](j);
        m.noalias() += pv * pv.adjoint();
        s += pv.squaredNorm();
      }
      if (s < 1e-30) {
        if (gout) gout->setZero(map.dim());
        return 1e30;
      }
      const Eigen::MatrixXcd sigma = m / s;
      const double f = mixture_objective(rho, s_rho, sigma, cfg.epsilon);
      if (gout) {
        Eigen::MatrixXcd gm = (1.0 - cfg.epsilon) * mixture_gradient(rho, sigma, cfg.epsilon);
        const double c = std::real((gm * sigma).trace());
        gm.diagonal().array() -= c;
        gm /= s;
        gout->resize(map.dim());
        for (int k = 0; k < map.K; ++k) {
          Eigen::MatrixXcd bm = Eigen::MatrixXcd::Zero(dA, dA);
          Eigen::MatrixXcd am = Eigen::MatrixXcd::Zero(dB, dB);
          for (int a = 0; a < dA; ++a)
            for (int c2 = 0; c2 < dA; ++c2)
              for (int b = 0; b < dB; ++b)
                for (int d2 = 0; d2 < dB; ++d2) {
                  const std::complex<double> gv = gm(a * dB + b, c2 * dB + d2);
                  bm(a, c2) += gv * std::conj(y[k](b)) * y[k](d2);
                  am(b, d2) += gv * x[k](c2) * std::conj(x[k](a));
                }
          const Eigen::VectorXcd gx = bm * x[k];
          const Eigen::VectorXcd gy = am * y[k];
          const int o = k * map.per_atom();
          for (int i = 0; i < dA; ++i) {
            (*gout)(o + 2 * i) = 2.0 * gx(i).real();
            (*gout)(o + 2 * i + 1) = 2.0 * gx(i).imag();
          }
          for (int i = 0; i < dB; ++i) {
            (*gout)(o + 2 * dA + 2 * i) = 2.0 * gy(i).real();
            (*gout)(o + 2 * dA + 2 * i + 1) = 2.0 * gy(i).imag();
          }
        }
      }
      return f;
    };

    const double f = lbfgs_minimize(fg, th, cfg.refine_iterations);
    map.unpack(th, x, y);
    double s = 0.0;
    for (int k = 0; k < map.K; ++k) s += x[k].squaredNorm() * y[k].squaredNorm();
    std::vector<Atom> next;
    next.reserve(atoms.size());
    for (int k = 0; k < map.K; ++k) {
      const double w = x[k].squaredNorm() * y[k].squaredNorm() / s;
      if (w < 1e-14) continue;
      Atom at;
      at.a = x[k].normalized();
      at.b = y[k].normalized();
      at.prod = product_vec(at.a, at.b);
      at.w = w;
      next.push_back(std::move(at));
    }
    if (next.empty()) return;
    atoms.swap(next);
    // the reported bound must be what the reported ensemble achieves; f is the
    // objective of exactly these atoms (a cap-trim above can have raised it)
    value = f;

    Eigen::MatrixXcd sigma = mixture(atoms, d);
    const Eigen::MatrixXcd g = mixture_gradient(rho, sigma, cfg.epsilon);
    Eigen::VectorXd gk(atoms.size());
    double tr_g_sigma = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      gk(k) = std::real(atoms[k].prod.dot(g * atoms[k].prod));
      tr_g_sigma += atoms[k].w * gk(k);
    }
    std::vector<std::size_t> idx(atoms.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t u, std::size_t v) { return gk(u) < gk(v); });
    std::vector<const Atom*> warm;
    for (std::size_t k = 0; k < std::min<std::size_t>(4, idx.size()); ++k)
      warm.push_back(&atoms[idx[k]]);
    OracleOut lmo = product_min(g, dA, dB, rng, warm);
    gap = std::max(0.0, tr_g_sigma - lmo.val);
    if (gap <= cfg.fw_gap_tol || round + 1 == cfg.refine_rounds) return;

    Atom cand;
    cand.a = lmo.a;
    cand.b = lmo.b;
    cand.prod = product_vec(lmo.a, lmo.b);
    const Eigen::MatrixXcd p_new = cand.prod * cand.prod.adjoint();
    auto fline = [&](double t) {
      return mixture_objective(rho, s_rho, ((1.0 - t) * sigma + t * p_new).eval(),
                               cfg.epsilon);
    };
    const double t_star = golden_min(fline, 1.0, 40);
    const double ft = fline(t_star);
    if (t_star <= 0.0 || ft >= value) return;
    for (Atom& at : atoms) at.w *= (1.0 - t_star);
    cand.w = t_star;
    atoms.push_back(std::move(cand));
    value = ft;
  }
}

}  // namespace

EntanglementResult entanglement_mixed_upper(const Eigen::MatrixXcd& rho, int dA, int dB,
                                            const EntanglementConfig& cfg,
                                            const ClassicalStateResult* chi_seed) {
  check_square(rho, dA, dB, "entanglement_mixed_upper");
  const int d = dA * dB;
  const double s_rho = vn_entropy(rho);

  if ((rho * rho).trace().real() > 1.0 - 1e-10) {
    // pure input: the Schmidt dephasing is the closest separable state
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    const Eigen::VectorXcd psi = es.eigenvectors().col(d - 1);
    Eigen::MatrixXcd m(dA, dB);
    for (int a = 0; a < dA; ++a)
      for (int b = 0; b < dB; ++b) m(a, b) = psi(a * dB + b);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    EntanglementResult res;
    res.seed = cfg.seed;
    res.value = entanglement_pure(rho, dA, dB);
    res.exact_pure = true;
    for (int k = 0; k < svd.singularValues().size(); ++k) {
      const double w = svd.singularValues()(k) * svd.singularValues()(k);
      if (w < 1e-14) continue;
      res.ensemble.weights.push_back(w);
      res.ensemble.a.push_back(svd.matrixU().col(k));
      res.ensemble.b.push_back(svd.matrixV().col(k).conjugate());
    }
    return res;
  }

  std::vector<std::vector<Atom>> starts;

  if (chi_seed != nullptr) {
    // dephasing ensemble: product basis states of the optimal local bases
    Eigen::MatrixXcd m = product_unitary(chi_seed->basis_a, chi_seed->basis_b);
    Eigen::VectorXd q = dephasing_probs(rho, m);
    q /= q.sum();
    std::vector<Atom> atoms;
    for (int i = 0; i < dA; ++i)
      for (int j = 0; j < dB; ++j) {
        const double w = q(i * dB + j);
        if (w < 1e-14) continue;
        Atom at;
        at.a = chi_seed->basis_a.col(i);
        at.b = chi_seed->basis_b.col(j);
        at.prod = product_vec(at.a, at.b);
        at.w = w;
        atoms.push_back(std::move(at));
      }
    if (!atoms.empty()) starts.push_back(std::move(atoms));
  }

  {
    // product of the marginals: sigma0 = rho_A (x) rho_B
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esa(partial_trace(rho, dA, dB, 0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esb(partial_trace(rho, dA, dB, 1));
    std::vector<Atom> atoms;
    for (int i = 0; i < dA; ++i)
      for (int j = 0; j < dB; ++j) {
        const double w = esa.eigenvalues()(i) * esb.eigenvalues()(j);
        if (w < 1e-14) continue;
        Atom at;
        at.a = esa.eigenvectors().col(i);
        at.b = esb.eigenvectors().col(j);
        at.prod = product_vec(at.a, at.b);
        at.w = w;
        atoms.push_back(std::move(at));
      }
    starts.push_back(std::move(atoms));
  }

  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(derive_seed(cfg.seed, 0x656e740000ULL + static_cast<std::uint64_t>(r)));
    std::vector<Atom> atoms;
    for (int k = 0; k < std::min(16, cfg.ensemble_size); ++k) {
      Atom at;
      at.a = Eigen::VectorXcd(dA);
      at.b = Eigen::VectorXcd(dB);
      for (int i = 0; i < dA; ++i) at.a(i) = rng.gauss_complex();
      for (int i = 0; i < dB; ++i) at.b(i) = rng.gauss_complex();
      at.a.normalize();
      at.b.normalize();
      at.prod = product_vec(at.a, at.b);
      at.w = 1.0;
      atoms.push_back(std::move(at));
    }
    starts.push_back(std::move(atoms));
  }

  EntanglementResult res;
  res.epsilon = cfg.epsilon;
  res.seed = cfg.seed;
  res.value = std::numeric_limits<double>::infinity();

  std::vector<Atom> best_atoms;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Rng rng(derive_seed(cfg.seed, 0x66770000ULL + s));
    FwOutcome out = frank_wolfe(rho, s_rho, std::move(starts[s]), dA, dB, cfg, rng);
    perturb_polish(rho, s_rho, out.atoms, dA, dB, cfg, rng, out.value);
    if (out.value < res.value) {
      res.value = out.value;
      best_gap = out.gap;
      best_atoms = std::move(out.atoms);
    }
  }

  // the sigma-problem is convex, so only the winning start needs finishing
  Rng rng(derive_seed(cfg.seed, 0x726566ULL));
  ensemble_refine(rho, s_rho, best_atoms, dA, dB, cfg, rng, res.value, best_gap);
  res.fw_gap = best_gap;
  for (const Atom& at : best_atoms) {
    res.ensemble.weights.push_back(at.w);
    res.ensemble.a.push_back(at.a);
    res.ensemble.b.push_back(at.b);
  }
  return res;
}

double ppt_min_eigenvalue(const Eigen::MatrixXcd& rho, int dA, int dB) {
  check_square(rho, dA, dB, "ppt_min_eigenvalue");
  Eigen::MatrixXcd pt(dA * dB, dA * dB);
  for (int a = 0; a < dA; ++a)
    for (int b = 0; b < dB; ++b)
      for (int c = 0; c < dA; ++c)
        for (int e = 0; e < dB; ++e)
          pt(a * dB + b, c * dB + e) = rho(a * dB + e, c * dB + b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (pt + pt.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

namespace {

Eigen::MatrixXcd random_hermitian(int d, Rng& rng) {
  Eigen::MatrixXcd x(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) x(i, j) = rng.gauss_complex();
  return 0.5 * (x + x.adjoint());
}

double op_norm(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

BoundCheckReport correlation_bound_check(const Eigen::MatrixXcd& rho, int dA, int dB,
                                         int samples, std::uint64_t seed) {
  check_square(rho, dA, dB, "correlation_bound_check");
  BoundCheckReport rep;
  rep.samples = samples;
  rep.bound = std::sqrt(2.0 * std::max(0.0, mutual_information(rho, dA, dB))) + 1e-10;
  Eigen::MatrixXcd ra = partial_trace(rho, dA, dB, 0);
  Eigen::MatrixXcd rb = partial_trace(rho, dA, dB, 1);
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXcd a = random_hermitian(dA, rng);
    Eigen::MatrixXcd b = random_hermitian(dB, rng);
    const double na = op_norm(a), nb = op_norm(b);
    if (na <= 0.0 || nb <= 0.0) continue;
    std::complex<double> joint = 0.0;
    for (int ia = 0; ia < dA; ++ia)
      for (int ib = 0; ib < dB; ++ib)
        for (int ic = 0; ic < dA; ++ic)
          for (int id = 0; id < dB; ++id)
            joint += rho(ic * dB + id, ia * dB + ib) * a(ia, ic) * b(ib, id);
    const double cov = std::real(joint) - std::real((ra * a).trace()) *
                                              std::real((rb * b).trace());
    rep.max_ratio = std::max(rep.max_ratio, std::abs(cov) / (na * nb));
  }
  rep.ok = rep.max_ratio <= rep.bound;
  return rep;
}

SumRuleReport sum_rule_check(const Eigen::MatrixXcd& rho, int dA, int dB,
                             const ClassicalStateResult& chi) {
  SumRuleReport rep;
  const double s_rho = vn_entropy(rho);
  const double s_chi = vn_entropy(chi.chi);
  const double q = relative_entropy(rho, chi.chi);
  rep.dephasing_residual = std::abs(q - (s_chi - s_rho));

  const double i_rho = mutual_information(rho, dA, dB);
  const double i_chi = mutual_information(chi.chi, dA, dB);
  const double lhs = i_rho - q - i_chi;
  const double rhs = vn_entropy(partial_trace(rho, dA, dB, 0)) +
                     vn_entropy(partial_trace(rho, dA, dB, 1)) -
                     vn_entropy(partial_trace(chi.chi, dA, dB, 0)) -
                     vn_entropy(partial_trace(chi.chi, dA, dB, 1));
  rep.identity_residual = std::abs(lhs - rhs);
  rep.i_minus_q_minus_c = lhs;

  Eigen::MatrixXcd pi = Eigen::MatrixXcd::Zero(dA * dB, dA * dB);
  Eigen::MatrixXcd ra = partial_trace(rho, dA, dB, 0);
  Eigen::MatrixXcd rb = partial_trace(rho, dA, dB, 1);
  for (int a = 0; a < dA; ++a)
    for (int b = 0; b < dB; ++b)
      for (int c = 0; c < dA; ++c)
        for (int e = 0; e < dB; ++e) pi(a * dB + b, c * dB + e) = ra(a, c) * rb(b, e);
  rep.commuting = (pi * chi.chi - chi.chi * pi).cwiseAbs().maxCoeff() < 1e-8;
  return rep;
}

PairMeasures dissect_pair(const Eigen::MatrixXcd& rho, int dA, int dB, Ssr mode,
                          const MeasureConfig& cfg) {
  Eigen::MatrixXcd rp = ssr_project(rho, dA, dB, mode);
  PairMeasures out;
  out.total = mutual_information(rp, dA, dB);
  ClassicalStateResult walk = closest_classical_state(rp, dA, dB, cfg.walk);
  out.quantum = walk.q_value;
  out.classical = mutual_information(walk.chi, dA, dB);
  EntanglementResult er = entanglement_mixed_upper(rp, dA, dB, cfg.ent, &walk);
  out.entanglement = er.value;
  out.fw_gap = er.fw_gap;
  out.e_exact = er.exact_pure;
  return out;
}

}  // namespace orbcorr
