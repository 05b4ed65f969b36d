#pragma once
// Entropies, superselection projections, and the correlation quantifiers
// I (total), C (classical), Q (quantum), E (entanglement) on bipartite
// density matrices. Q and E come from seeded stochastic/convex searches and
// are upper bounds unless flagged exact. All values are in nats.

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "orbcorr/rng.hpp"

namespace orbcorr {

enum class Ssr { none, parity, number };

// -Tr[rho ln rho]; eigenvalues below 1e-14 contribute zero;
// throws if |Tr rho - 1| > 1e-8
double vn_entropy(const Eigen::MatrixXcd& rho);

// Tr[rho (ln rho - ln sigma)]; +infinity when rho has weight > 1e-10 outside
// the support of sigma (eigenvalues < 1e-12)
double relative_entropy(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

// keep = 0 returns the dA x dA reduction, keep = 1 the dB x dB one;
// composite index is a*dB + b (first factor major)
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, int dA, int dB, int keep);

// S(rho_A) + S(rho_B) - S(rho) = S(rho || rho_A x rho_B)
double mutual_information(const Eigen::MatrixXcd& rho, int dA, int dB);

// local charge labels of the 4-dim orbital factor (|0>,|up>,|down>,|updown>):
// parity (0,1,1,0), number (0,1,1,2)
std::array<int, 4> orbital_grading(Ssr mode);

// zero every element connecting different local sectors on either factor;
// trace-preserving, idempotent, positive; mode none is the identity.
// Gradings are defined for 4-dim factors only (throws otherwise).
Eigen::MatrixXcd ssr_project(const Eigen::MatrixXcd& rho, int dA, int dB, Ssr mode);

struct WalkConfig {
  std::uint64_t seed = 1;
  int step_divisor = 1000;  // M: proposals move by a Haar unitary's M-th root
  int steps = 5000;
  int restarts = 8;   // restart 0 starts at the input basis, 1 at the
                      // marginal eigenbases, the rest at Haar random bases
  bool annealed = false;  // default greedy: accept only improvements
  double anneal_t0 = 0.01;
};

struct ClassicalStateResult {
  Eigen::MatrixXcd chi;                // dephasing of rho in the best basis
  Eigen::MatrixXcd basis_a, basis_b;   // local unitaries (columns = basis)
  double q_value = 0.0;                // S(rho || chi), recomputed
  double s_rho = 0.0;
  int accepted = 0;
  std::vector<double> restart_best;    // best objective S(chi) per restart
  std::uint64_t seed = 0;
};

// Algorithm: random walk over local product bases minimizing S(chi(U_A,U_B)),
// which equals S(rho||chi) + S(rho) for dephasings of rho
ClassicalStateResult closest_classical_state(const Eigen::MatrixXcd& rho, int dA,
                                             int dB, const WalkConfig& cfg = {});

// C(rho) = I(chi)
double classical_correlation(const ClassicalStateResult& res, int dA, int dB);

// S(rho_A) for a pure state; both reductions are computed and must agree to
// 1e-10; throws std::invalid_argument for non-pure input (purity < 1 - 1e-10)
double entanglement_pure(const Eigen::MatrixXcd& rho, int dA, int dB);

struct SeparableEnsemble {
  std::vector<double> weights;         // simplex
  std::vector<Eigen::VectorXcd> a, b;  // unit product factors per atom
  Eigen::MatrixXcd density(int dA, int dB) const;
};

struct EntanglementConfig {
  std::uint64_t seed = 1;
  int ensemble_size = 64;   // K: atom cap
  int fw_iterations = 150;  // convex (Frank-Wolfe) phase per start
  double fw_gap_tol = 1e-6;
  int perturb_steps = 200;  // stochastic perturbation-with-rejection polish
  int restarts = 2;         // Haar starts beyond the deterministic seeds
  double epsilon = 1e-9;    // maximally-mixed admixture guarding the support
  int refine_rounds = 30;      // corrective rounds: smooth descent + oracle insertion
  int refine_iterations = 200; // quasi-Newton steps per corrective round
};

struct EntanglementResult {
  double value = 0.0;   // upper bound on E(rho)
  double fw_gap = 0.0;  // linearization gap at exit (alternating oracle); the
                        // optimum lies within [value - fw_gap, value]
  double epsilon = 0.0;
  SeparableEnsemble ensemble;
  bool exact_pure = false;  // true when the pure-state formula was used
  std::uint64_t seed = 0;
};

// min over sigma = sum_k p_k |a_k><a_k| x |b_k><b_k| of S(rho||sigma),
// searched by Frank-Wolfe over the product-state hull (pairwise steps,
// periodic weight polish) plus a stochastic perturbation pass, then driven
// to the optimum by corrective rounds of quasi-Newton descent on the atom
// coordinates alternated with oracle-atom insertion; starting points include
// the closest-classical dephasing when provided, so the result never exceeds
// that bound by more than ~epsilon
EntanglementResult entanglement_mixed_upper(const Eigen::MatrixXcd& rho, int dA,
                                            int dB, const EntanglementConfig& cfg = {},
                                            const ClassicalStateResult* chi_seed = nullptr);

// minimum eigenvalue of the partial transpose; < -1e-10 certifies entanglement
double ppt_min_eigenvalue(const Eigen::MatrixXcd& rho, int dA, int dB);

struct BoundCheckReport {
  double max_ratio = 0.0;  // max |cov(A,B)| / (||A|| ||B||) over samples
  double bound = 0.0;      // sqrt(2) sqrt(I(rho)) + 1e-10
  int samples = 0;
  bool ok = false;
};
BoundCheckReport correlation_bound_check(const Eigen::MatrixXcd& rho, int dA, int dB,
                                         int samples, std::uint64_t seed);

struct SumRuleReport {
  // |S(rho||chi) - (S(chi) - S(rho))|
  double dephasing_residual = 0.0;
  // |[I(rho) - S(rho||chi) - I(chi)] - [S(rho_A)+S(rho_B)-S(chi_A)-S(chi_B)]|
  double identity_residual = 0.0;
  double i_minus_q_minus_c = 0.0;  // reported, sign not asserted
  bool commuting = false;          // [rho_A x rho_B, chi] ~ 0
};
SumRuleReport sum_rule_check(const Eigen::MatrixXcd& rho, int dA, int dB,
                             const ClassicalStateResult& chi);

struct MeasureConfig {
  WalkConfig walk;
  EntanglementConfig ent;
};

struct PairMeasures {
  double total = 0.0;
  double classical = 0.0;
  double quantum = 0.0;       // upper bound
  double entanglement = 0.0;  // upper bound unless e_exact
  double fw_gap = 0.0;
  bool e_exact = false;
};

// applies the SSR projection, then evaluates all four quantifiers on the
// projected state; pure projected states take the exact E path
PairMeasures dissect_pair(const Eigen::MatrixXcd& rho, int dA, int dB, Ssr mode,
                          const MeasureConfig& cfg);

}  // namespace orbcorr
