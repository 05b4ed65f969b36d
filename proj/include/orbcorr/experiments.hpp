#pragma once
// End-to-end drivers: load a model or FCIDUMP, resolve the analysis orbital
// basis, solve for the ground state, and dissect correlations per orbital,
// per pair, or along a two-orbital rotation angle. The cmd_* functions write
// their artifacts into spec.out_dir and return a process exit code.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orbcorr/integrals.hpp"
#include "orbcorr/measures.hpp"
#include "orbcorr/solver.hpp"

namespace orbcorr {

enum ExitCode : int {
  exit_ok = 0,
  exit_tolerance = 2,  // computed values breached a declared tolerance
  exit_solver = 3,     // eigensolver or optimizer failure
  exit_spec = 4,       // malformed input or request
};

struct ExperimentSpec {
  std::string model;    // "huckel" | "hubbard" | "ppp"; empty when fcidump set
  std::string fcidump;  // FCIDUMP path, exclusive with model
  std::string geometry; // xyz path, required by the named models
  bool sector_set = false;  // else: FCIDUMP header, or half filling
  int particles = 0;
  int two_sz = 0;
  std::string basis = "native";
  std::vector<Ssr> ssr_modes = {Ssr::none};
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format = "json";  // "json" | "csv" | "svg" (svg also writes csv)
  bool units_ln2 = false;       // report measures in units of ln 2
  PiModelParams params;
  SolverConfig solver;
  MeasureConfig measures;
};

struct ModelSystem {
  IntegralSet ints;
  Geometry geom;  // pi centers when built from a geometry
  std::vector<Bond> bonds;
  bool has_geometry = false;
  std::string label;
};

ModelSystem load_system(const ExperimentSpec& spec);

// sites in ring traversal order, starting at site 0 toward its lower-index
// neighbor; requires every site to have exactly two bonds forming one cycle
std::vector<int> ring_order(int sites, const std::vector<Bond>& bonds);

// Analysis orbitals over the native ones, rows = new orbitals (the matrix
// apply_rotation takes). Tokens:
//   native              identity
//   canonical           eigenvectors of ints.h, ascending
//   pmlike              bonding/antibonding on orbital pairs (1,2),(3,4),...
//   atomiclike          pmlike followed by a pi/4 rotation inside each pair
//   benzene-atomiclike  canonical MOs followed by the published three-step
//                       inverse; must compose to a site relabeling
//   jacobi:i,j,t[;...]  plane rotations applied left to right (angles in rad)
//   file:PATH           read_matrix format, rows = new orbitals
Eigen::MatrixXd resolve_basis(const std::string& token, const ModelSystem& sys);

struct SolvedState {
  WaveFunction psi;  // amplitudes over the analysis orbitals
  double energy = 0.0;
  double residual = 0.0;
  double gap = 0.0;
  bool degenerate = false;
  int particles = 0;
  int two_sz = 0;
  Eigen::MatrixXd basis_matrix;
};

SolvedState solve_system(const ExperimentSpec& spec, const ModelSystem& sys);

// Single-orbital entanglement with the rest of the system (psi pure).
// no_ssr[i] = S(rho_i); the superselected values average S(rho_i) over the
// state's projections onto the orbital-occupation blocks of the complement
// reading: parity groups the local states as {0, updown}, {up, down}, number
// as {0}, {up, down}, {updown}.
struct SingleOrbitalProfile {
  std::vector<double> no_ssr, parity, number;
};
SingleOrbitalProfile profile_single(const WaveFunction& psi);

struct PairwiseResult {
  Ssr mode = Ssr::none;
  Eigen::MatrixXd total, classical, quantum, entanglement, fw_gap;
  std::vector<std::uint8_t> e_exact;  // row-major D x D
  double total_sum = 0.0, classical_sum = 0.0;
  double quantum_sum = 0.0, entanglement_sum = 0.0;  // sums over i < j
};
// every unordered pair via dissect_pair on its two-orbital reduction; the
// per-pair searches get seeds derived from (seed, i, j, mode) so the result
// is independent of scheduling
PairwiseResult pairwise_measures(const WaveFunction& psi, Ssr mode,
                                 const MeasureConfig& cfg, std::uint64_t seed);

struct BondScanResult {
  std::vector<double> thetas, values;
  double theta_max = 0.0, e_max = 0.0;  // golden-section refined
  double e_min = 0.0;                   // over the grid
};
// entanglement between orbitals i and j after rotating their plane by each
// theta; exact pure-state entropy when (i, j) is the whole system, else the
// mixed-state upper bound without superselection
BondScanResult bond_scan(const WaveFunction& psi, int i, int j,
                         const std::vector<double>& thetas,
                         const MeasureConfig& cfg, std::uint64_t seed);

int cmd_tables(const ExperimentSpec& spec);
int cmd_profile_single(const ExperimentSpec& spec);
int cmd_pairwise(const ExperimentSpec& spec);
int cmd_bond_scan(const ExperimentSpec& spec, int i, int j, int grid_points);
int cmd_solve(const ExperimentSpec& spec);

}  // namespace orbcorr
