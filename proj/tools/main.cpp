// command line front end: subcommands map 1:1 onto the experiment drivers
#include <cstdint>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "orbcorr/experiments.hpp"
#include "orbcorr/integrals.hpp"
#include "orbcorr/solver.hpp"

namespace {

struct CliState {
  orbcorr::ExperimentSpec spec;
  std::string sector;        // "N,2Sz"
  std::string ssr = "none";  // none | p | n | all
  std::string units = "nats";
  std::string method = "auto";
  std::string pair = "1,2";
  int grid = 61;
};

void add_output_flags(CLI::App* cmd, CliState& st) {
  cmd->add_option("--seed", st.spec.seed, "master seed for the stochastic searches");
  cmd->add_option("--out", st.spec.out_dir, "output directory (default .)");
  cmd->add_option("--format", st.spec.format, "json | csv | svg (svg also writes csv)");
  cmd->add_option("--units", st.units, "nats (default) | ln2");
  cmd->add_option("--walk-steps", st.spec.measures.walk.steps,
                  "steps per basis-walk restart");
  cmd->add_option("--walk-restarts", st.spec.measures.walk.restarts,
                  "basis-walk restarts");
  cmd->add_flag("--annealed", st.spec.measures.walk.annealed,
                "anneal the basis walk instead of greedy acceptance");
  cmd->add_option("--fw-iterations", st.spec.measures.ent.fw_iterations,
                  "convex-search iterations for the entanglement bound");
  cmd->add_option("--ensemble", st.spec.measures.ent.ensemble_size,
                  "separable ensemble size cap");
}

void add_system_flags(CLI::App* cmd, CliState& st) {
  cmd->add_option("--model", st.spec.model, "huckel | hubbard | ppp");
  cmd->add_option("--fcidump", st.spec.fcidump, "FCIDUMP file instead of a model");
  cmd->add_option("--geometry", st.spec.geometry, "xyz geometry for the named models");
  cmd->add_option("--sector", st.sector,
                  "N,2Sz (default: FCIDUMP header, else half filling)");
  cmd->add_option("--basis", st.spec.basis,
                  "native | canonical | pmlike | atomiclike | benzene-atomiclike | "
                  "jacobi:i,j,theta[;...] | file:PATH");
  cmd->add_option("--t", st.spec.params.t, "hopping at the reference bond length");
  cmd->add_option("--u", st.spec.params.hubbard_u, "on-site repulsion");
  cmd->add_option("--bond-threshold", st.spec.params.bond_threshold,
                  "bond detection distance cutoff (Angstrom)");
  cmd->add_option("--solver", st.method, "auto | dense | lanczos");
}

std::pair<int, int> parse_int_pair(const std::string& text, const char* what) {
  std::istringstream is(text);
  int a = 0, b = 0;
  char comma = 0;
  std::string rest;
  if (!(is >> a >> comma >> b) || comma != ',' || (is >> rest))
    throw std::invalid_argument(std::string("bad ") + what + " '" + text +
                                "' (want two comma-separated integers)");
  return {a, b};
}

void finalize(CliState& st) {
  using orbcorr::Ssr;
  if (!st.sector.empty()) {
    const auto [n, tz] = parse_int_pair(st.sector, "sector");
    st.spec.sector_set = true;
    st.spec.particles = n;
    st.spec.two_sz = tz;
  }
  if (st.units == "ln2")
    st.spec.units_ln2 = true;
  else if (st.units != "nats")
    throw std::invalid_argument("unknown units '" + st.units + "'");
  if (st.ssr == "none")
    st.spec.ssr_modes = {Ssr::none};
  else if (st.ssr == "p")
    st.spec.ssr_modes = {Ssr::parity};
  else if (st.ssr == "n")
    st.spec.ssr_modes = {Ssr::number};
  else if (st.ssr == "all")
    st.spec.ssr_modes = {Ssr::none, Ssr::parity, Ssr::number};
  else
    throw std::invalid_argument("unknown ssr mode '" + st.ssr + "'");
  using Method = orbcorr::SolverConfig::Method;
  if (st.method == "auto")
    st.spec.solver.method = Method::auto_select;
  else if (st.method == "dense")
    st.spec.solver.method = Method::dense;
  else if (st.method == "lanczos")
    st.spec.solver.method = Method::lanczos;
  else
    throw std::invalid_argument("unknown solver '" + st.method + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbital correlation and entanglement dissection"};
  app.require_subcommand(1);
  CliState st;

  CLI::App* tables =
      app.add_subcommand("tables", "reference states against their analytic values");
  add_output_flags(tables, st);

  CLI::App* solve = app.add_subcommand("solve", "ground-state summary");
  add_system_flags(solve, st);
  add_output_flags(solve, st);

  CLI::App* profile =
      app.add_subcommand("profile-single", "single-orbital entanglement profile");
  add_system_flags(profile, st);
  add_output_flags(profile, st);

  CLI::App* pairwise = app.add_subcommand("pairwise", "all-pairs I/C/Q/E matrices");
  add_system_flags(pairwise, st);
  add_output_flags(pairwise, st);
  pairwise->add_option("--ssr", st.ssr, "none | p | n | all");

  CLI::App* scan =
      app.add_subcommand("bond-scan", "entanglement against a two-orbital rotation angle");
  add_system_flags(scan, st);
  add_output_flags(scan, st);
  scan->add_option("--pair", st.pair, "i,j orbitals to rotate (1-based)");
  scan->add_option("--grid", st.grid, "grid points on [0, pi/2]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? orbcorr::exit_ok : orbcorr::exit_spec;
  }

  try {
    finalize(st);
    if (tables->parsed()) return orbcorr::cmd_tables(st.spec);
    if (solve->parsed()) return orbcorr::cmd_solve(st.spec);
    if (profile->parsed()) return orbcorr::cmd_profile_single(st.spec);
    if (pairwise->parsed()) return orbcorr::cmd_pairwise(st.spec);
    if (scan->parsed()) {
      const auto [i, j] = parse_int_pair(st.pair, "pair");
      return orbcorr::cmd_bond_scan(st.spec, i, j, st.grid);
    }
  } catch (const orbcorr::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return orbcorr::exit_spec;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return orbcorr::exit_spec;
  } catch (const orbcorr::ConvergenceError& e) {
    std::cerr << "solver failed: " << e.what() << "\n";
    return orbcorr::exit_solver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return orbcorr::exit_solver;
  }
  return orbcorr::exit_spec;
}
