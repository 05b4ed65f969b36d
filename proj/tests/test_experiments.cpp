#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "orbcorr/experiments.hpp"
#include "orbcorr/rdm.hpp"
#include "orbcorr/rotations.hpp"
#include "support.hpp"

using namespace orbcorr;

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kPi = std::numbers::pi;

std::string data_path(const std::string& name) {
  return std::string(TEST_DATA_DIR) + "/" + name;
}

ExperimentSpec hubbard_spec(double t, double u) {
  ExperimentSpec spec;
  spec.model = "hubbard";
  spec.geometry = data_path("ethylene.xyz");
  spec.params.t = t;
  spec.params.hubbard_u = u;
  spec.params.peierls_slope = 0.0;
  return spec;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("ring order walks the benzene cycle") {
  const Geometry g = carbon_sites(read_xyz(data_path("benzene.xyz")));
  const std::vector<Bond> bonds = detect_bonds(g);
  const std::vector<int> order = ring_order(g.sites(), bonds);
  REQUIRE(order.size() == 6);
  CHECK(order[0] == 0);
  // consecutive ring positions are bonded, including the closure
  const auto bonded = [&](int a, int b) {
    for (const Bond& e : bonds)
      if ((e.i == std::min(a, b)) && (e.j == std::max(a, b))) return true;
    return false;
  };
  for (int k = 0; k < 6; ++k) CHECK(bonded(order[k], order[(k + 1) % 6]));

  // a chain has terminal sites of degree one
  const Geometry chain = carbon_sites(read_xyz(data_path("decapentaene.xyz")));
  CHECK_THROWS_AS(ring_order(chain.sites(), detect_bonds(chain)),
                  std::invalid_argument);
}

TEST_CASE("system loading guards its inputs") {
  ExperimentSpec spec;
  CHECK_THROWS_AS(load_system(spec), std::invalid_argument);  // nothing given
  spec.model = "hubbard";
  spec.fcidump = "some.fcidump";
  CHECK_THROWS_AS(load_system(spec), std::invalid_argument);  // both given
  spec.fcidump.clear();
  CHECK_THROWS_AS(load_system(spec), std::invalid_argument);  // missing geometry
  spec.geometry = data_path("ethylene.xyz");
  spec.model = "franken";
  CHECK_THROWS_AS(load_system(spec), std::invalid_argument);  // unknown model
}

TEST_CASE("analysis basis tokens") {
  const ExperimentSpec spec = hubbard_spec(1.0, 0.0);
  const ModelSystem sys = load_system(spec);
  REQUIRE(sys.ints.orbitals == 2);

  CHECK((resolve_basis("native", sys) - Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  const Eigen::MatrixXd canon = resolve_basis("canonical", sys);
  const Eigen::MatrixXd d = canon * sys.ints.h * canon.transpose();
  CHECK(std::abs(d(0, 1)) < 1e-12);
  CHECK(d(0, 0) <= d(1, 1));

  const double s2 = 1.0 / std::sqrt(2.0);
  const Eigen::MatrixXd pm = resolve_basis("pmlike", sys);
  Eigen::MatrixXd pm_want(2, 2);
  pm_want << s2, s2, s2, -s2;
  CHECK((pm - pm_want).cwiseAbs().maxCoeff() < 1e-14);

  // atomiclike is the per-pair even split applied after pmlike, which lands
  // back on the native orbitals up to signs
  const Eigen::MatrixXd atom = resolve_basis("atomiclike", sys);
  CHECK((atom - jacobi_rotation(2, 1, 2, kPi / 4) * pm).cwiseAbs().maxCoeff() <
        1e-14);
  Eigen::MatrixXd signs(2, 2);
  signs << 1, 0, 0, -1;
  CHECK((atom - signs).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::MatrixXd jac = resolve_basis("jacobi:1,2,0.3", sys);
  CHECK((jac - jacobi_rotation(2, 1, 2, 0.3)).cwiseAbs().maxCoeff() < 1e-15);
  const Eigen::MatrixXd two =
      resolve_basis("jacobi:1,2,0.3;1,2,0.2", sys);
  CHECK((two - jacobi_rotation(2, 1, 2, 0.5)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS(resolve_basis("jacobi:1,2", sys));
  CHECK_THROWS(resolve_basis("jacobi:0,2,0.5", sys));
  CHECK_THROWS(resolve_basis("mystery", sys));

  const std::string mpath = "/tmp/orbcorr_basis_test.txt";
  {
    std::ofstream out(mpath);
    write_matrix(jacobi_rotation(2, 1, 2, 0.77), out);
  }
  CHECK((resolve_basis("file:" + mpath, sys) - jacobi_rotation(2, 1, 2, 0.77))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  std::filesystem::remove(mpath);
}

TEST_CASE("benzene atomic-like basis is a site relabeling") {
  ExperimentSpec spec;
  spec.model = "hubbard";
  spec.geometry = data_path("benzene.xyz");
  const ModelSystem sys = load_system(spec);
  const Eigen::MatrixXd B = resolve_basis("benzene-atomiclike", sys);
  for (int r = 0; r < 6; ++r) {
    int big = 0;
    for (int c = 0; c < 6; ++c)
      if (std::abs(B(r, c)) > 1.0 - 1e-10) ++big;
    CHECK(big == 1);
  }
  CHECK((B * B.transpose() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <
        1e-12);
  // relabeling sites preserves the multiset of |h| entries (the ring bonds)
  const Eigen::MatrixXd hb = B * sys.ints.h * B.transpose();
  std::vector<double> native_abs, rotated_abs;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      native_abs.push_back(std::abs(sys.ints.h(r, c)));
      rotated_abs.push_back(std::abs(hb(r, c)));
    }
  std::sort(native_abs.begin(), native_abs.end());
  std::sort(rotated_abs.begin(), rotated_abs.end());
  for (std::size_t k = 0; k < native_abs.size(); ++k)
    CHECK(std::abs(native_abs[k] - rotated_abs[k]) < 1e-10);
}

TEST_CASE("sector defaults and solve path") {
  const ExperimentSpec spec = hubbard_spec(1.0, 2.0);
  const ModelSystem sys = load_system(spec);
  const SolvedState st = solve_system(spec, sys);
  CHECK(st.particles == 2);  // half filling
  CHECK(st.two_sz == 0);
  CHECK(st.energy == doctest::Approx(-1.2360679774997896).epsilon(1e-10));
  CHECK(st.residual < 1e-8);

  ExperimentSpec charged = spec;
  charged.sector_set = true;
  charged.particles = 1;
  charged.two_sz = 1;
  const SolvedState st1 = solve_system(charged, sys);
  CHECK(st1.energy == doctest::Approx(-1.0).epsilon(1e-10));

  // FCIDUMP header carries the sector
  const std::string fpath = "/tmp/orbcorr_sector_test.fcidump";
  {
    IntegralSet ints = build_hubbard(2, {{0, 1}}, 1.0, 2.0);
    ints.nelec = 2;
    ints.ms2 = 0;
    std::ofstream out(fpath);
    write_fcidump(ints, out);
  }
  ExperimentSpec fspec;
  fspec.fcidump = fpath;
  const ModelSystem fsys = load_system(fspec);
  const SolvedState fst = solve_system(fspec, fsys);
  CHECK(fst.particles == 2);
  CHECK(fst.energy == doctest::Approx(st.energy).epsilon(1e-10));
  std::filesystem::remove(fpath);
}

TEST_CASE("single-orbital profile of the evenly split bond") {
  const WaveFunction rot =
      apply_rotation(bond_state(2), jacobi_rotation(2, 1, 2, kPi / 4));
  const SingleOrbitalProfile prof = profile_single(rot);
  REQUIRE(prof.no_ssr.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(prof.no_ssr[i] == doctest::Approx(2 * kLn2).epsilon(1e-12));
    CHECK(prof.parity[i] == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(prof.number[i] == doctest::Approx(0.5 * kLn2).epsilon(1e-12));
  }

  // a single determinant has no correlation to lose
  const SingleOrbitalProfile det = profile_single(bond_state(2));
  for (int i = 0; i < 2; ++i) {
    CHECK(det.no_ssr[i] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(det.number[i] == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("pairwise sums across split bonds count one bond each") {
  WaveFunction psi = k_fold_bond_state(2);
  psi = apply_rotation(psi, jacobi_rotation(4, 1, 2, kPi / 4));
  psi = apply_rotation(psi, jacobi_rotation(4, 3, 4, kPi / 4));
  MeasureConfig cfg;
  const PairwiseResult res = pairwise_measures(psi, Ssr::none, cfg, 7);
  CHECK(res.entanglement(0, 1) == doctest::Approx(2 * kLn2).epsilon(1e-9));
  CHECK(res.entanglement(2, 3) == doctest::Approx(2 * kLn2).epsilon(1e-9));
  CHECK(res.entanglement_sum == doctest::Approx(4 * kLn2).epsilon(1e-6));
  CHECK(res.total(0, 1) == doctest::Approx(4 * kLn2).epsilon(1e-9));
  CHECK(res.total(0, 2) < 1e-9);  // different bonds share nothing
  CHECK(res.total(1, 3) < 1e-9);
  // matrices are symmetric with empty diagonals
  for (int i = 0; i < 4; ++i) {
    CHECK(res.total(i, i) == 0.0);
    for (int j = 0; j < 4; ++j)
      CHECK(res.total(i, j) == doctest::Approx(res.total(j, i)).epsilon(1e-12));
  }
  CHECK(res.e_exact[0 * 4 + 1] == 1);  // traced complement is empty there

  // the unrotated product of determinants carries nothing at all
  const PairwiseResult none =
      pairwise_measures(k_fold_bond_state(2), Ssr::none, cfg, 7);
  CHECK(none.total_sum < 1e-9);
  CHECK(none.entanglement_sum < 1e-4);
}

TEST_CASE("free dimer ground state is one evenly split bond") {
  const ExperimentSpec spec = hubbard_spec(1.0, 0.0);
  const ModelSystem sys = load_system(spec);
  const SolvedState st = solve_system(spec, sys);
  MeasureConfig cfg;
  const PairwiseResult res = pairwise_measures(st.psi, Ssr::none, cfg, 11);
  CHECK(res.entanglement(0, 1) == doctest::Approx(2 * kLn2).epsilon(1e-9));
  CHECK(res.e_exact[1] == 1);
}

TEST_CASE("bond scan finds the even split") {
  const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int k = 0; k <= 24; ++k) g.push_back(k * (kPi / 2) / 24);
    return g;
  }();
  MeasureConfig cfg;
  const BondScanResult res = bond_scan(bond_state(2), 1, 2, grid, cfg, 13);
  CHECK(res.theta_max == doctest::Approx(kPi / 4).epsilon(1e-6));
  CHECK(res.e_max == doctest::Approx(2 * kLn2).epsilon(1e-9));
  CHECK(res.e_min == doctest::Approx(0.0).epsilon(1e-12));
  REQUIRE(res.values.size() == grid.size());
  CHECK(res.values.front() == doctest::Approx(0.0).epsilon(1e-12));

  const BondScanResult single = bond_scan(bond_state(1), 1, 2, grid, cfg, 13);
  CHECK(single.theta_max == doctest::Approx(kPi / 4).epsilon(1e-6));
  CHECK(single.e_max == doctest::Approx(kLn2).epsilon(1e-9));

  const BondScanResult filled = bond_scan(bond_state(4), 1, 2, grid, cfg, 13);
  CHECK(filled.e_max < 1e-12);
}

TEST_CASE("driver outputs are byte-reproducible") {
  ExperimentSpec spec = hubbard_spec(1.0, 4.0);
  spec.basis = "jacobi:1,2,0.785398163397448";
  spec.format = "csv";
  spec.seed = 17;
  spec.out_dir = "/tmp/orbcorr_rep_a";
  REQUIRE(cmd_profile_single(spec) == exit_ok);
  spec.out_dir = "/tmp/orbcorr_rep_b";
  REQUIRE(cmd_profile_single(spec) == exit_ok);
  CHECK(slurp("/tmp/orbcorr_rep_a/profile_single.csv") ==
        slurp("/tmp/orbcorr_rep_b/profile_single.csv"));

  spec.format = "json";
  spec.out_dir = "/tmp/orbcorr_rep_a";
  REQUIRE(cmd_solve(spec) == exit_ok);
  spec.out_dir = "/tmp/orbcorr_rep_b";
  REQUIRE(cmd_solve(spec) == exit_ok);
  CHECK(slurp("/tmp/orbcorr_rep_a/solve.json") ==
        slurp("/tmp/orbcorr_rep_b/solve.json"));
  for (const std::string d : {"/tmp/orbcorr_rep_a", "/tmp/orbcorr_rep_b"})
    std::filesystem::remove_all(d);
}

TEST_CASE("malformed requests are rejected up front") {
  ExperimentSpec spec = hubbard_spec(1.0, 1.0);
  spec.format = "pdf";
  CHECK_THROWS_AS(cmd_solve(spec), std::invalid_argument);
  spec.format = "json";
  spec.sector_set = true;
  spec.particles = 5;  // does not fit two orbitals
  CHECK_THROWS(cmd_solve(spec));
}

}  // TEST_SUITE
