#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "orbcorr/measures.hpp"
#include "orbcorr/rdm.hpp"
#include "orbcorr/rotations.hpp"
#include "support.hpp"

using namespace orbcorr;

namespace {

constexpr double kPi = std::numbers::pi;

void check_density(const Eigen::MatrixXcd& rho, double tol = 1e-12) {
  CHECK(std::abs(rho.trace().real() - 1.0) < tol);
  CHECK(std::abs(rho.trace().imag()) < tol);
  CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < tol);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  CHECK(es.eigenvalues()(0) > -tol);
}

}  // namespace

TEST_SUITE("rdm") {

TEST_CASE("one-orbital matrices of reference states") {
  // doubly occupied orbital 1: orbital 1 in |updown>, orbital 2 empty
  const WaveFunction psi2 = bond_state(2);
  Eigen::MatrixXcd r1 = one_orbital_rdm(psi2, 1);
  Eigen::MatrixXcd r2 = one_orbital_rdm(psi2, 2);
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
  want(3, 3) = 1.0;
  CHECK((r1 - want).cwiseAbs().maxCoeff() < 1e-15);
  want.setZero();
  want(0, 0) = 1.0;
  CHECK((r2 - want).cwiseAbs().maxCoeff() < 1e-15);

  // splitting the bond evenly scatters the orbital over all four local states
  const WaveFunction rot = apply_rotation(psi2, jacobi_rotation(2, 1, 2, kPi / 4));
  for (int i = 1; i <= 2; ++i) {
    const Eigen::MatrixXcd r = one_orbital_rdm(rot, i);
    CHECK((r - 0.25 * Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-12);
  }

  // one-electron superposition: orbital 1 holds the up electron with
  // probability cos^2
  const double t = 0.7;
  const WaveFunction se = single_electron_state(t, 0.9);
  const Eigen::MatrixXcd r = one_orbital_rdm(se, 1);
  const double c2 = std::cos(t) * std::cos(t);
  CHECK(std::abs(r(1, 1).real() - c2) < 1e-14);
  CHECK(std::abs(r(0, 0).real() - (1 - c2)) < 1e-14);
  CHECK(std::abs(r(1, 0)) + std::abs(r(0, 1)) < 1e-14);  // number blocks
}

TEST_CASE("pair matrices match the brute reordering oracle") {
  const std::array<std::array<int, 2>, 4> sectors{{{2, 0}, {3, 1}, {4, 0}, {5, 1}}};
  std::uint64_t seed = 100;
  for (const auto& [n, tz] : sectors) {
    const WaveFunction psi = testsupport::random_state(3, n, tz, seed++);
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) {
        if (i == j) continue;
        const Eigen::MatrixXcd got = two_orbital_rdm(psi, i, j);
        const Eigen::MatrixXcd want = testsupport::brute_pair_rdm(psi, i, j);
        CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
        check_density(got);
      }
  }
}

TEST_CASE("pair matrix reduces consistently to both marginals") {
  const WaveFunction psi = testsupport::random_state(4, 4, 0, 7);
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) {
      if (i == j) continue;
      const Eigen::MatrixXcd rij = two_orbital_rdm(psi, i, j);
      CHECK((partial_trace(rij, 4, 4, 0) - one_orbital_rdm(psi, i))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      CHECK((partial_trace(rij, 4, 4, 1) - one_orbital_rdm(psi, j))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
}

TEST_CASE("orbital_rdm spans the one- and two-orbital forms") {
  const WaveFunction psi = testsupport::random_state(3, 3, 1, 9);
  const std::vector<int> one{2};
  CHECK((orbital_rdm(psi, one) - one_orbital_rdm(psi, 2)).cwiseAbs().maxCoeff() <
        1e-14);
  const std::vector<int> two{3, 1};
  CHECK((orbital_rdm(psi, two) - two_orbital_rdm(psi, 3, 1)).cwiseAbs().maxCoeff() <
        1e-14);
  const std::vector<int> dup{1, 1};
  CHECK_THROWS_AS(orbital_rdm(psi, dup), std::invalid_argument);
  const std::vector<int> big{1, 2, 3};
  CHECK_THROWS_AS(orbital_rdm(psi, big), std::invalid_argument);
}

TEST_CASE("diagonal occupancy weights reproduce mode occupations") {
  const WaveFunction psi = testsupport::random_state(4, 5, 1, 11);
  for (int i = 1; i <= 4; ++i) {
    const Eigen::MatrixXcd r = one_orbital_rdm(psi, i);
    const double nu = r(1, 1).real() + r(3, 3).real();
    const double nd = r(2, 2).real() + r(3, 3).real();
    CHECK(nu == doctest::Approx(occupation(psi, i, Spin::up)).epsilon(1e-12));
    CHECK(nd == doctest::Approx(occupation(psi, i, Spin::down)).epsilon(1e-12));
  }
}

TEST_CASE("particle-number coherence is absent in orbital marginals") {
  // local states 0 and 3 differ by two particles yet share total parity; the
  // complement fixes total N, so <0|rho|3> must vanish along with the
  // single-particle cross terms
  const WaveFunction psi = testsupport::random_state(3, 4, 0, 13);
  for (int i = 1; i <= 3; ++i) {
    const Eigen::MatrixXcd r = one_orbital_rdm(psi, i);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const int na = (a & 1) + ((a >> 1) & 1), nb = (b & 1) + ((b >> 1) & 1);
        if (na != nb) CHECK(std::abs(r(a, b)) < 1e-12);
      }
  }
}

TEST_CASE("entanglement entropy equals both reduced entropies") {
  const WaveFunction psi = testsupport::random_state(4, 4, 0, 17);
  const std::vector<int> left{1, 3};
  const std::vector<int> right{2, 4};
  const double e_left = pure_state_entanglement(psi, left);
  const double e_right = pure_state_entanglement(psi, right);
  CHECK(e_left == doctest::Approx(e_right).epsilon(1e-11));
  CHECK(e_left == doctest::Approx(vn_entropy(orbital_rdm(psi, left))).epsilon(1e-10));

  const std::vector<int> single{2};
  CHECK(pure_state_entanglement(psi, single) ==
        doctest::Approx(vn_entropy(one_orbital_rdm(psi, 2))).epsilon(1e-10));

  // three-orbital split of a 6-orbital state still matches the complement
  const WaveFunction big = testsupport::random_state(6, 6, 0, 19);
  const std::vector<int> a{1, 4, 5};
  const std::vector<int> b{2, 3, 6};
  CHECK(pure_state_entanglement(big, a) ==
        doctest::Approx(pure_state_entanglement(big, b)).epsilon(1e-10));
}

TEST_CASE("occupancy projection splits the state orthogonally") {
  const WaveFunction psi = testsupport::random_state(3, 3, 1, 23);
  for (int i = 1; i <= 3; ++i) {
    std::array<WaveFunction, 4> parts;
    double wsum = 0.0;
    Eigen::VectorXcd resum = Eigen::VectorXcd::Zero(psi.amps.size());
    for (unsigned l = 0; l < 4; ++l) {
      parts[l] = project_orbital_occupation(psi, i, 1u << l);
      wsum += parts[l].amps.squaredNorm();
      resum += parts[l].amps;
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((resum - psi.amps).cwiseAbs().maxCoeff() < 1e-12);
    for (unsigned l = 0; l < 4; ++l)
      for (unsigned m = l + 1; m < 4; ++m)
        CHECK(std::abs(parts[l].amps.dot(parts[m].amps)) < 1e-14);
    // projector weights are the marginal diagonal
    const Eigen::MatrixXcd r = one_orbital_rdm(psi, i);
    for (unsigned l = 0; l < 4; ++l)
      CHECK(parts[l].amps.squaredNorm() ==
            doctest::Approx(r(l, l).real()).epsilon(1e-12));
  }
}

TEST_CASE("rotating a pair by a plane rotation acts only on that pair") {
  // rotation mixing orbitals 1,2 leaves orbital 3's marginal unchanged
  const WaveFunction psi = testsupport::random_state(3, 3, 1, 29);
  const WaveFunction rot = apply_rotation(psi, jacobi_rotation(3, 1, 2, 0.83));
  CHECK((one_orbital_rdm(rot, 3) - one_orbital_rdm(psi, 3)).cwiseAbs().maxCoeff() <
        1e-12);
}

}  // TEST_SUITE
