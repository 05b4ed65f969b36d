#include "orbcorr/rotations.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>

namespace orbcorr {

namespace {

constexpr double kOrthoTol = 1e-10;

// plane rotation factor: rows a: (cos t, sin t), b: (-sin t, cos t)
struct PlaneFactor {
  int a, b;
  double theta;
};

Eigen::MatrixXd plane_matrix(int D, const PlaneFactor& f) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(D, D);
  const double c = std::cos(f.theta), s = std::sin(f.theta);
  m(f.a, f.a) = c;
  m(f.a, f.b) = s;
  m(f.b, f.a) = -s;
  m(f.b, f.b) = c;
  return m;
}

// R = P(f_1) P(f_2) ... P(f_k) diag(d); factors are lifted left to right
void givens_factorize(const Eigen::MatrixXd& R, std::vector<PlaneFactor>& factors,
                      Eigen::VectorXd& diag) {
  const int D = static_cast<int>(R.rows());
  Eigen::MatrixXd M = R;
  factors.clear();
  for (int c = 0; c < D - 1; ++c)
    for (int r = c + 1; r < D; ++r) {
      if (std::abs(M(r, c)) < 1e-15) continue;
      const double h = std::hypot(M(c, c), M(r, c));
      const double alpha = M(c, c) / h, beta = M(r, c) / h;
      // premultiply rows (c, r) by [[alpha, beta], [-beta, alpha]]
      const Eigen::RowVectorXd rc = M.row(c), rr = M.row(r);
      M.row(c) = alpha * rc + beta * rr;
      M.row(r) = -beta * rc + alpha * rr;
      factors.push_back({c, r, std::atan2(-beta, alpha)});
    }
  diag.resize(D);
  for (int p = 0; p < D; ++p) diag[p] = M(p, p) > 0 ? 1.0 : -1.0;
  double off = 0.0;
  for (int p = 0; p < D; ++p)
    for (int q = 0; q < D; ++q)
      off = std::max(off, std::abs(M(p, q) - (p == q ? diag[p] : 0.0)));
  if (off > kOrthoTol)
    throw std::runtime_error("givens factorization failed to triangularize");
  // reconstruct in application order as a guard against convention slips
  Eigen::MatrixXd rec = Eigen::MatrixXd::Identity(D, D);
  for (const PlaneFactor& f : factors) rec *= plane_matrix(D, f);
  rec *= diag.asDiagonal();
  if ((rec - R).cwiseAbs().maxCoeff() > kOrthoTol)
    throw std::runtime_error("givens factor product does not reproduce the input");
}

// lifted generator of P(a, b, theta): K = sum_s (f+_bs f_as - f+_as f_bs)
Eigen::SparseMatrix<double, Eigen::RowMajor> lift_generator(const SectorBasis& basis,
                                                            int a, int b) {
  std::vector<Eigen::Triplet<double>> trips;
  const std::int64_t dim = basis.size();
  for (std::int64_t k = 0; k < dim; ++k) {
    const Det d = basis.dets[static_cast<std::size_t>(k)];
    for (int spin = 0; spin < 2; ++spin) {
      const int ma = 2 * a + spin, mb = 2 * b + spin;
      if (occupied(d, ma) && !occupied(d, mb)) {
        const auto [d1, s1] = apply_annihilation(d, ma);
        const auto [d2, s2] = apply_creation(d1, mb);
        trips.emplace_back(static_cast<int>(basis.find(d2)), static_cast<int>(k),
                           static_cast<double>(s1 * s2));
      } else if (occupied(d, mb) && !occupied(d, ma)) {
        const auto [d1, s1] = apply_annihilation(d, mb);
        const auto [d2, s2] = apply_creation(d1, ma);
        trips.emplace_back(static_cast<int>(basis.find(d2)), static_cast<int>(k),
                           -static_cast<double>(s1 * s2));
      }
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> K(dim, dim);
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

void csr_apply(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m,
               const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
  const std::int64_t n = m.rows();
  y.setZero(n);
  const auto* outer = m.outerIndexPtr();
  const auto* inner = m.innerIndexPtr();
  const auto* vals = m.valuePtr();
  for (std::int64_t i = 0; i < n; ++i) {
    std::complex<double> acc{};
    for (auto idx = outer[i]; idx < outer[i + 1]; ++idx)
      acc += vals[idx] * x[inner[idx]];
    y[i] = acc;
  }
}

// amps <- exp(theta K) amps by Taylor series; ||theta K||_2 <= 2|theta| <= 2 pi
void apply_plane_lift(const SectorBasis& basis, const PlaneFactor& f,
                      Eigen::VectorXcd& amps) {
  const auto K = lift_generator(basis, f.a, f.b);
  Eigen::VectorXcd term = amps, next;
  for (int n = 1; n <= 64; ++n) {
    csr_apply(K, term, next);
    term = (f.theta / n) * next;
    amps += term;
    if (term.norm() < 1e-17) return;
  }
}

}  // namespace

Eigen::MatrixXd jacobi_rotation(int D, int i, int j, double theta) {
  if (i == j) throw std::invalid_argument("jacobi rotation needs two distinct orbitals");
  if (i < 1 || j < 1 || i > D || j > D)
    throw std::invalid_argument("jacobi orbital index out of range");
  return plane_matrix(D, {i - 1, j - 1, theta});
}

Eigen::MatrixXd benzene_printed_u() {
  const double s6 = 1.0 / std::sqrt(6.0), s12 = 1.0 / std::sqrt(12.0),
               s3 = 1.0 / std::sqrt(3.0);
  Eigen::MatrixXd U(6, 6);
  U << s6, s6, s6, s6, s6, s6,                  //
      -s12, -s3, -s12, s12, s3, s12,            //
      0.5, 0.0, -0.5, -0.5, 0.0, 0.5,           //
      -0.5, 0.0, 0.5, -0.5, 0.0, 0.5,           //
      -s12, s3, -s12, -s12, s3, -s12,           //
      s6, -s6, s6, -s6, s6, -s6;
  return U;
}

Eigen::MatrixXd benzene_atomiclike() {
  const double s2 = 1.0 / std::sqrt(2.0), s3 = 1.0 / std::sqrt(3.0),
               s23 = std::sqrt(2.0 / 3.0);
  // slots start as the canonical orbitals; each published line rotates one
  // slot pair in place, reading the pre-line values (the second target of the
  // first line is slot 6, correcting an evident transcription slip)
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(6, 6);
  auto line = [&S](int ta, int tb, int sa, int sb, double a11, double a12,
                   double a21, double a22) {
    const Eigen::RowVectorXd va = S.row(sa), vb = S.row(sb);
    S.row(ta) = a11 * va + a12 * vb;
    S.row(tb) = a21 * va + a22 * vb;
  };
  // step 1
  line(0, 5, 0, 5, -s2, s2, s2, s2);
  line(1, 4, 1, 4, -s2, s2, s2, s2);
  line(2, 3, 2, 3, -s2, s2, s2, s2);
  // step 2
  line(0, 1, 0, 1, -s3, s23, s23, s3);
  line(4, 5, 4, 5, -s3, s23, s23, s3);
  // step 3
  line(1, 3, 1, 3, -s2, -s2, -s2, s2);
  line(2, 4, 2, 4, -s2, s2, s2, s2);

  // slots now hold the atomic-like rows out of order; match against U^T
  const Eigen::MatrixXd T = benzene_printed_u().transpose();
  Eigen::MatrixXd out(6, 6);
  std::array<bool, 6> used{};
  for (int slot = 0; slot < 6; ++slot) {
    int hit = -1;
    for (int i = 0; i < 6 && hit < 0; ++i)
      if (!used[i] && (S.row(slot) - T.row(i)).cwiseAbs().maxCoeff() < 1e-12)
        hit = i;
    if (hit < 0)
      throw std::runtime_error(
          "benzene step composition does not reproduce U^-1: slot " +
          std::to_string(slot + 1) + " matches no row, max residual " +
          std::to_string((S - T).cwiseAbs().maxCoeff()));
    used[hit] = true;
    out.row(hit) = S.row(slot);
  }
  return out;
}

WaveFunction apply_rotation(const WaveFunction& psi, const Eigen::MatrixXd& R) {
  const int D = psi.basis->orbitals;
  if (R.rows() != D || R.cols() != D)
    throw std::invalid_argument("rotation dimension does not match orbital count");
  if ((R.transpose() * R - Eigen::MatrixXd::Identity(D, D)).cwiseAbs().maxCoeff() >
      kOrthoTol)
    throw std::invalid_argument("rotation matrix is not orthogonal");

  std::vector<PlaneFactor> factors;
  Eigen::VectorXd diag;
  // chi_p = sum_q R(p,q) phi_q means f+_{phi q} = sum_p R(p,q) f+_{chi p},
  // so the amplitude map is the lift of R^T in the row-lift convention below
  givens_factorize(R.transpose(), factors, diag);

  WaveFunction out;
  out.basis = psi.basis;
  out.amps = psi.amps;
  for (const PlaneFactor& f : factors) apply_plane_lift(*psi.basis, f, out.amps);
  for (int p = 0; p < D; ++p) {
    if (diag[p] > 0) continue;
    // f+_p -> -f+_p on both spins: phase (-1)^(n_p)
    for (std::int64_t k = 0; k < psi.basis->size(); ++k) {
      const Det d = psi.basis->dets[static_cast<std::size_t>(k)];
      const int n = static_cast<int>(occupied(d, 2 * p)) +
                    static_cast<int>(occupied(d, 2 * p + 1));
      if (n & 1) out.amps[k] = -out.amps[k];
    }
  }
  const double nrm = out.amps.norm();
  if (std::abs(nrm - psi.amps.norm()) > 1e-12)
    throw std::runtime_error("rotation failed to preserve the norm: " +
                             std::to_string(nrm));
  return out;
}

Eigen::MatrixXd canonical_rows(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  Eigen::MatrixXd rows = es.eigenvectors().transpose();
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    Eigen::Index imax = 0;
    rows.row(r).cwiseAbs().maxCoeff(&imax);
    if (rows(r, imax) < 0) rows.row(r) = -rows.row(r);
  }
  return rows;
}

WaveFunction single_electron_state(double theta, double phi) {
  WaveFunction psi;
  psi.basis = build_sector_basis(2, 1, 1);
  psi.amps.setZero(psi.basis->size());
  const Det a = 1ULL << mode_index(1, Spin::up);
  const Det b = 1ULL << mode_index(2, Spin::up);
  psi.amps[psi.basis->find(a)] = std::cos(theta);
  psi.amps[psi.basis->find(b)] = std::polar(std::sin(theta), phi);
  return psi;
}

WaveFunction bond_state(int which) {
  static const std::vector<std::vector<int>> modes = {
      {0}, {0, 1}, {0, 1, 2}, {0, 1, 2, 3}};
  if (which < 1 || which > 4) throw std::invalid_argument("bond state index in 1..4");
  Det d = 0;
  int n = 0, tsz = 0;
  for (const int m : modes[static_cast<std::size_t>(which - 1)]) {
    d |= 1ULL << m;
    ++n;
    tsz += (m % 2 == 0) ? 1 : -1;
  }
  WaveFunction psi;
  psi.basis = build_sector_basis(2, n, tsz);
  psi.amps.setZero(psi.basis->size());
  psi.amps[psi.basis->find(d)] = 1.0;
  return psi;
}

WaveFunction k_fold_bond_state(int K) {
  if (K < 1 || K > 16) throw std::invalid_argument("bond count in 1..16");
  Det d = 0;
  for (int k = 0; k < K; ++k) {
    const int orb = 2 * k + 1;  // bonding orbital of bond k+1
    d |= 1ULL << mode_index(orb, Spin::up);
    d |= 1ULL << mode_index(orb, Spin::down);
  }
  WaveFunction psi;
  psi.basis = build_sector_basis(2 * K, 2 * K, 0);
  psi.amps.setZero(psi.basis->size());
  psi.amps[psi.basis->find(d)] = 1.0;
  return psi;
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open matrix file: " + path);
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1)
    throw std::invalid_argument("matrix file must start with 'rows cols'");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(in >> m(r, c)))
        throw std::invalid_argument("matrix file ended early at row " +
                                 std::to_string(r + 1));
  return m;
}

void write_matrix(const Eigen::MatrixXd& m, std::ostream& out) {
  out << m.rows() << " " << m.cols() << "\n";
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      out << buf << (c + 1 == m.cols() ? "\n" : " ");
    }
  }
}

}  // namespace orbcorr
