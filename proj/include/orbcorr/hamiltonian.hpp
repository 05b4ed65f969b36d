#pragma once
// Second-quantized Hamiltonian assembly on a sector basis:
//   H = sum_pq h_pq f+_ps f_qs
//     + 1/2 sum_pqrs (pq|rs) sum_st f+_ps f+_rt f_st f_qs
//     + e_core
// with chemist-notation (pq|rs). Matrix elements come from direct operator
// application to each ket; the result is exactly symmetric by construction.

#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "orbcorr/fock.hpp"
#include "orbcorr/integrals.hpp"

namespace orbcorr {

struct SparseHamiltonian {
  std::shared_ptr<const SectorBasis> basis;
  Eigen::SparseMatrix<double, Eigen::RowMajor> mat;  // real symmetric

  std::int64_t dim() const { return mat.rows(); }

  // y = H x; the parallel variant distributes rows and is bitwise identical
  // to the serial one (each row is an independent dot product)
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  void multiply_serial(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  void multiply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(mat); }
};

// OpenMP over kets; ints.orbitals must equal basis->orbitals
SparseHamiltonian assemble_hamiltonian(const IntegralSet& ints,
                                       std::shared_ptr<const SectorBasis> basis);
// single-threaded reference, identical output
SparseHamiltonian assemble_hamiltonian_serial(const IntegralSet& ints,
                                              std::shared_ptr<const SectorBasis> basis);

}  // namespace orbcorr
