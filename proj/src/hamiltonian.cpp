#include "orbcorr/hamiltonian.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace orbcorr {

namespace {

struct CreatePair {
  int p, r;
  double g;
};

// for fixed annihilated orbitals (q, s), the creations (p, r) with (pq|rs) != 0
std::vector<std::vector<CreatePair>> creation_lists(const IntegralSet& ints) {
  const int D = ints.orbitals;
  std::vector<std::vector<CreatePair>> lists(static_cast<std::size_t>(D) * D);
  if (ints.g.empty()) return lists;
  const std::vector<double> gd = ints.dense_g();
  for (int q = 0; q < D; ++q)
    for (int s = 0; s < D; ++s) {
      auto& list = lists[static_cast<std::size_t>(q) * D + s];
      for (int p = 0; p < D; ++p)
        for (int r = 0; r < D; ++r) {
          const double v = gd[((static_cast<std::size_t>(p) * D + q) * D + r) * D + s];
          if (v != 0.0) list.push_back({p, r, v});
        }
    }
  return lists;
}

// contributions of H|ket> as sorted, combined (index, value) pairs
void ket_column(const SectorBasis& basis, const Eigen::MatrixXd& h,
                const std::vector<std::vector<CreatePair>>& glists, double e_core,
                std::int64_t k, std::vector<std::pair<std::int64_t, double>>& out) {
  const int D = basis.orbitals;
  const Det d = basis.dets[static_cast<std::size_t>(k)];
  out.clear();
  if (e_core != 0.0) out.emplace_back(k, e_core);

  Det occ = d;
  while (occ) {
    const int mq = std::countr_zero(occ);
    occ &= occ - 1;
    const int q = mq >> 1;
    const int sigma = mq & 1;
    const auto [d1, s1] = apply_annihilation(d, mq);

    for (int p = 0; p < D; ++p) {
      const double hv = h(p, q);
      if (hv == 0.0) continue;
      const auto [d2, s2] = apply_creation(d1, 2 * p + sigma);
      if (s2 == 0) continue;
      out.emplace_back(basis.find(d2), s1 * s2 * hv);
    }

    if (glists.empty()) continue;
    Det occ2 = d1;
    while (occ2) {
      const int ms = std::countr_zero(occ2);
      occ2 &= occ2 - 1;
      const int s = ms >> 1;
      const int tau = ms & 1;
      const auto [d2, s2] = apply_annihilation(d1, ms);
      for (const CreatePair& cp : glists[static_cast<std::size_t>(q) * D + s]) {
        const auto [d3, s3] = apply_creation(d2, 2 * cp.r + tau);
        if (s3 == 0) continue;
        const auto [d4, s4] = apply_creation(d3, 2 * cp.p + sigma);
        if (s4 == 0) continue;
        out.emplace_back(basis.find(d4), 0.5 * s1 * s2 * s3 * s4 * cp.g);
      }
    }
  }

  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t w = 0;
  for (std::size_t i = 0; i < out.size();) {
    std::int64_t col = out[i].first;
    double acc = 0.0;
    while (i < out.size() && out[i].first == col) acc += out[i++].second;
    if (acc != 0.0) out[w++] = {col, acc};
  }
  out.resize(w);
}

SparseHamiltonian assemble_impl(const IntegralSet& ints,
                                std::shared_ptr<const SectorBasis> basis,
                                bool parallel) {
  if (ints.orbitals != basis->orbitals)
    throw std::invalid_argument("integral orbital count does not match basis");
  const std::int64_t dim = basis->size();
  const auto glists = creation_lists(ints);

  std::vector<std::vector<std::pair<std::int64_t, double>>> rows(
      static_cast<std::size_t>(dim));
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (std::int64_t k = 0; k < dim; ++k)
    ket_column(*basis, ints.h, glists, ints.e_core, k,
               rows[static_cast<std::size_t>(k)]);

  SparseHamiltonian H;
  H.basis = std::move(basis);
  Eigen::SparseMatrix<double, Eigen::RowMajor> A(dim, dim);
  {
    Eigen::VectorXi counts(dim);
    for (std::int64_t k = 0; k < dim; ++k)
      counts[k] = static_cast<int>(rows[static_cast<std::size_t>(k)].size());
    A.reserve(counts);
    for (std::int64_t k = 0; k < dim; ++k)
      for (const auto& [col, v] : rows[static_cast<std::size_t>(k)])
        A.insert(k, col) = v;
    A.makeCompressed();
  }
  // per-ket enumeration fills H(:,k); averaging with the transpose removes the
  // last-ulp asymmetry from different summation orders of paired paths
  Eigen::SparseMatrix<double, Eigen::RowMajor> At = A.transpose();
  H.mat = 0.5 * (A + At);
  H.mat.makeCompressed();
  return H;
}

template <typename Scalar>
void csr_multiply(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m,
                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                  Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, bool parallel) {
  const std::int64_t n = m.rows();
  y.resize(n);
  const auto* outer = m.outerIndexPtr();
  const auto* inner = m.innerIndexPtr();
  const auto* vals = m.valuePtr();
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    Scalar acc{};
    for (auto idx = outer[i]; idx < outer[i + 1]; ++idx)
      acc += vals[idx] * x[inner[idx]];
    y[i] = acc;
  }
}

}  // namespace

void SparseHamiltonian::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  csr_multiply(mat, x, y, true);
}

void SparseHamiltonian::multiply_serial(const Eigen::VectorXd& x,
                                        Eigen::VectorXd& y) const {
  csr_multiply(mat, x, y, false);
}

void SparseHamiltonian::multiply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  csr_multiply(mat, x, y, true);
}

SparseHamiltonian assemble_hamiltonian(const IntegralSet& ints,
                                       std::shared_ptr<const SectorBasis> basis) {
  return assemble_impl(ints, std::move(basis), true);
}

SparseHamiltonian assemble_hamiltonian_serial(const IntegralSet& ints,
                                              std::shared_ptr<const SectorBasis> basis) {
  return assemble_impl(ints, std::move(basis), false);
}

}  // namespace orbcorr
