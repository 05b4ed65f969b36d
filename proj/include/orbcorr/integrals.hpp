#pragma once
// One- and two-electron integral containers, FCIDUMP I/O, XYZ geometries, and
// the built-in pi-electron model builders (Hueckel, Hubbard, PPP/Ohno).

#include <array>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace orbcorr {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_),
        line(line_) {}
};

// Chemist-notation two-electron integrals (pq|rs), stored once per canonical
// index quadruple; h is the one-electron matrix, e_core a scalar shift.
// All indices 0-based here; FCIDUMP's 1-based indices are shifted on I/O.
struct IntegralSet {
  int orbitals = 0;
  double e_core = 0.0;
  Eigen::MatrixXd h;  // orbitals x orbitals, symmetric
  std::map<std::array<int, 4>, double> g;

  // header metadata when read from FCIDUMP, else -1 / 0
  int nelec = -1;
  int ms2 = 0;

  // representative of the 8 permutations (pq|rs)=(qp|rs)=(pq|sr)=(rs|pq)=...
  static std::array<int, 4> canonical(int p, int q, int r, int s);
  double g_at(int p, int q, int r, int s) const;
  void set_g(int p, int q, int r, int s, double v);
  // dense D^4 expansion, index ((p*D+q)*D+r)*D+s
  std::vector<double> dense_g() const;
  bool two_body_zero() const { return g.empty(); }
};

IntegralSet parse_fcidump(std::istream& in);
IntegralSet parse_fcidump_file(const std::string& path);
void write_fcidump(const IntegralSet& ints, std::ostream& out);

struct Geometry {
  std::vector<std::string> elements;
  std::vector<Eigen::Vector3d> xyz;  // Angstrom
  int sites() const { return static_cast<int>(xyz.size()); }
  double distance(int i, int j) const { return (xyz[i] - xyz[j]).norm(); }
};

Geometry read_xyz(const std::string& path);
// active pi centers: carbon atoms only (hydrogens dropped)
Geometry carbon_sites(const Geometry& g);

struct Bond {
  int i, j;  // 0-based sites, i < j
  double r;
};

// all site pairs closer than threshold, ascending (i, j); pairs whose
// distances collide exactly at near-threshold get a deterministic order by
// site index (and a stderr warning)
std::vector<Bond> detect_bonds(const Geometry& g, double threshold = 1.6);

struct PiModelParams {
  double t = 2.4;              // hopping magnitude at the reference bond length
  double hubbard_u = 11.26;    // on-site repulsion
  double bond_threshold = 1.6;
  // bond-length alternation of the hopping: |t(r)| = t + peierls_slope*(peierls_r0 - r);
  // slope 0 gives uniform hoppings
  double peierls_slope = 3.21;
  double peierls_r0 = 1.40;

  double hopping(double r) const { return t + peierls_slope * (peierls_r0 - r); }
};

// tight-binding h with h_ij = -t on the given edges, no two-body part
IntegralSet build_huckel(int sites, const std::vector<std::pair<int, int>>& edges,
                         double t);
// Hueckel plus on-site (ii|ii) = U
IntegralSet build_hubbard(int sites, const std::vector<std::pair<int, int>>& edges,
                          double t, double U);

// geometry-driven variants; hoppings per detected bond via params.hopping(r)
IntegralSet build_huckel(const Geometry& g, const PiModelParams& params);
IntegralSet build_hubbard(const Geometry& g, const PiModelParams& params);

// Ohno interpolation V(r) = U / sqrt(1 + (U r / e2)^2) with e2 = 14.397 eV*Angstrom:
// V(0) = U, V(r) -> e2/r at large r
double ohno_potential(double r, double U);

// PPP model in particle-hole symmetric form
//   H = sum_bonds -t(r) (c^dag c + h.c.) + U sum_i n_iu n_id
//     + sum_{i<j} V_ij (n_i - 1)(n_j - 1)
// mapped to integrals: g(ii|ii) = U, g(ii|jj) = V_ij,
// h_ii -= sum_j V_ij, e_core += (1/2) sum_{i != j} V_ij
IntegralSet build_ppp(const Geometry& g, const PiModelParams& params);

}  // namespace orbcorr
