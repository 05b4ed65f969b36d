#include "orbcorr/integrals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace orbcorr {

std::array<int, 4> IntegralSet::canonical(int p, int q, int r, int s) {
  if (p < q) std::swap(p, q);
  if (r < s) std::swap(r, s);
  if (p < r || (p == r && q < s)) {
    std::swap(p, r);
    std::swap(q, s);
  }
  return {p, q, r, s};
}

double IntegralSet::g_at(int p, int q, int r, int s) const {
  const auto it = g.find(canonical(p, q, r, s));
  return it == g.end() ? 0.0 : it->second;
}

void IntegralSet::set_g(int p, int q, int r, int s, double v) {
  g[canonical(p, q, r, s)] = v;
}

std::vector<double> IntegralSet::dense_g() const {
  const int D = orbitals;
  std::vector<double> out(static_cast<std::size_t>(D) * D * D * D, 0.0);
  auto at = [&](int p, int q, int r, int s) -> double& {
    return out[((static_cast<std::size_t>(p) * D + q) * D + r) * D + s];
  };
  for (const auto& [idx, v] : g) {
    const auto [p, q, r, s] = idx;
    at(p, q, r, s) = at(q, p, r, s) = at(p, q, s, r) = at(q, p, s, r) = v;
    at(r, s, p, q) = at(s, r, p, q) = at(r, s, q, p) = at(s, r, q, p) = v;
  }
  return out;
}

namespace {

// splits "KEY=VALUE" tokens out of the &FCI namelist header
void parse_header_assignments(const std::string& header, int line_no,
                              IntegralSet& ints) {
  std::string cleaned;
  for (const char c : header)
    cleaned += (c == ',' || c == '\n' || c == '\t') ? ' ' : c;
  std::istringstream iss(cleaned);
  std::string token;
  while (iss >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    std::string key = token.substr(0, eq);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    const std::string val = token.substr(eq + 1);
    try {
      if (key == "NORB")
        ints.orbitals = std::stoi(val);
      else if (key == "NELEC")
        ints.nelec = std::stoi(val);
      else if (key == "MS2")
        ints.ms2 = std::stoi(val);
      // ORBSYM, ISYM and friends are accepted and ignored
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad header value in '" + token + "'");
    }
  }
}

bool is_header_end(const std::string& line) {
  std::string t;
  for (const char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  std::string upper = t;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return t == "/" || upper == "&END" || (!t.empty() && t.back() == '/') ||
         (upper.size() >= 4 && upper.substr(upper.size() - 4) == "&END");
}

}  // namespace

IntegralSet parse_fcidump(std::istream& in) {
  IntegralSet ints;
  std::string line;
  int line_no = 0;
  std::string header;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    header += " " + line;
    if (line_no == 1 && line.find('&') == std::string::npos)
      throw ParseError(1, "missing &FCI header");
    if (is_header_end(line)) {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError(line_no, "header never terminated by / or &END");
  parse_header_assignments(header, line_no, ints);
  if (ints.orbitals < 1 || 2 * ints.orbitals > 64)
    throw ParseError(line_no, "NORB missing or out of range");

  const int D = ints.orbitals;
  ints.h = Eigen::MatrixXd::Zero(D, D);

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream iss(line);
    double v;
    long i, j, k, l;
    if (!(iss >> v)) {
      std::string probe;
      std::istringstream chk(line);
      if (!(chk >> probe)) continue;  // blank line
      throw ParseError(line_no, "non-numeric value field");
    }
    if (!(iss >> i >> j >> k >> l))
      throw ParseError(line_no, "expected 4 indices after value");
    std::string trailing;
    if (iss >> trailing) throw ParseError(line_no, "trailing junk '" + trailing + "'");
    for (const long idx : {i, j, k, l})
      if (idx < 0 || idx > D)
        throw ParseError(line_no, "orbital index " + std::to_string(idx) +
                                      " out of range 0.." + std::to_string(D));
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      ints.e_core = v;
    } else if (k == 0 && l == 0) {
      if (i == 0 || j == 0) throw ParseError(line_no, "one-electron line with index 0");
      const double prev = ints.h(i - 1, j - 1);
      if (prev != 0.0 && std::abs(prev - v) > 1e-10)
        throw ParseError(line_no, "conflicting duplicate h entry");
      ints.h(i - 1, j - 1) = v;
      ints.h(j - 1, i - 1) = v;
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0)
        throw ParseError(line_no, "two-electron line with a zero index");
      const auto key = IntegralSet::canonical(static_cast<int>(i - 1),
                                              static_cast<int>(j - 1),
                                              static_cast<int>(k - 1),
                                              static_cast<int>(l - 1));
      const auto it = ints.g.find(key);
      if (it != ints.g.end() && std::abs(it->second - v) > 1e-10)
        throw ParseError(line_no, "conflicting duplicate (ij|kl) entry");
      ints.g[key] = v;
    }
  }
  return ints;
}

IntegralSet parse_fcidump_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open FCIDUMP file: " + path);
  return parse_fcidump(in);
}

void write_fcidump(const IntegralSet& ints, std::ostream& out) {
  const int D = ints.orbitals;
  char buf[96];
  std::snprintf(buf, sizeof buf, "&FCI NORB=%d,NELEC=%d,MS2=%d,\n", D,
                ints.nelec < 0 ? 0 : ints.nelec, ints.ms2);
  out << buf << "&END\n";
  auto emit = [&](double v, int i, int j, int k, int l) {
    std::snprintf(buf, sizeof buf, "%24.16e %3d %3d %3d %3d\n", v, i, j, k, l);
    out << buf;
  };
  for (const auto& [idx, v] : ints.g)
    emit(v, idx[0] + 1, idx[1] + 1, idx[2] + 1, idx[3] + 1);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j <= i; ++j)
      if (ints.h(i, j) != 0.0) emit(ints.h(i, j), i + 1, j + 1, 0, 0);
  emit(ints.e_core, 0, 0, 0, 0);
}

Geometry read_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open geometry file: " + path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty XYZ file");
  ++line_no;
  int count = 0;
  try {
    count = std::stoi(line);
  } catch (const std::exception&) {
    throw ParseError(1, "first XYZ line must be the atom count");
  }
  std::getline(in, line);  // comment
  ++line_no;
  Geometry geo;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream iss(line);
    std::string el;
    double x, y, z;
    if (!(iss >> el)) continue;  // blank trailing line
    if (!(iss >> x >> y >> z))
      throw ParseError(line_no, "expected 'element x y z'");
    geo.elements.push_back(el);
    geo.xyz.emplace_back(x, y, z);
  }
  if (geo.sites() != count)
    throw ParseError(line_no, "atom count mismatch: header says " +
                                  std::to_string(count) + ", found " +
                                  std::to_string(geo.sites()));
  return geo;
}

Geometry carbon_sites(const Geometry& g) {
  Geometry out;
  for (int i = 0; i < g.sites(); ++i)
    if (g.elements[i] == "C" || g.elements[i] == "c") {
      out.elements.push_back(g.elements[i]);
      out.xyz.push_back(g.xyz[i]);
    }
  return out;
}

std::vector<Bond> detect_bonds(const Geometry& g, double threshold) {
  std::vector<Bond> bonds;
  for (int i = 0; i < g.sites(); ++i)
    for (int j = i + 1; j < g.sites(); ++j) {
      const double r = g.distance(i, j);
      if (r < threshold) bonds.push_back({i, j, r});
    }
  for (std::size_t a = 0; a + 1 < bonds.size(); ++a)
    for (std::size_t b = a + 1; b < bonds.size(); ++b)
      if (bonds[a].r == bonds[b].r && std::abs(bonds[a].r - threshold) < 0.05)
        std::cerr << "warning: bonds (" << bonds[a].i + 1 << "," << bonds[a].j + 1
                  << ") and (" << bonds[b].i + 1 << "," << bonds[b].j + 1
                  << ") sit at the same near-threshold distance " << bonds[a].r
                  << "; keeping site-index order\n";
  return bonds;
}

IntegralSet build_huckel(int sites, const std::vector<std::pair<int, int>>& edges,
                         double t) {
  IntegralSet ints;
  ints.orbitals = sites;
  ints.h = Eigen::MatrixXd::Zero(sites, sites);
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= sites || j >= sites || i == j)
      throw std::invalid_argument("bad edge in site graph");
    ints.h(i, j) = ints.h(j, i) = -t;
  }
  return ints;
}

IntegralSet build_hubbard(int sites, const std::vector<std::pair<int, int>>& edges,
                          double t, double U) {
  IntegralSet ints = build_huckel(sites, edges, t);
  for (int i = 0; i < sites; ++i) ints.set_g(i, i, i, i, U);
  return ints;
}

IntegralSet build_huckel(const Geometry& g, const PiModelParams& params) {
  IntegralSet ints;
  const int D = g.sites();
  ints.orbitals = D;
  ints.h = Eigen::MatrixXd::Zero(D, D);
  for (const Bond& b : detect_bonds(g, params.bond_threshold))
    ints.h(b.i, b.j) = ints.h(b.j, b.i) = -params.hopping(b.r);
  return ints;
}

IntegralSet build_hubbard(const Geometry& g, const PiModelParams& params) {
  IntegralSet ints = build_huckel(g, params);
  for (int i = 0; i < ints.orbitals; ++i) ints.set_g(i, i, i, i, params.hubbard_u);
  return ints;
}

double ohno_potential(double r, double U) {
  constexpr double e2 = 14.397;  // eV * Angstrom
  const double x = U * r / e2;
  return U / std::sqrt(1.0 + x * x);
}

IntegralSet build_ppp(const Geometry& g, const PiModelParams& params) {
  IntegralSet ints = build_hubbard(g, params);
  const int D = g.sites();
  for (int i = 0; i < D; ++i)
    for (int j = i + 1; j < D; ++j) {
      const double v = ohno_potential(g.distance(i, j), params.hubbard_u);
      ints.set_g(i, i, j, j, v);
      // (n_i - 1)(n_j - 1) expansion: the n_i n_j part lives in g above
      ints.h(i, i) -= v;
      ints.h(j, j) -= v;
      ints.e_core += v;
    }
  return ints;
}

}  // namespace orbcorr
