#include "rotorcodes/irreps.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rotorcodes {

namespace {

constexpr double kTableTol = 1e-9;

// ---------------------------------------------------------------------------
// Element identification for Z_N / D_N
// ---------------------------------------------------------------------------

// Rotation index j (element = R(+z, 2 pi j / N)) or flip index h (element =
// half-turn about the in-plane axis at angle pi h / N from +x).
struct DihedralSlot {
  bool is_flip = false;
  int index = 0;
};

DihedralSlot identify_dihedral_element(const Rotation& g, int n) {
  DihedralSlot slot;
  const double ang = g.angle();
  const Vec3 ax = g.axis();
  if (ang < 1e-9) {
    slot.is_flip = false;
    slot.index = 0;
    return slot;
  }
  if (std::abs(ax.z) > 0.5) {
    // Rotation about +/- z by `ang`; signed angle about +z is +-ang.
    const double signed_ang = ax.z > 0 ? ang : 2.0 * kPi - ang;
    slot.is_flip = false;
    slot.index = static_cast<int>(std::llround(signed_ang * n / (2.0 * kPi))) % n;
    return slot;
  }
  // Half-turn about an in-plane axis; identify which one.
  if (std::abs(ang - kPi) > 1e-9) {
    throw std::logic_error("dihedral element is neither axial nor a half-turn");
  }
  double phi = std::atan2(ax.y, ax.x);
  if (phi < 0) phi += kPi;  // axis direction is only defined up to sign
  slot.is_flip = true;
  slot.index = static_cast<int>(std::llround(phi * n / kPi)) % n;
  return slot;
}

Eigen::MatrixXcd scalar_rep(Complex z) {
  Eigen::MatrixXcd m(1, 1);
  m(0, 0) = z;
  return m;
}

// Characters from explicit matrices, checking constancy on conjugacy classes.
Eigen::MatrixXcd characters_from_matrices(const FiniteSubgroup& g,
                                          const std::vector<Irrep>& irreps) {
  const int nc = static_cast<int>(g.classes.size());
  Eigen::MatrixXcd chars(static_cast<int>(irreps.size()), nc);
  for (int i = 0; i < static_cast<int>(irreps.size()); ++i) {
    for (int c = 0; c < nc; ++c) {
      const Complex first = irreps[i].matrices[g.classes[c][0]].trace();
      for (int member : g.classes[c]) {
        if (std::abs(irreps[i].matrices[member].trace() - first) > 1e-8) {
          throw std::logic_error("irrep character not constant on a conjugacy class");
        }
      }
      chars(i, c) = first;
    }
  }
  return chars;
}

// ---------------------------------------------------------------------------
// Z_N and D_N: explicit matrices
// ---------------------------------------------------------------------------

std::vector<Irrep> cyclic_irreps(const FiniteSubgroup& g) {
  const int n = g.n;
  std::vector<int> power(g.order());
  for (int i = 0; i < g.order(); ++i) {
    const DihedralSlot slot = identify_dihedral_element(g.elements[i], n);
    if (slot.is_flip) throw std::logic_error("flip found in cyclic group");
    power[i] = slot.index;
  }
  std::vector<Irrep> irreps(n);
  for (int lam = 0; lam < n; ++lam) {
    irreps[lam].label = std::to_string(lam);
    irreps[lam].dim = 1;
    irreps[lam].matrices.resize(g.order());
    for (int i = 0; i < g.order(); ++i) {
      const double arg = 2.0 * kPi * lam * power[i] / n;
      irreps[lam].matrices[i] = scalar_rep(Complex(std::cos(arg), std::sin(arg)));
    }
  }
  return irreps;
}

std::vector<Irrep> dihedral_irreps(const FiniteSubgroup& g) {
  const int n = g.n;
  std::vector<DihedralSlot> slot(g.order());
  for (int i = 0; i < g.order(); ++i) {
    slot[i] = identify_dihedral_element(g.elements[i], n);
  }

  std::vector<Irrep> irreps;
  auto add_one_dim = [&](const std::string& label,
                         const std::function<Complex(const DihedralSlot&)>& value) {
    Irrep ir;
    ir.label = label;
    ir.dim = 1;
    ir.matrices.resize(g.order());
    for (int i = 0; i < g.order(); ++i) ir.matrices[i] = scalar_rep(value(slot[i]));
    irreps.push_back(std::move(ir));
  };

  add_one_dim("1", [](const DihedralSlot&) { return Complex(1.0, 0.0); });
  add_one_dim("1'", [](const DihedralSlot& s) {
    return Complex(s.is_flip ? -1.0 : 1.0, 0.0);
  });
  if (n % 2 == 0) {
    // The signs of 1+/1- are anchored on the reflection R_{2pi/n, pi, 0},
    // which is the flip with index h0 = n/2 + 1 in the +x-anchored list.
    const int h0 = n / 2 + 1;
    for (int sigma : {+1, -1}) {
      add_one_dim(sigma > 0 ? "1+" : "1-", [=](const DihedralSlot& s) {
        const int par = s.is_flip ? (s.index - h0) : s.index;
        const double sign = (((par % 2) + 2) % 2 == 0) ? 1.0 : -1.0;
        return Complex(sign * (s.is_flip ? sigma : 1), 0.0);
      });
    }
  }

  const int two_dim_count = (n % 2 == 0) ? n / 2 - 1 : (n - 1) / 2;
  for (int k = 1; k <= two_dim_count; ++k) {
    Irrep ir;
    ir.label = two_dim_count == 1 ? "2" : "2_" + std::to_string(k);
    ir.dim = 2;
    ir.matrices.resize(g.order());
    for (int i = 0; i < g.order(); ++i) {
      const double arg = 2.0 * kPi * k * slot[i].index / n;
      const Complex w(std::cos(arg), std::sin(arg));
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
      if (slot[i].is_flip) {
        m(0, 1) = w;
        m(1, 0) = std::conj(w);
      } else {
        m(0, 0) = w;
        m(1, 1) = std::conj(w);
      }
      ir.matrices[i] = m;
    }
    irreps.push_back(std::move(ir));
  }
  return irreps;
}

// ---------------------------------------------------------------------------
// T, O, I: hardcoded characters + numeric matrices from the regular
// representation
// ---------------------------------------------------------------------------

struct PolyhedralSpec {
  std::vector<std::string> labels;
  // Expected (class size, rotation angle) per canonical class column.
  std::vector<std::pair<int, double>> class_shape;
  Eigen::MatrixXcd characters;  // labels x canonical classes
};

PolyhedralSpec polyhedral_spec(GroupFamily family) {
  PolyhedralSpec spec;
  const Complex eps = std::polar(1.0, 2.0 * kPi / 3.0);
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  switch (family) {
    case GroupFamily::Tetrahedral: {
      spec.labels = {"1", "1'", "1''", "3"};
      spec.class_shape = {{1, 0.0}, {3, kPi}, {4, 2.0 * kPi / 3.0}, {4, 2.0 * kPi / 3.0}};
      spec.characters.resize(4, 4);
      spec.characters << 1, 1, 1, 1,                          //
          1, 1, eps, std::conj(eps),                          //
          1, 1, std::conj(eps), eps,                          //
          3, -1, 0, 0;
      break;
    }
    case GroupFamily::Octahedral: {
      spec.labels = {"1", "1'", "2", "3", "3'"};
      spec.class_shape = {
          {1, 0.0}, {6, kPi / 2.0}, {3, kPi}, {8, 2.0 * kPi / 3.0}, {6, kPi}};
      spec.characters.resize(5, 5);
      spec.characters << 1, 1, 1, 1, 1,  //
          1, -1, 1, 1, -1,               //
          2, 0, 2, -1, 0,                //
          3, 1, -1, 0, -1,               //
          3, -1, -1, 0, 1;
      break;
    }
    case GroupFamily::Icosahedral: {
      spec.labels = {"1", "3", "3'", "4", "5"};
      spec.class_shape = {{1, 0.0},
                          {12, 2.0 * kPi / 5.0},
                          {12, 4.0 * kPi / 5.0},
                          {20, 2.0 * kPi / 3.0},
                          {15, kPi}};
      spec.characters.resize(5, 5);
      spec.characters << 1, 1, 1, 1, 1,          //
          3, phi, 1.0 - phi, 0, -1,              //
          3, 1.0 - phi, phi, 0, -1,              //
          4, -1, -1, 1, 0,                       //
          5, 0, 0, -1, 1;
      break;
    }
    default:
      throw std::logic_error("polyhedral_spec: not a polyhedral family");
  }
  return spec;
}

// Map each conjugacy class of `g` to its canonical column in the spec.
// Classes are matched by (size, angle); the two equal-shape C3 classes of T
// are split by which one contains the rotation by 2 pi / 3 about (1,1,1).
std::vector<int> canonical_class_map(const FiniteSubgroup& g, const PolyhedralSpec& spec) {
  const int nc = static_cast<int>(g.classes.size());
  if (nc != static_cast<int>(spec.class_shape.size())) {
    throw std::logic_error("unexpected number of conjugacy classes");
  }
  std::vector<int> slot(nc, -1);
  std::vector<bool> used(nc, false);
  for (int c = 0; c < nc; ++c) {
    const int size = static_cast<int>(g.classes[c].size());
    const double ang = g.elements[g.classes[c][0]].angle();
    int match = -1;
    int match_count = 0;
    for (int s = 0; s < nc; ++s) {
      if (used[s]) continue;
      if (spec.class_shape[s].first == size &&
          std::abs(spec.class_shape[s].second - ang) < 1e-9) {
        if (match < 0) match = s;
        ++match_count;
      }
    }
    if (match < 0) throw std::logic_error("conjugacy class does not match any canonical class");
    if (match_count > 1) {
      // Ambiguous pair (T's two C3 classes): the class containing
      // R(+diag, 2 pi / 3) takes the earlier canonical column.
      const Rotation pin = Rotation::from_axis_angle(
          Vec3{1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)},
          2.0 * kPi / 3.0);
      const int pin_idx = g.find(pin);
      if (pin_idx < 0) throw std::logic_error("canonical C3 pin element not found");
      const bool contains_pin =
          std::find(g.classes[c].begin(), g.classes[c].end(), pin_idx) != g.classes[c].end();
      if (!contains_pin) {
        // Take the later of the ambiguous columns.
        for (int s = match + 1; s < nc; ++s) {
          if (!used[s] && spec.class_shape[s].first == size &&
              std::abs(spec.class_shape[s].second - ang) < 1e-9) {
            match = s;
            break;
          }
        }
      }
    }
    slot[c] = match;
    used[match] = true;
  }
  return slot;
}

// Left-regular representation: basis vector x maps to g * x.
void add_regular(Eigen::MatrixXcd& acc, const FiniteSubgroup& g, int gi, Complex coeff) {
  for (int x = 0; x < g.order(); ++x) acc(g.mult[gi][x], x) += coeff;
}

// Extract one unitary copy of the irrep with the given character row out of
// the regular representation.  Deterministic (fixed RNG seed).
std::vector<Eigen::MatrixXcd> extract_irrep_matrices(const FiniteSubgroup& g,
                                                     const Eigen::VectorXcd& char_by_class,
                                                     int dim, int irrep_seed) {
  const int order = g.order();
  // Isotypic projector P = (d/|G|) sum_g conj(chi(g)) R(g).
  Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(order, order);
  for (int gi = 0; gi < order; ++gi) {
    add_regular(proj, g, gi,
                std::conj(char_by_class(g.class_of[gi])) * double(dim) / double(order));
  }

  // Random Hermitian seed, compressed to the isotypic block and twirled so it
  // commutes with the whole representation.
  std::mt19937_64 rng(0x5eed0000u + static_cast<unsigned>(irrep_seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd m0(order, order);
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j) m0(i, j) = Complex(normal(rng), normal(rng));
  m0 = (m0 + m0.adjoint().eval()) / 2.0;
  m0 = (proj * m0 * proj).eval();
  Eigen::MatrixXcd twirled = Eigen::MatrixXcd::Zero(order, order);
  for (int gi = 0; gi < order; ++gi) {
    // R(g) m0 R(g)^dagger permutes both indices by g.
    for (int i = 0; i < order; ++i)
      for (int j = 0; j < order; ++j) twirled(g.mult[gi][i], g.mult[gi][j]) += m0(i, j);
  }
  twirled /= double(order);
  twirled = ((twirled + twirled.adjoint().eval()) / 2.0).eval();

  // The commutant restricted to the isotypic block is 1_d (x) B; each simple
  // eigenvalue of B carves out exactly one d-dimensional irrep copy.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(twirled);
  const Eigen::VectorXd vals = es.eigenvalues();
  const double scale = vals.cwiseAbs().maxCoeff();
  if (scale < 1e-12) throw std::logic_error("twirled seed collapsed to zero");

  // Cluster the nonzero eigenvalues and take the cluster farthest from zero.
  int best_lo = -1, best_hi = -1;
  int lo = 0;
  for (int i = 0; i <= order; ++i) {
    const bool boundary =
        i == order || (i > 0 && std::abs(vals(i) - vals(i - 1)) > 1e-6 * scale);
    if (boundary) {
      const int hi = i - 1;
      if (lo <= hi && std::abs(vals(lo)) > 1e-7 * scale) {
        if (best_lo < 0 || std::abs(vals(lo)) > std::abs(vals(best_lo))) {
          best_lo = lo;
          best_hi = hi;
        }
      }
      lo = i;
    }
  }
  if (best_lo < 0 || best_hi - best_lo + 1 != dim) {
    throw std::logic_error("irrep extraction: eigenvalue cluster has wrong size");
  }
  Eigen::MatrixXcd v = es.eigenvectors().middleCols(best_lo, dim);

  std::vector<Eigen::MatrixXcd> mats(order);
  for (int gi = 0; gi < order; ++gi) {
    Eigen::MatrixXcd rv(order, dim);
    for (int x = 0; x < order; ++x) rv.row(g.mult[gi][x]) = v.row(x);
    mats[gi] = v.adjoint() * rv;
  }
  return mats;
}

std::vector<Irrep> polyhedral_irreps(const FiniteSubgroup& g, const PolyhedralSpec& spec,
                                     const std::vector<int>& class_slot) {
  std::vector<Irrep> irreps(spec.labels.size());
  for (int i = 0; i < static_cast<int>(spec.labels.size()); ++i) {
    // Character row re-indexed to this group's own class numbering.
    Eigen::VectorXcd by_class(g.classes.size());
    for (int c = 0; c < static_cast<int>(g.classes.size()); ++c) {
      by_class(c) = spec.characters(i, class_slot[c]);
    }
    // Dimension = character on the identity's class.
    const int dim = static_cast<int>(std::lround(std::real(by_class(g.class_of[0]))));
    irreps[i].label = spec.labels[i];
    irreps[i].dim = dim;
    irreps[i].matrices = extract_irrep_matrices(g, by_class, dim, i);
    // Validate the numeric copy against the claimed characters.
    for (int e = 0; e < g.order(); ++e) {
      if (std::abs(irreps[i].matrices[e].trace() - by_class(g.class_of[e])) > 1e-8) {
        throw std::logic_error("numeric irrep trace disagrees with character table");
      }
    }
  }
  return irreps;
}

void validate_table(const IrrepTable& t) {
  // Dimension sum rule.
  int dim_sq = 0;
  for (const Irrep& ir : t.irreps) dim_sq += ir.dim * ir.dim;
  if (dim_sq != t.group.order()) {
    throw std::logic_error("irrep dimensions do not satisfy sum d^2 = |H|");
  }
  // Character row orthonormality.
  for (int i = 0; i < t.num_irreps(); ++i) {
    for (int j = 0; j < t.num_irreps(); ++j) {
      Complex acc = 0.0;
      for (int c = 0; c < static_cast<int>(t.group.classes.size()); ++c) {
        acc += double(t.group.classes[c].size()) * t.characters(i, c) *
               std::conj(t.characters(j, c));
      }
      acc /= double(t.group.order());
      if (std::abs(acc - (i == j ? 1.0 : 0.0)) > kTableTol) {
        throw std::logic_error("character rows are not orthonormal");
      }
    }
  }
}

}  // namespace

int IrrepTable::index_of(const std::string& label) const {
  for (int i = 0; i < num_irreps(); ++i) {
    if (irreps[i].label == label) return i;
  }
  throw std::invalid_argument("no irrep labelled '" + label + "' in " + group.name);
}

IrrepTable irrep_table(const FiniteSubgroup& H) {
  IrrepTable t;
  t.group = H;
  switch (H.family) {
    case GroupFamily::Cyclic:
      t.irreps = cyclic_irreps(H);
      break;
    case GroupFamily::Dihedral:
      if (H.n < 2) throw std::invalid_argument("irrep_table: dihedral order parameter must be >= 2");
      t.irreps = dihedral_irreps(H);
      break;
    case GroupFamily::Tetrahedral:
    case GroupFamily::Octahedral:
    case GroupFamily::Icosahedral: {
      const PolyhedralSpec spec = polyhedral_spec(H.family);
      const std::vector<int> slot = canonical_class_map(H, spec);
      t.irreps = polyhedral_irreps(H, spec, slot);
      break;
    }
  }
  t.characters = characters_from_matrices(t.group, t.irreps);
  validate_table(t);
  return t;
}

std::vector<int> branch(int ell, const IrrepTable& K) {
  if (ell < 0) throw std::invalid_argument("branch: ell must be >= 0");
  const FiniteSubgroup& g = K.group;
  std::vector<int> mult(K.num_irreps());
  for (int i = 0; i < K.num_irreps(); ++i) {
    Complex acc = 0.0;
    for (int e = 0; e < g.order(); ++e) {
      acc += character_so3(ell, g.elements[e].angle()) * std::conj(K.character(i, e));
    }
    acc /= double(g.order());
    const double rounded = std::round(acc.real());
    if (std::abs(acc - rounded) > kTableTol || rounded < -0.5) {
      throw std::logic_error("branching multiplicity is not a nonnegative integer");
    }
    mult[i] = static_cast<int>(rounded);
  }
  int total = 0;
  for (int i = 0; i < K.num_irreps(); ++i) total += mult[i] * K.irreps[i].dim;
  if (total != 2 * ell + 1) {
    throw std::logic_error("branching multiplicities do not add up to 2l+1");
  }
  return mult;
}

std::vector<int> branch(int ell, const FiniteSubgroup& K) {
  return branch(ell, irrep_table(K));
}

std::string format_branch(const IrrepTable& table, const std::vector<int>& mult) {
  std::ostringstream out;
  bool first = true;
  for (int i = 0; i < table.num_irreps(); ++i) {
    if (i >= static_cast<int>(mult.size()) || mult[i] == 0) continue;
    if (!first) out << " + ";
    if (mult[i] > 1) out << mult[i] << "*";
    out << table.irreps[i].label;
    first = false;
  }
  if (first) out << "0";
  return out.str();
}

Eigen::MatrixXi restriction_table(const IrrepTable& K, const IrrepTable& H) {
  const FiniteSubgroup& h = H.group;
  std::vector<int> embed(h.order());
  for (int e = 0; e < h.order(); ++e) {
    embed[e] = K.group.find(h.elements[e]);
    if (embed[e] < 0) {
      throw std::invalid_argument("restriction_table: " + h.name + " is not a subgroup of " +
                                  K.group.name);
    }
  }
  Eigen::MatrixXi table(K.num_irreps(), H.num_irreps());
  for (int i = 0; i < K.num_irreps(); ++i) {
    for (int j = 0; j < H.num_irreps(); ++j) {
      Complex acc = 0.0;
      for (int e = 0; e < h.order(); ++e) {
        acc += K.character(i, embed[e]) * std::conj(H.character(j, e));
      }
      acc /= double(h.order());
      const double rounded = std::round(acc.real());
      if (std::abs(acc - rounded) > kTableTol || rounded < -0.5) {
        throw std::logic_error("restriction multiplicity is not a nonnegative integer");
      }
      table(i, j) = static_cast<int>(rounded);
    }
  }
  return table;
}

BranchReport branch_report(int ell, const FiniteSubgroup& K, const FiniteSubgroup& H) {
  const IrrepTable kt = irrep_table(K);
  const IrrepTable ht = irrep_table(H);
  BranchReport rep;
  rep.ell = ell;
  rep.k_name = K.name;
  rep.h_name = H.name;
  for (const Irrep& ir : kt.irreps) rep.k_labels.push_back(ir.label);
  for (const Irrep& ir : ht.irreps) rep.h_labels.push_back(ir.label);
  rep.mult_k = branch(ell, kt);
  rep.restriction = restriction_table(kt, ht);
  rep.mult_h.assign(ht.num_irreps(), 0);
  for (int i = 0; i < kt.num_irreps(); ++i) {
    for (int j = 0; j < ht.num_irreps(); ++j) {
      rep.mult_h[j] += rep.mult_k[i] * rep.restriction(i, j);
    }
  }
  // The two-step route must agree with branching straight down to H.
  const std::vector<int> direct = branch(ell, ht);
  if (direct != rep.mult_h) {
    throw std::logic_error("two-step branching disagrees with direct branching");
  }
  return rep;
}

const char* to_string(KickVerdict v) {
  switch (v) {
    case KickVerdict::Correctable:
      return "correctable";
    case KickVerdict::DetectableOnly:
      return "detectable-only";
    case KickVerdict::Undetectable:
      return "undetectable";
  }
  return "?";
}

KickClassification classify_kicks(const FiniteSubgroup& H, const FiniteSubgroup& K,
                                  int ell_max) {
  const IrrepTable kt = irrep_table(K);
  const IrrepTable ht = irrep_table(H);
  const Eigen::MatrixXi restr = restriction_table(kt, ht);

  KickClassification out;
  out.verdict.resize(ell_max + 1);
  out.detail.resize(ell_max + 1);

  std::map<int, int> claimed_by;  // nontrivial H-irrep -> K-irrep that reaches it
  bool prefix_ok = true;

  for (int ell = 0; ell <= ell_max; ++ell) {
    const std::vector<int> mult = branch(ell, kt);

    std::string undet_reason;
    std::string conflict_reason;
    bool ell_ok = true;
    for (int kappa = 0; kappa < kt.num_irreps(); ++kappa) {
      if (mult[kappa] == 0 || kappa == kt.trivial_index()) continue;
      for (int lam = 0; lam < ht.num_irreps(); ++lam) {
        if (restr(kappa, lam) == 0) continue;
        if (lam == ht.trivial_index()) {
          if (undet_reason.empty()) {
            undet_reason = kt.irreps[kappa].label + " of " + K.name + " -> trivial of " + H.name;
          }
          continue;
        }
        auto it = claimed_by.find(lam);
        if (it != claimed_by.end() && it->second != kappa) {
          ell_ok = false;
          if (conflict_reason.empty()) {
            conflict_reason = ht.irreps[lam].label + " of " + H.name + " reached via both " +
                              kt.irreps[it->second].label + " and " + kt.irreps[kappa].label;
          }
        }
      }
    }
    // Within-l conflicts: two distinct K-irreps of this same l hitting one
    // nontrivial H-irrep.
    std::map<int, int> seen_here;
    for (int kappa = 0; kappa < kt.num_irreps(); ++kappa) {
      if (mult[kappa] == 0 || kappa == kt.trivial_index()) continue;
      for (int lam = 0; lam < ht.num_irreps(); ++lam) {
        if (restr(kappa, lam) == 0 || lam == ht.trivial_index()) continue;
        auto it = seen_here.find(lam);
        if (it != seen_here.end() && it->second != kappa) {
          ell_ok = false;
          if (conflict_reason.empty()) {
            conflict_reason = ht.irreps[lam].label + " of " + H.name + " reached via both " +
                              kt.irreps[it->second].label + " and " + kt.irreps[kappa].label;
          }
        } else {
          seen_here.emplace(lam, kappa);
        }
      }
    }

    if (!undet_reason.empty()) {
      out.verdict[ell] = KickVerdict::Undetectable;
      out.detail[ell] = undet_reason;
      prefix_ok = false;
    } else if (prefix_ok && ell_ok) {
      out.verdict[ell] = KickVerdict::Correctable;
      out.detail[ell] = "all shifts up to this l are simultaneously correctable";
      for (const auto& [lam, kappa] : seen_here) claimed_by.emplace(lam, kappa);
    } else {
      out.verdict[ell] = KickVerdict::DetectableOnly;
      out.detail[ell] =
          conflict_reason.empty() ? "an earlier l already broke simultaneous correctability"
                                  : conflict_reason;
      prefix_ok = false;
    }
  }
  return out;
}

std::vector<int> reciprocal_space(const FiniteSubgroup& H, int ell_max, Ambient ambient) {
  std::vector<int> out;
  if (ambient == Ambient::U1) {
    if (H.family != GroupFamily::Cyclic) {
      throw std::invalid_argument("reciprocal_space: U(1) ambient requires a cyclic subgroup");
    }
    for (int ell = 0; ell <= ell_max; ++ell) {
      if (ell % H.n == 0) out.push_back(ell);
    }
    return out;
  }
  const IrrepTable t = irrep_table(H);
  for (int ell = 0; ell <= ell_max; ++ell) {
    if (branch(ell, t)[t.trivial_index()] > 0) out.push_back(ell);
  }
  return out;
}

Eigen::MatrixXcd twirl_D(int ell, const FiniteSubgroup& K) {
  const int d = 2 * ell + 1;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  for (const Rotation& r : K.elements) acc += wigner_D(ell, r);
  return acc / double(K.order());
}

AdmissibleBasis admissible_basis(int ell, const FiniteSubgroup& H) {
  return admissible_basis(ell, irrep_table(H));
}

AdmissibleBasis admissible_basis(int ell, const IrrepTable& H) {
  const FiniteSubgroup& g = H.group;
  const int d = 2 * ell + 1;
  std::vector<Eigen::MatrixXcd> rep(g.order());
  for (int e = 0; e < g.order(); ++e) rep[e] = wigner_D(ell, g.elements[e]);

  AdmissibleBasis basis;

  // Already diagonal (cyclic groups about +z): keep the momentum basis.
  double max_offdiag = 0.0;
  for (const Eigen::MatrixXcd& m : rep) {
    max_offdiag = std::max(
        max_offdiag, (m - Eigen::MatrixXcd(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff());
  }
  if (max_offdiag < 1e-12) {
    basis.u = Eigen::MatrixXcd::Identity(d, d);
    for (int col = 0; col < d; ++col) {
      int which = -1;
      for (int i = 0; i < H.num_irreps() && which < 0; ++i) {
        if (H.irreps[i].dim != 1) continue;
        bool all = true;
        for (int e = 0; e < g.order() && all; ++e) {
          all = std::abs(rep[e](col, col) - H.irreps[i].matrices[e](0, 0)) < 1e-9;
        }
        if (all) which = i;
      }
      if (which < 0) throw std::logic_error("diagonal representation column matches no irrep");
      basis.block_irrep.push_back(which);
      basis.block_dims.push_back(1);
    }
    return basis;
  }

  const std::vector<int> mult = branch(ell, H);
  basis.u.resize(d, d);
  int col = 0;
  for (int lam = 0; lam < H.num_irreps(); ++lam) {
    if (mult[lam] == 0) continue;
    const int dl = H.irreps[lam].dim;
    // Projector onto the (mu = 0) row space of this irrep's copies.
    auto element_projector = [&](int mu, int nu) {
      Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
      for (int e = 0; e < g.order(); ++e) {
        p += std::conj(H.irreps[lam].matrices[e](mu, nu)) * rep[e];
      }
      return (p * double(dl) / double(g.order())).eval();
    };
    const Eigen::MatrixXcd p00 = element_projector(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p00);
    std::vector<Eigen::VectorXcd> seeds;
    for (int i = 0; i < d; ++i) {
      if (es.eigenvalues()(i) > 0.5) seeds.push_back(es.eigenvectors().col(i));
    }
    if (static_cast<int>(seeds.size()) != mult[lam]) {
      throw std::logic_error("row projector rank disagrees with branching multiplicity");
    }
    for (int copy = 0; copy < mult[lam]; ++copy) {
      for (int mu = 0; mu < dl; ++mu) {
        Eigen::VectorXcd v = element_projector(mu, 0) * seeds[copy];
        const double norm = v.norm();
        if (std::abs(norm - 1.0) > 1e-6) {
          throw std::logic_error("symmetry-adapted column failed to normalize");
        }
        basis.u.col(col++) = v / norm;
      }
      basis.block_irrep.push_back(lam);
      basis.block_dims.push_back(dl);
    }
  }
  if (col != d) throw std::logic_error("admissible basis is not complete");

  // The construction guarantees each block equals the irrep matrix itself;
  // verify both unitarity and the blockwise equality before handing it out.
  if ((basis.u.adjoint() * basis.u - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() >
      1e-9) {
    throw std::logic_error("admissible basis is not unitary");
  }
  for (int e = 0; e < g.order(); ++e) {
    const Eigen::MatrixXcd conj_rep = basis.u.adjoint() * rep[e] * basis.u;
    int off = 0;
    for (std::size_t b = 0; b < basis.block_dims.size(); ++b) {
      const int dl = basis.block_dims[b];
      if ((conj_rep.block(off, off, dl, dl) - H.irreps[basis.block_irrep[b]].matrices[e])
              .cwiseAbs()
              .maxCoeff() > 1e-8) {
        throw std::logic_error("admissible basis block does not reproduce the irrep matrix");
      }
      off += dl;
    }
    const double block_mass = [&] {
      double acc = 0.0;
      int o2 = 0;
      for (int dl : basis.block_dims) {
        acc += conj_rep.block(o2, o2, dl, dl).cwiseAbs2().sum();
        o2 += dl;
      }
      return acc;
    }();
    if (std::abs(block_mass - conj_rep.cwiseAbs2().sum()) > 1e-8) {
      throw std::logic_error("admissible basis left off-block residue");
    }
  }
  return basis;
}

}  // namespace rotorcodes
