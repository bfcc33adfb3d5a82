#include "rotorcodes/subgroup.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotorcodes {

namespace {

// True if a's canonical components are lexicographically greater than b's,
// treating components within tol as equal.
bool lex_greater_tol(const Rotation& a, const Rotation& b, double tol) {
  const double d[4] = {a.w() - b.w(), a.x() - b.x(), a.y() - b.y(),
                       a.z() - b.z()};
  for (double v : d) {
    if (v > tol) return true;
    if (v < -tol) return false;
  }
  return false;
}

std::vector<Rotation> closure_from(const std::vector<Rotation>& gens,
                                   int expected_order) {
  std::vector<Rotation> elems{Rotation::identity()};
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < elems.size(); ++i) {
      for (const Rotation& g : gens) {
        const Rotation p = elems[i] * g;
        bool found = false;
        for (const Rotation& e : elems) {
          if (Rotation::approx_equal(p, e)) {
            found = true;
            break;
          }
        }
        if (!found) {
          elems.push_back(p);
          grew = true;
          if (static_cast<int>(elems.size()) > expected_order) {
            throw std::logic_error("subgroup closure exceeded expected order");
          }
        }
      }
    }
  }
  if (static_cast<int>(elems.size()) != expected_order) {
    throw std::logic_error("subgroup closure produced wrong order");
  }
  return elems;
}

// Deterministic element order: rotation angle ascending, lexicographically
// largest canonical quaternion first on angle ties.  Puts the identity first.
void canonical_sort(std::vector<Rotation>& elems) {
  std::sort(elems.begin(), elems.end(), [](const Rotation& a, const Rotation& b) {
    const double aa = a.angle(), ab = b.angle();
    if (std::abs(aa - ab) > 1e-12) return aa < ab;
    return lex_greater_tol(a, b, 1e-12);
  });
}

const Vec3 kXAxis{1.0, 0.0, 0.0};
const Vec3 kZAxis{0.0, 0.0, 1.0};
const Vec3 kDiagonals[4] = {
    {1.0, 1.0, 1.0}, {1.0, -1.0, -1.0}, {-1.0, 1.0, -1.0}, {-1.0, -1.0, 1.0}};

std::vector<Rotation> tetrahedral_elements() {
  std::vector<Rotation> elems;
  elems.push_back(Rotation::identity());
  elems.push_back(Rotation::from_axis_angle({1, 0, 0}, kPi));
  elems.push_back(Rotation::from_axis_angle({0, 1, 0}, kPi));
  elems.push_back(Rotation::from_axis_angle({0, 0, 1}, kPi));
  for (const Vec3& d : kDiagonals) {
    elems.push_back(Rotation::from_axis_angle(d, 2.0 * kPi / 3.0));
    elems.push_back(Rotation::from_axis_angle(d, 4.0 * kPi / 3.0));
  }
  return elems;
}

std::vector<Rotation> octahedral_elements() {
  std::vector<Rotation> elems = tetrahedral_elements();
  const Vec3 faces[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (const Vec3& f : faces) {
    elems.push_back(Rotation::from_axis_angle(f, kPi / 2.0));
    elems.push_back(Rotation::from_axis_angle(f, 3.0 * kPi / 2.0));
  }
  const Vec3 edges[6] = {{1, 1, 0}, {1, -1, 0}, {1, 0, 1},
                         {1, 0, -1}, {0, 1, 1}, {0, 1, -1}};
  for (const Vec3& e : edges) {
    elems.push_back(Rotation::from_axis_angle(e, kPi));
  }
  return elems;
}

void finalize_structure(FiniteSubgroup& g) {
  const int n = g.order();
  if (n == 0 || !Rotation::approx_equal(g.elements[0], Rotation::identity())) {
    throw std::logic_error("subgroup element list must start with the identity");
  }
  g.mult.assign(n, std::vector<int>(n, -1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int k = g.find(g.elements[i] * g.elements[j]);
      if (k < 0) throw std::logic_error("subgroup not closed under products");
      g.mult[i][j] = k;
    }
  }
  g.inverse.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g.mult[i][j] == 0) {
        g.inverse[i] = j;
        break;
      }
    }
    if (g.inverse[i] < 0) throw std::logic_error("subgroup element lacks inverse");
  }
  // Conjugacy classes, ordered by their smallest member index.
  g.class_of.assign(n, -1);
  g.classes.clear();
  for (int i = 0; i < n; ++i) {
    if (g.class_of[i] >= 0) continue;
    const int cls = static_cast<int>(g.classes.size());
    for (int k = 0; k < n; ++k) {
      g.class_of[g.mult[g.mult[k][i]][g.inverse[k]]] = cls;
    }
    std::vector<int> members;
    for (int j = 0; j < n; ++j) {
      if (g.class_of[j] == cls) members.push_back(j);
    }
    g.classes.push_back(std::move(members));
  }
}

}  // namespace

int FiniteSubgroup::find(const Rotation& r, double tol) const {
  for (int i = 0; i < order(); ++i) {
    if (Rotation::approx_equal(elements[i], r, tol)) return i;
  }
  return -1;
}

bool FiniteSubgroup::contains_subgroup(const FiniteSubgroup& sub,
                                       double tol) const {
  for (const Rotation& e : sub.elements) {
    if (!contains(e, tol)) return false;
  }
  return true;
}

FiniteSubgroup build_subgroup(GroupFamily family, int n) {
  FiniteSubgroup g;
  g.family = family;
  switch (family) {
    case GroupFamily::Cyclic: {
      if (n < 1) throw std::invalid_argument("Z_N requires N >= 1");
      g.n = n;
      g.name = "Z" + std::to_string(n);
      for (int k = 0; k < n; ++k) {
        g.elements.push_back(Rotation::from_axis_angle(kZAxis, 2.0 * kPi * k / n));
      }
      if (n > 1) {
        g.generators = {Rotation::from_axis_angle(kZAxis, 2.0 * kPi / n)};
      }
      break;
    }
    case GroupFamily::Dihedral: {
      if (n < 1) throw std::invalid_argument("D_N requires N >= 1");
      g.n = n;
      g.name = "D" + std::to_string(n);
      for (int k = 0; k < n; ++k) {
        g.elements.push_back(Rotation::from_axis_angle(kZAxis, 2.0 * kPi * k / n));
      }
      for (int h = 0; h < n; ++h) {
        const double phi = kPi * h / n;
        g.elements.push_back(Rotation::from_axis_angle(
            {std::cos(phi), std::sin(phi), 0.0}, kPi));
      }
      g.generators = {Rotation::from_axis_angle(kZAxis, 2.0 * kPi / n),
                      Rotation::from_axis_angle(kXAxis, kPi)};
      break;
    }
    case GroupFamily::Tetrahedral: {
      g.n = 0;
      g.name = "T";
      g.elements = tetrahedral_elements();
      g.generators = {
          Rotation::from_axis_angle(kDiagonals[0], 2.0 * kPi / 3.0),
          Rotation::from_axis_angle(kZAxis, kPi)};
      break;
    }
    case GroupFamily::Octahedral: {
      g.n = 0;
      g.name = "O";
      g.elements = octahedral_elements();
      g.generators = {
          Rotation::from_axis_angle(kZAxis, kPi / 2.0),
          Rotation::from_axis_angle(kDiagonals[0], 2.0 * kPi / 3.0)};
      break;
    }
    case GroupFamily::Icosahedral: {
      g.n = 0;
      g.name = "I";
      // Orientation: two-fold axes on the coordinate axes (so the
      // tetrahedral group above is a subgroup) and a five-fold axis through
      // the icosahedron vertex (0, 1, phi) with phi the golden ratio.
      const double phi = 0.5 * (1.0 + std::sqrt(5.0));
      g.generators = {
          Rotation::from_axis_angle(kZAxis, kPi),
          Rotation::from_axis_angle(kDiagonals[0], 2.0 * kPi / 3.0),
          Rotation::from_axis_angle({0.0, 1.0, phi}, 2.0 * kPi / 5.0)};
      g.elements = closure_from(g.generators, 60);
      canonical_sort(g.elements);
      break;
    }
  }
  finalize_structure(g);
  return g;
}

FiniteSubgroup build_subgroup(const std::string& name) {
  if (name == "T") return build_subgroup(GroupFamily::Tetrahedral);
  if (name == "O") return build_subgroup(GroupFamily::Octahedral);
  if (name == "I") return build_subgroup(GroupFamily::Icosahedral);
  if (name.size() >= 2 && (name[0] == 'Z' || name[0] == 'D')) {
    int n = 0;
    try {
      std::size_t pos = 0;
      n = std::stoi(name.substr(1), &pos);
      if (pos != name.size() - 1) n = 0;
    } catch (const std::exception&) {
      n = 0;
    }
    if (n >= 1) {
      return build_subgroup(
          name[0] == 'Z' ? GroupFamily::Cyclic : GroupFamily::Dihedral, n);
    }
  }
  throw std::invalid_argument("unknown subgroup name: " + name);
}

CosetTable cosets(const FiniteSubgroup& K, const FiniteSubgroup& H,
                  double tol) {
  CosetTable t;
  t.h_index_in_k.resize(H.order());
  for (int j = 0; j < H.order(); ++j) {
    const int idx = K.find(H.elements[j], tol);
    if (idx < 0) {
      throw std::invalid_argument(H.name + " is not a subgroup of " + K.name);
    }
    t.h_index_in_k[j] = idx;
  }
  t.coset_of.assign(K.order(), -1);
  for (int i = 0; i < K.order(); ++i) {
    if (t.coset_of[i] >= 0) continue;
    const int cid = t.count();
    std::vector<int> members;
    for (int j = 0; j < H.order(); ++j) {
      members.push_back(K.mult[i][t.h_index_in_k[j]]);
    }
    std::sort(members.begin(), members.end());
    int best = members[0];
    for (int m : members) {
      t.coset_of[m] = cid;
      const double am = K.elements[m].angle();
      const double ab = K.elements[best].angle();
      if (am < ab - tol ||
          (am <= ab + tol && lex_greater_tol(K.elements[m], K.elements[best], tol))) {
        best = m;
      }
    }
    t.rep.push_back(best);
    t.representatives.push_back(K.elements[best]);
    t.members.push_back(std::move(members));
  }
  return t;
}

OrbitSnap snap_to_orbit(const Rotation& r, const FiniteSubgroup& k,
                        double tie_tol) {
  std::vector<Rotation> cand;
  std::vector<double> ang;
  cand.reserve(k.order());
  double amin = 4.0 * kPi;
  for (int j = 0; j < k.order(); ++j) {
    cand.push_back(r * k.elements[j]);
    ang.push_back(cand.back().angle());
    amin = std::min(amin, ang.back());
  }
  int best = -1;
  int near_ties = 0;
  for (int j = 0; j < k.order(); ++j) {
    if (ang[j] > amin + tie_tol) continue;
    ++near_ties;
    if (best < 0 || lex_greater_tol(cand[j], cand[best], tie_tol)) best = j;
  }
  OrbitSnap snap;
  snap.coset_part = cand[best];
  snap.compensator_index = k.inverse[best];
  snap.compensator = k.elements[snap.compensator_index];
  snap.boundary_tie = near_ties > 1;
  return snap;
}

bool in_fundamental_cell(const Rotation& r, const FiniteSubgroup& h) {
  return snap_to_orbit(r, h).compensator_index == 0;
}

double omega_max(double theta, int m) {
  if (m < 1) throw std::invalid_argument("omega_max requires subgroup order >= 1");
  const double c = std::abs(std::cos(theta));
  if (c < 1e-300) return kPi;
  return 2.0 * std::atan(std::tan(kPi / (2.0 * m)) / c);
}

}  // namespace rotorcodes
