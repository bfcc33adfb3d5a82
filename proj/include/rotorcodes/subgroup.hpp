#pragma once
// Finite rotation subgroups of SO(3) (cyclic, dihedral, tetrahedral,
// octahedral, icosahedral), their group structure (multiplication table,
// inverses, conjugacy classes), coset decompositions, and the Voronoi
// fundamental cell of SO(3) modulo a subgroup.

#include <string>
#include <vector>

#include "rotorcodes/rotation.hpp"

namespace rotorcodes {

enum class GroupFamily { Cyclic, Dihedral, Tetrahedral, Octahedral, Icosahedral };

struct FiniteSubgroup {
  GroupFamily family = GroupFamily::Cyclic;
  int n = 1;                 // order parameter for Z_N / D_N; unused otherwise
  std::string name;          // "Z3", "D6", "T", "O", "I"
  std::vector<Rotation> elements;          // element 0 is the identity
  std::vector<Rotation> generators;
  std::vector<std::vector<int>> mult;      // mult[i][j]: index of e_i * e_j
  std::vector<int> inverse;                // inverse[i]: index of e_i^{-1}
  std::vector<int> class_of;               // conjugacy class index per element
  std::vector<std::vector<int>> classes;   // class index -> member indices

  int order() const { return static_cast<int>(elements.size()); }

  // Index of a rotation in `elements`, or -1 if absent (tolerance match).
  int find(const Rotation& r, double tol = kMatchTol) const;
  bool contains(const Rotation& r, double tol = kMatchTol) const {
    return find(r, tol) >= 0;
  }
  // True if every element of `sub` appears in this group.
  bool contains_subgroup(const FiniteSubgroup& sub, double tol = kMatchTol) const;
};

// Build a named subgroup.  Accepted names: "Z<N>" (N >= 1), "D<N>" (N >= 2),
// "T", "O", "I".  Conventions: Z_N and the rotation part of D_N are about +z;
// the D_N half-turn axes lie in the x-y plane starting at +x (axis h at angle
// pi*h/N from +x).  T has its two-fold axes on the coordinate axes and its
// four three-fold axes on the body diagonals (generators R_{2pi/3,(1,1,1)/sqrt3}
// and R_{pi,z}); O extends T by the face quarter-turns; I contains T in the
// same orientation (two-fold axes on the coordinate axes).
FiniteSubgroup build_subgroup(const std::string& name);
FiniteSubgroup build_subgroup(GroupFamily family, int n = 0);

struct CosetTable {
  // Left cosets rH of H in K.  Coset 0 is H itself (represented by the
  // identity); each representative is the member of its coset with minimal
  // rotation angle, lexicographically largest canonical quaternion on ties.
  std::vector<Rotation> representatives;
  std::vector<int> rep;                    // rep[i]: index into K.elements
  std::vector<std::vector<int>> members;   // members[i]: element indices of coset i
  std::vector<int> coset_of;               // K element index -> coset index
  std::vector<int> h_index_in_k;           // H element index -> K element index

  int count() const { return static_cast<int>(representatives.size()); }
};

// Decompose K into left cosets of H (requires H to be a subgroup of K).
CosetTable cosets(const FiniteSubgroup& K, const FiniteSubgroup& H,
                  double tol = kMatchTol);

// Voronoi fundamental cell of SO(3) relative to the orbit of a finite
// subgroup H: R lies in the cell when it is at least as close to the
// identity as to every h in H (rotation angle of R no larger than that of
// any R*h).  Exact ties on the cell boundary are resolved deterministically:
// among the orbit {R h : h in H} the member with minimal rotation angle and,
// on angle ties, lexicographically largest canonical quaternion is the
// unique cell representative, so the translated cells partition SO(3).  For
// H = Z_M about +z this reproduces the half-open angle window
// (-pi/M, pi/M].
bool in_fundamental_cell(const Rotation& r, const FiniteSubgroup& h);

struct OrbitSnap {
  Rotation coset_part;    // canonical cell representative of the orbit R*K
  Rotation compensator;   // element of K with R = coset_part * compensator
  int compensator_index;  // index of the compensator in K.elements
  bool boundary_tie;      // a competing orbit member was within tolerance
};

// Snap R onto the fundamental-cell representative of its right K-orbit.
OrbitSnap snap_to_orbit(const Rotation& r, const FiniteSubgroup& k,
                        double tie_tol = kMatchTol);

// Opening angle of the fundamental cell of Z_M (about +z) in the direction
// making polar angle theta with +z:  |2 acot(cos(theta) cot(pi / (2 M)))|.
// Equals pi/M at theta = 0 and pi at theta = pi/2; symmetric under
// theta -> pi - theta.
double omega_max(double theta, int m);

}  // namespace rotorcodes
