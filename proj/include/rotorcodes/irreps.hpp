#pragma once
// Irreducible representations of the finite rotation subgroups: tables of
// irrep matrices and characters, branching of SO(3) angular momenta into
// subgroup irreps, restriction between nested subgroups, classification of
// momentum kicks (correctable / detectable-only / undetectable), reciprocal
// spaces, group twirls of Wigner matrices, and symmetry-adapted bases that
// block-diagonalize D^l over a subgroup.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotorcodes/subgroup.hpp"
#include "rotorcodes/wigner.hpp"

namespace rotorcodes {

// One irreducible representation: a unitary matrix per group element (indexed
// like FiniteSubgroup::elements, so matrices[0] is the identity).
struct Irrep {
  std::string label;
  int dim = 1;
  std::vector<Eigen::MatrixXcd> matrices;

  const Eigen::MatrixXcd& matrix(int element) const { return matrices[element]; }
};

// Complete irrep table of one finite subgroup.
//
// Labels follow the convention: Z_N irreps are "0".."N-1" with
// zeta^lambda(r^h) = exp(i 2 pi lambda h / N); D_N has "1" (trivial),
// "1'" (flips -> -1), for even N also "1+" / "1-" (rotation r -> -1, the
// reflection R_{2pi/N, pi, 0} -> +/-1), and two-dimensional irreps labelled
// "2" when unique (N = 3) or "2_1".."2_k" otherwise, with
// zeta^{2_k}(r^j) = diag(e^{i 2 pi k j/N}, e^{-i 2 pi k j/N}) and the flip
// about +x represented by [[0,1],[1,0]]; T has {1, 1', 1'', 3}; O has
// {1, 1', 2, 3, 3'}; I has {1, 3, 3', 4, 5}.  The trivial irrep is always
// entry 0.  For T, O, I the matrices are produced numerically (deterministic
// seed) and only the characters are part of the stable interface.
struct IrrepTable {
  FiniteSubgroup group;
  std::vector<Irrep> irreps;
  // characters(i, c): trace of irrep i on conjugacy class c of `group`.
  Eigen::MatrixXcd characters;

  int num_irreps() const { return static_cast<int>(irreps.size()); }
  // Index of the irrep with this label; throws std::invalid_argument if absent.
  int index_of(const std::string& label) const;
  // Character of irrep i on a group element (via its conjugacy class).
  Complex character(int irrep, int element) const {
    return characters(irrep, group.class_of[element]);
  }
  int trivial_index() const { return 0; }
};

// Build the irrep table of H.  Supported: Z_N, D_N (N >= 2), T, O, I.
IrrepTable irrep_table(const FiniteSubgroup& H);

// Multiplicity of each K-irrep (in table order) inside the restriction of the
// SO(3) irrep D^l to K, computed through the character inner product
// (1/|K|) sum_k chi_l(omega_k) conj(chi_kappa(k)).  Throws std::logic_error
// if an inner product misses an integer by more than 1e-9.
std::vector<int> branch(int ell, const IrrepTable& K);
std::vector<int> branch(int ell, const FiniteSubgroup& K);

// "1 + 2*2'" style rendering of multiplicities against a table's labels,
// e.g. "1' + 2_1 + 2_2"; multiplicities > 1 shown as "2*3".
std::string format_branch(const IrrepTable& table, const std::vector<int>& mult);

// restriction(i, j): multiplicity of H-irrep j inside K-irrep i restricted to
// the subgroup H of K.  Both tables must belong to groups with H contained in
// K (element-wise); throws std::invalid_argument otherwise.
Eigen::MatrixXi restriction_table(const IrrepTable& K, const IrrepTable& H);

// Two-step branching D^l -> K-irreps -> H-irreps with all multiplicities.
struct BranchReport {
  int ell = 0;
  std::string k_name;
  std::string h_name;
  std::vector<std::string> k_labels;
  std::vector<std::string> h_labels;
  std::vector<int> mult_k;                 // per K-irrep
  Eigen::MatrixXi restriction;             // K-irrep x H-irrep
  std::vector<int> mult_h;                 // aggregated per H-irrep
};
BranchReport branch_report(int ell, const FiniteSubgroup& K, const FiniteSubgroup& H);

// Per-angular-momentum verdict for the code defined by H inside K.
//
// Undetectable: some nontrivial K-irrep in branch(l, K) restricts onto the
// trivial H-irrep.  Correctable: the whole prefix {0..l} is simultaneously
// correctable — no undetectable l' <= l, and no nontrivial H-irrep reached
// through two distinct K-irreps anywhere in the prefix.  Everything else is
// DetectableOnly.  Verdicts for l are therefore exact (independent of
// ell_max); the bound only selects how far the table extends.
enum class KickVerdict { Correctable, DetectableOnly, Undetectable };

struct KickClassification {
  std::vector<KickVerdict> verdict;   // index l = 0..ell_max
  std::vector<std::string> detail;    // human-readable reason per l
};
KickClassification classify_kicks(const FiniteSubgroup& H, const FiniteSubgroup& K,
                                  int ell_max);

const char* to_string(KickVerdict v);

// Ambient group for reciprocal-space queries: subgroups of the full rotation
// group branch through chi_l, while Z_N viewed inside the planar rotation
// group U(1) has the closed-form reciprocal lattice N*Z.
enum class Ambient { SO3, U1 };

// All l <= ell_max whose branching to H contains the trivial irrep, i.e. the
// momenta on which the H-twirl projector is nonzero.  Ambient::U1 requires a
// cyclic H and returns the multiples of N.
std::vector<int> reciprocal_space(const FiniteSubgroup& H, int ell_max,
                                  Ambient ambient = Ambient::SO3);

// Group average (1/|K|) sum_k D^l(k): the orthogonal projector onto the
// trivial-irrep subspace of D^l restricted to K.
Eigen::MatrixXcd twirl_D(int ell, const FiniteSubgroup& K);

// Symmetry-adapted basis: U.adjoint() * D^l(h) * U is block-diagonal for
// every h in H, blocks grouped by irrep in table order, one block per copy,
// and each block equals the table's irrep matrix zeta^lambda(h) exactly.
struct AdmissibleBasis {
  Eigen::MatrixXcd u;                 // unitary, (2l+1) x (2l+1)
  std::vector<int> block_irrep;       // irrep index per block
  std::vector<int> block_dims;        // dimension per block (sums to 2l+1)
};
// When every D^l(h) is already diagonal (cyclic H about +z), returns the
// identity basis unchanged.
AdmissibleBasis admissible_basis(int ell, const FiniteSubgroup& H);
AdmissibleBasis admissible_basis(int ell, const IrrepTable& H);

}  // namespace rotorcodes
