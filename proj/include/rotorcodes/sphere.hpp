#pragma once
// Linear-rotor codes on the two-sphere: codewords as finite superpositions
// of molecular orientations v in S^2, their truncated spherical-harmonic
// expansions, rotation / parity / harmonic-kick error actions, the
// error-correction condition check (including the combined rotation + kick
// obstruction), check operators for the cyclic and tetrahedral families,
// group twirls of spherical harmonics, spherical-design tests, and the
// orbit-resolved partial Fourier basis with its recovery channel.
//
// Two state representations are used side by side, mirroring the rigid-rotor
// module:
//   * PointState          -- a finite list of (point, amplitude) pairs with
//                            counting (Kronecker) normalization
//                            sum |amp|^2 = 1.  Inner products match points up
//                            to chordal distance kPointMatchTol; unmatched
//                            points contribute zero.
//   * SphereMomentumState -- coefficients c^l_m over the momentum basis
//                            |l,m> = Int dv Y^l_m(v) |v>, truncated at
//                            l <= L_max.
// Conventions: Y^l_m(theta,phi) = sqrt((2l+1)/4pi) e^{i m phi} d^l_{m0}(theta)
// (Condon-Shortley, matching wigner.hpp); a rotation maps |v> to |Rv> and
// contracts conj(D^l) on the momentum index; parity maps |v> to |-v> and
// multiplies the l-block by (-1)^l.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotorcodes/irreps.hpp"
#include "rotorcodes/molecular.hpp"
#include "rotorcodes/rotation.hpp"
#include "rotorcodes/subgroup.hpp"
#include "rotorcodes/wigner.hpp"

namespace rotorcodes {

// ---------------------------------------------------------------------------
// Points and point-support states

// Point on the unit sphere in polar coordinates, theta in [0, pi] measured
// from +z, phi in (-pi, pi].  canonical() reduces any (theta, phi) pair to
// that window and pins phi = 0 at the poles.
struct SpherePoint {
  double theta = 0.0;
  double phi = 0.0;

  Vec3 to_vec() const;
  SpherePoint canonical() const;
};

SpherePoint sphere_point_from_vec(const Vec3& v);

// Chordal (3-vector) distance; two points are treated as the same support
// point when this is below kPointMatchTol.
double sphere_distance(const SpherePoint& a, const SpherePoint& b);

inline constexpr double kPointMatchTol = 1e-9;

struct PointTerm {
  SpherePoint point;
  Complex amplitude;
};

// Finite superposition of orientation states |v>.  Terms are kept pairwise
// distinct: constructors and operations merge points that coincide within
// kPointMatchTol and drop terms with negligible amplitude.
struct PointState {
  std::vector<PointTerm> terms;

  std::size_t size() const { return terms.size(); }
};

PointState make_point_state(std::vector<PointTerm> terms);
void merge_point_terms(PointState& state, double drop_tol = 1e-14);

double norm(const PointState& state);
PointState normalized(const PointState& state);

// Point-matched inner product <a|b> = sum over tolerance-matched pairs of
// conj(amp_a) * amp_b.
Complex inner(const PointState& a, const PointState& b);

PointState operator+(const PointState& a, const PointState& b);
PointState operator-(const PointState& a, const PointState& b);
PointState operator*(const Complex& scale, const PointState& state);

// Rotation |v> -> |Rv> and inversion |v> -> |-v>.  Parity squares to the
// identity and commutes with every rotation.
PointState apply_rotation(const PointState& state, const Rotation& r);
PointState apply_parity(const PointState& state);

// Harmonic kick: multiply the amplitude at point v by Y^l_m(v).  This is the
// diagonal (position-basis) action of the non-unitary operator
// Int dv |v> Y^l_m(v) <v|; its adjoint multiplies by conj(Y^l_m) =
// (-1)^m Y^l_{-m}.
PointState apply_harmonic(const PointState& state, int l, int m);
PointState apply_harmonic_adjoint(const PointState& state, int l, int m);

// ---------------------------------------------------------------------------
// Momentum states

// Coefficients over the orthonormal momentum basis, one (2l+1)-vector per
// l = 0..L_max; index m lives at m + l.
struct SphereMomentumState {
  int L_max = 0;
  std::vector<Eigen::VectorXcd> blocks;
};

SphereMomentumState zero_sphere_momentum(int L_max);
double norm(const SphereMomentumState& state);
// Blocks beyond either state's L_max count as zero.
Complex inner(const SphereMomentumState& a, const SphereMomentumState& b);

// Momentum expansion of a point state with Gaussian angular-momentum damping:
//   c^l_m = sum_v amp(v) conj(Y^l_m(v)) exp(-delta^2 l(l+1)/2).
// The result is renormalized to unit norm unless normalize = false.
// tail_mass_bound estimates the relative coefficient mass lost above L_max
// (NaN when delta = 0, where the tail is not summable).
struct SphereMomentumProjection {
  SphereMomentumState state;
  double tail_mass_bound = 0.0;
};
SphereMomentumProjection point_to_momentum(const PointState& state, int L_max,
                                           double delta,
                                           bool normalize = true);

// Suggested truncation for damping strength delta, same policy as the
// rigid-rotor module: ceil(6/delta).
int default_sphere_momentum_cutoff(double delta);

// Rotation contracts conj(D^l(R)) on the m index; parity multiplies the
// l-block by (-1)^l.  Blockwise, so L_max is unchanged.
SphereMomentumState apply_rotation(const SphereMomentumState& state,
                                   const Rotation& r);
SphereMomentumState apply_parity(const SphereMomentumState& state);

// Momentum-space harmonic kick via the product expansion
//   Y^l_m |l',m'> = sum_L sqrt((2l+1)(2l'+1)/(4pi(2L+1)))
//                   C^{L,m+m'}_{l m l' m'} C^{L0}_{l0 l'0} |L,m+m'>,
// supported on L in [|l-l'|, l+l'].  Output blocks run to L_max_out (default
// state.L_max + l, which is exact); dropped_mass reports the squared norm
// discarded above L_max_out.
struct SphereKickResult {
  SphereMomentumState state;
  double dropped_mass = 0.0;
};
SphereKickResult apply_harmonic(const SphereMomentumState& state, int l, int m,
                                int L_max_out = -1);

// ---------------------------------------------------------------------------
// Codes

// Qubit code on S^2 defined by a finite rotation subgroup H with full
// symmetry group K = H x Z2^P (P the inversion).  The two codewords are the
// uniform superpositions over the H-orbit of a seed point and over its
// antipodal image, so parity exchanges them exactly.
//
// Families:
//   * cyclic "Z N" (N odd): seed (pi/2, 0); codeword r is the uniform
//     superposition of the N equator points phi = 2 pi h/N + r pi/N.  Even N
//     is rejected: the antipode of a constituent would land on the same
//     codeword and parity could not act as the logical flip.
//   * tetrahedral "T": seed (acos(1/sqrt 3), pi/4), a cube corner; the
//     12 group elements cover the 4 vertices of a tetrahedron three times
//     each, so the orbit sum carries prefactor 1/|H| * sqrt(|orbit|) = 1/6
//     and each distinct vertex ends up with amplitude 1/2.
struct SphereCode {
  std::string family;  // "Z1", "Z3", ... or "T"
  FiniteSubgroup h;
  IrrepTable h_irreps;
  SpherePoint seed;
  std::vector<PointState> codewords;              // exactly two
  std::vector<std::vector<SpherePoint>> constituents;  // distinct points per codeword
};

// Accepts "ZN" with odd N >= 1 (e.g. "Z3") or "T".  Throws
// std::invalid_argument for even N or an unknown family name.
SphereCode build_sphere_code(const std::string& family);

// ---------------------------------------------------------------------------
// Error-correction condition check

// Harmonic kick label.
struct SphereKick {
  int l = 0;
  int m = 0;
};

// All (l, m) with l <= l_max, |m| <= l.
std::vector<SphereKick> sphere_kicks_up_to(int l_max);

// Pairwise error-correction conditions over the error set
// {identity} + {rotations} + {kicks} (+ every rotation-kick product when
// include_combined is set): for each pair (E, E') the matrix
// M_{rr'} = <r|E^dag E'|r'> must vanish off the diagonal and be
// r-independent on it.  Inner products use the counting normalization.
// Reuses the violation/report types of the rigid-rotor module.
KLReport kl_check(const SphereCode& code,
                  const std::vector<Rotation>& rotations,
                  const std::vector<SphereKick>& kicks,
                  bool include_combined = false, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Check operators

// Residual certificates for the family's check operators; state-space norms,
// all ~0 for a correctly built code.  Fields outside the family are 0.
//
// Cyclic family (H = Z_N):
//   * S_Z is the position function cos(2N phi) sin^{2N}(theta), value 1 at
//     every one of the 2N constituent points.
//   * S_X = cos((2pi/N) L_z), i.e. the average of the rotations by +-2pi/N
//     about z; eigenvalue 1 on both codewords and on the X basis.
//   * Logical X is the rotation by pi/N about z; logical Z is the harmonic
//     kick Y^N_N, which acts as (-1)^r times the scale Y^N_N(pi/2, 0); the
//     kick Y^{2N}_{2N} acts as the identity times Y^{2N}_{2N}(pi/2, 0).
//
// Tetrahedral family (H = T):
//   * S_Z(theta,phi) = (3/16)(30 cos^2 - 35 cos^4 - 5 sin^4 cos(4phi) - 3),
//     the K-symmetric quartic harmonic, value 1 at all 8 cube corners.
//   * Logical Z(theta,phi) = (3 sqrt 3/2) sin^2 cos(theta) sin(2phi), the
//     T-symmetric cubic harmonic, value +1 / -1 on the two tetrahedra.
//   * S_X^(1) = cos((2pi/(3 sqrt 3))(L_x+L_y+L_z)), the averaged rotation by
//     +-2pi/3 about the seed diagonal; S_X^(2) = (-1)^{L_z}, the rotation by
//     pi about z.  Both fix the codewords.
struct SphereCheckCertificate {
  std::string family;
  int n = 0;  // cyclic order; 0 for tetrahedral
  double sz_constituent_deviation = 0.0;  // max |S_Z(p) - 1| over constituents
  double sx_codeword_residual = 0.0;      // max_r ||S_X |r> - |r>||
  // cyclic only
  double x_basis_sx_residual = 0.0;       // S_X on (|0> +- |1>)/sqrt 2
  double logical_x_residual = 0.0;        // ||X |0> - |1>|| and ||X |1> - |0>||
  double logical_z_residual = 0.0;        // Y^N_N vs (-1)^r Y^N_N(pi/2,0)
  double identity_kick_residual = 0.0;    // Y^{2N}_{2N} vs Y^{2N}_{2N}(pi/2,0)
  // tetrahedral only
  double logical_z_constituent_deviation = 0.0;  // max |Z(p) - (+-1)|
  double sx2_codeword_residual = 0.0;            // (-1)^{L_z} on codewords
};

SphereCheckCertificate check_operators(const SphereCode& code);

// Value of the family's Z-type check function at a point (the cyclic
// cos(2N phi) sin^{2N} theta or the tetrahedral quartic), and of the
// tetrahedral logical-Z cubic.  Exposed for tests and reports.
double check_function_value(const SphereCode& code, const SpherePoint& p);
double tetrahedral_logical_z_value(const SpherePoint& p);

// ---------------------------------------------------------------------------
// Twirled harmonics

// Group average (1/|K|) sum_k r_k Yhat^l_m r_k^dag over the rotation group H,
// optionally extended by the inversion to K = H x Z2^P (parity contributes a
// factor (-1)^l, so odd-l twirls over H x Z2^P vanish identically).  Returns
// the coefficient vector over {Y^l_p}, index p + l:
//   coeff_p = (1/|K|) sum_k (+-1)^l conj(D^l_{pm}(k)).
// The zero vector signals that l admits no K-symmetric harmonic reachable
// from Y^l_m.
Eigen::VectorXcd twirl_harmonic(int l, int m, const FiniteSubgroup& h,
                                bool include_parity);

// Evaluate sum_p coeff(p + l) Y^l_p at a point.
Complex harmonic_sum_value(const Eigen::VectorXcd& coeff, int l,
                           const SpherePoint& p);

// ---------------------------------------------------------------------------
// Spherical designs

// An L-design averages every harmonic of degree 1..L to zero:
//   (1/|P|) sum_p Y^l_m(p) = delta_{l0} delta_{m0} / sqrt(4pi),  l <= L,
// stated with the normalized (unit-mass) measure on the sphere -- the
// uniform-measure integral of Y^l_m divided by the total area 4pi.
// residual_by_l[l] records max_m |(1/|P|) sum_p Y^l_m(p)| for l = 0..L
// (entry 0 holds the deviation of the mean from 1/sqrt(4pi)).
struct DesignReport {
  int L = 0;
  bool is_design = false;
  int first_violation_l = -1;  // smallest violating l in 1..L, -1 if none
  std::vector<double> residual_by_l;
  double tolerance = 0.0;
};

DesignReport is_spherical_design(const std::vector<SpherePoint>& points, int L,
                                 double tol = 1e-9);

// ---------------------------------------------------------------------------
// Partial Fourier basis and recovery

// Orbit-resolved Fourier basis state over the H-orbit of a seed point:
//   |coset, seed; lambda,mu,nu> = (sqrt(d_lambda |orbit|)/|H|)
//                                 sum_{h in H} zeta^lambda_{mu,nu}(h) |h seed>
// with the coset-1 branch obtained by applying the inversion to every point
// (phases attached to the same group labels).  |orbit| counts the distinct
// points {h seed}; for a free orbit the prefactor is sqrt(d_lambda/|H|) and
// the states for all (coset, lambda, mu, nu) are orthonormal.  Seeds with a
// nontrivial stabilizer support fewer states: combinations killed by the
// stabilizer average have zero norm and are rejected.  In particular the
// cyclic-family cone points theta in {0, pi} keep only lambda = 0, where the
// state is the bare pole point.
// Throws std::invalid_argument for an out-of-range label or a zero-norm
// combination.
PointState s2_partial_fourier(const SphereCode& code, const SpherePoint& seed,
                              int coset, int irrep, int mu = 0, int nu = 0);

// Recovery channel for the cyclic family: project onto the (orbit, lambda)
// sectors of the partial Fourier basis and map each two-dimensional
// {coset 0, coset 1} subspace isometrically onto {|0>, |1>}; the cone points
// are sent to (|0> + |1>)/sqrt 2.  The result is the branch decomposition of
// the channel output on a pure input: probabilities sum to the input norm.
// Branches with probability <= 1e-15 are dropped.  Throws
// std::invalid_argument for the tetrahedral family, whose special-orbit
// isometries are not part of this channel.
struct SphereRecoveryBranch {
  SpherePoint seed;        // orbit anchor in the fundamental lune
  int lambda = 0;
  bool cone = false;       // pole branch: seed is a cone point, lambda 0
  double probability = 0.0;
  PointState post;         // normalized state in the code space
};

struct SphereRecoveryOutcome {
  std::vector<SphereRecoveryBranch> branches;
};

SphereRecoveryOutcome apply_sphere_recovery(const SphereCode& code,
                                            const PointState& state);

// Fundamental-lune reduction behind the cyclic recovery: the orbit seed
// carries the point's own latitude and its longitude reduced modulo 2pi/N
// into (-pi/2N, pi/2N] when that window contains it (coset 0), else the
// antipodal-branch seed (pi - theta, longitude - pi/N reduced) with coset 1.
// h is the Z_N label connecting the seed branch to the point.
struct LuneDecomposition {
  SpherePoint seed;
  int coset = 0;
  int h = 0;
  bool cone = false;
};

LuneDecomposition snap_to_lune(const SpherePoint& p, int n);

}  // namespace rotorcodes
