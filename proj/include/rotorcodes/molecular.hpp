#pragma once
// Rigid-rotor codes on SO(3): codewords as finite superpositions of
// orientations, their truncated angular-momentum expansions, rotation and
// momentum-kick error channels, error-correction condition checks, position
// and momentum-syndrome recovery, damped (normalizable) codeword
// asymptotics, and the spin-coherent ancilla readout.
//
// Two state representations are used side by side:
//   * FrameState   -- a finite list of (orientation, amplitude) pairs with
//                     counting (Kronecker) normalization sum |amp|^2 = 1.
//                     Inner products match points up to quaternion distance
//                     kMatchTol; unmatched points contribute zero.
//   * MomentumState -- coefficients c^l_{mn} over the momentum basis
//                     |l;mn> = sqrt((2l+1)/8pi^2) Int dR D^l_{mn}(R) |R>,
//                     truncated at l <= L_max.
// Conversions and all identities follow the convention pinned in
// wigner.hpp: z-rotations act diagonally on the m index, an active rotation
// maps |R> to |SR>, and a passive rotation maps |R> to |R S^{-1}>.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotorcodes/irreps.hpp"
#include "rotorcodes/rotation.hpp"
#include "rotorcodes/subgroup.hpp"
#include "rotorcodes/wigner.hpp"

namespace rotorcodes {

// ---------------------------------------------------------------------------
// Frame (orientation) states

struct FrameTerm {
  Rotation rotation;
  Complex amplitude;
};

// Finite superposition of orientation states.  Terms are kept pairwise
// distinct: constructors and operations merge rotations that coincide within
// kMatchTol and drop terms with negligible amplitude.
struct FrameState {
  std::vector<FrameTerm> terms;

  std::size_t size() const { return terms.size(); }
};

// Build a state from (rotation, amplitude) pairs, merging duplicates.
FrameState make_frame_state(std::vector<FrameTerm> terms);

// Merge tolerance-equal rotations (summing amplitudes) and drop terms with
// |amplitude| <= drop_tol.  Order of first appearance is preserved.
void merge_frame_terms(FrameState& state, double drop_tol = 1e-14);

double norm(const FrameState& state);
FrameState normalized(const FrameState& state);

// Point-matched inner product <a|b> = sum over tolerance-matched pairs of
// conj(amp_a) * amp_b.
Complex inner(const FrameState& a, const FrameState& b);

FrameState operator+(const FrameState& a, const FrameState& b);
FrameState operator-(const FrameState& a, const FrameState& b);
FrameState operator*(const Complex& scale, const FrameState& state);

// Active rotations compose on the left (|R> -> |SR>); passive rotations act
// in the body frame and compose on the right inverse (|R> -> |R S^{-1}>).
enum class RotationSide { Active, Passive };

FrameState apply_rotation(const FrameState& state, const Rotation& s,
                          RotationSide side);

// Momentum kick: multiply the amplitude at orientation g by D^l_{mn}(g).
// This is the diagonal (position-basis) action of the non-unitary operator
// Int dR |R> D^l_{mn}(R) <R|; its adjoint is the kick by conj(D^l_{mn}).
FrameState apply_kick(const FrameState& state, int l, int m, int n);
FrameState apply_kick_adjoint(const FrameState& state, int l, int m, int n);

// ---------------------------------------------------------------------------
// Momentum states

// Coefficients over the orthonormal momentum basis, one dense
// (2l+1) x (2l+1) block per l = 0..L_max; index (m, n) lives at (m+l, n+l).
struct MomentumState {
  int L_max = 0;
  std::vector<Eigen::MatrixXcd> blocks;
};

MomentumState zero_momentum_state(int L_max);
double norm(const MomentumState& state);
// Blocks beyond either state's L_max count as zero.
Complex inner(const MomentumState& a, const MomentumState& b);

// Momentum expansion of a frame state with Gaussian angular-momentum damping:
//   c^l_{mn} = sqrt((2l+1)/8pi^2) sum_g amp(g) conj(D^l_{mn}(g))
//              * exp(-delta^2 l(l+1)/2).
// The result is renormalized to unit norm unless normalize = false.
// tail_mass_bound estimates the relative coefficient mass lost above L_max
// (NaN when delta = 0, where the tail is not summable).
struct MomentumProjection {
  MomentumState state;
  double tail_mass_bound = 0.0;
};
MomentumProjection frame_to_momentum(const FrameState& state, int L_max,
                                     double delta, bool normalize = true);

// Suggested truncation for damping strength delta: ceil(6/delta) captures
// all but < 1e-4 relative coefficient mass for the states used here.
int default_momentum_cutoff(double delta);

// Active rotation contracts conj(D^l(S)) on the m index; passive rotation
// contracts D^l(S) on the n index.  Blockwise, so L_max is unchanged.
MomentumState apply_rotation(const MomentumState& state, const Rotation& s,
                             RotationSide side);

// Momentum-space kick via the product expansion
//   D^l_{mn} |l';m'n'> = sum_L sqrt((2l'+1)/(2L+1))
//                        C^{L,m+m'}_{l m l' m'} C^{L,n+n'}_{l n l' n'} |L;..>.
// Output blocks run to L_max_out (default state.L_max + l, which is exact);
// dropped_mass reports the squared norm discarded above L_max_out.
struct MomentumKickResult {
  MomentumState state;
  double dropped_mass = 0.0;
};
MomentumKickResult apply_kick(const MomentumState& state, int l, int m, int n,
                              int L_max_out = -1);

// ---------------------------------------------------------------------------
// Codes

// Code defined by nested finite subgroups H subset K of SO(3).  Codeword r is
// the uniform superposition over the r-th left coset of H in K,
//   |r> = (1/sqrt|H|) sum_{h in H} |rep_r h>,
// with coset 0 = H itself, so the code dimension is |K|/|H|.
struct MolecularCode {
  FiniteSubgroup h;
  FiniteSubgroup k;
  CosetTable coset_table;  // cosets of H in K; representative order = codeword order
  int dim = 0;
  std::vector<FrameState> codewords;
  IrrepTable h_irreps;     // irreps of H, used for partial-Fourier labels
};

// Throws std::invalid_argument unless H is a subgroup of K.
MolecularCode build_molecular_code(const FiniteSubgroup& h,
                                   const FiniteSubgroup& k);

// Partial-Fourier (coset x H-irrep) basis state
//   |S H; lambda,mu,nu> = sqrt(d_lambda/|H|) sum_h zeta^lambda_{mu,nu}(h) |S h>
// built from the stored H-irrep matrices.
FrameState zak_state(const MolecularCode& code, const Rotation& s, int irrep,
                     int mu, int nu);

// Coefficients of `state` in the partial-Fourier basis over the single coset
// anchored at S: result[lambda](mu, nu) = <S H; lambda,mu,nu | state>.
std::vector<Eigen::MatrixXcd> zak_coefficients(const MolecularCode& code,
                                               const Rotation& s,
                                               const FrameState& state);

// ---------------------------------------------------------------------------
// Error-correction condition check

struct KickIndex {
  int l = 0, m = 0, n = 0;
};

// All kick indices (l, m, n) with l <= l_max, |m| <= l, |n| <= l, in
// lexicographic order.
std::vector<KickIndex> kicks_up_to(int l_max);

struct KLViolation {
  std::string error_a;   // human-readable operator labels
  std::string error_b;
  int row = 0, col = 0;  // codeword indices r, r'
  std::string condition; // "off-diagonal" (must vanish) or "diagonal"
                         // (must be r-independent)
  double magnitude = 0.0;
};

struct KLReport {
  bool passed = true;
  double tolerance = 0.0;
  int pairs_checked = 0;
  std::vector<KLViolation> violations;
};

// Pairwise error-correction conditions over the error set
// {identity} + {active rotations} + {kicks}: for every pair (E, E') the
// matrix M_{rr'} = <r|E^dag E'|r'> must vanish off the diagonal and be
// r-independent on it.  Inner products use the counting normalization.
KLReport kl_check(const MolecularCode& code,
                  const std::vector<Rotation>& rotations,
                  const std::vector<KickIndex>& kicks, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Recovery

struct PositionDecodeResult {
  Rotation syndrome;          // estimated left-rotation error S~
  FrameState corrected;       // X_{S~}^dag applied to the input
  bool boundary_ambiguous = false;  // a support point sat on a Voronoi wall
};

// Diagnose a pure left-rotation corruption of a code-space state by snapping
// any support point onto the fundamental cell of SO(3)/K, then undo it.
// Rotations inside the cell are corrected exactly; rotations outside produce
// a logical operation.  Throws std::invalid_argument when the support is
// inconsistent with a single left rotation of the code space.
PositionDecodeResult decode_position(const FrameState& corrupted,
                                     const MolecularCode& code);

struct MomentumRecovery {
  int lambda = 0;       // syndrome in Z_N
  int m = 0;            // chosen momentum-frame shift, |m| minimal
  bool tie = false;     // N even and lambda = N/2: both +-N/2 are minimal
  std::array<int, 2> candidates{{0, 0}};
};

// Minimal-|m| representative of the syndrome lambda mod N (cyclic H = Z_N
// only).  On the even-N tie both candidates are reported and +N/2 is chosen.
MomentumRecovery decode_momentum(int lambda, const MolecularCode& code);

// Diagonal-phase recovery U_m |R_{alpha,beta,gamma}> =
// e^{-i m (alpha+gamma)} |R_{alpha,beta,gamma}>.  On z-rotations this is the
// defining action U_m |R_{omega,z}> = e^{-i m omega} |R_{omega,z}>; the
// extension off that subset is the phase of conj(D^m_{mm}), one fixed choice
// among the allowed unitary extensions (documented, not physically pinned).
FrameState apply_momentum_recovery(const FrameState& state,
                                   const MomentumRecovery& recovery);

// ---------------------------------------------------------------------------
// Check operators (cyclic Z_N in Z_2N family)

struct CheckOperatorCertificate {
  int n = 0;                      // H = Z_N
  // S_X is the passive rotation by 2pi/N about z; S_Z is the kick
  // (l, m, n) = (2N, 2N, 2N).  Residuals are state-space norms.
  double codeword_sx_residual = 0.0;     // ||S_X |r> - |r>||
  double codeword_sz_residual = 0.0;     // ||S_Z |r> - |r>||
  double zak_eigenvalue_residual = 0.0;  // S_X on |Z_N; lambda> vs e^{i 2pi lambda/N}
  double anticommutator_residual = 0.0;  // {D^N_NN-kick, passive pi/N} on random states
  double commutator_residual = 0.0;      // [S_X, S_Z] on random states
};

// Verifies the stabilizing properties of the (Z_N, Z_2N) check operators.
// Throws std::invalid_argument for non-cyclic codes or K != Z_2N.
CheckOperatorCertificate check_operators(const MolecularCode& code);

// ---------------------------------------------------------------------------
// Damped-codeword asymptotics (cyclic Z_N in Z_2N family)

struct MomentumBudget {
  double lbar_exact = 0.0;       // sqrt(<L^2 operator>) from the coefficient sum
  double lbar_asymptotic = 0.0;  // sqrt(3/(2 delta^2) - 1/4)
  double spread = 0.0;           // sqrt(<L^4>) - <L^2>, the squared-width proxy
  int l_used = 0;                // truncation actually used
};

// Momentum scale of the damped codeword exp(-delta^2 L^2/2)|r> (independent
// of r).  The weight of level l is (2l+1)(2 floor(l/N)+1) e^{-delta^2 l(l+1)}.
// Validated for delta in (0, 0.5]; any delta > 0 is accepted.
MomentumBudget avg_momentum(double delta, int n);

// Fraction of the damped-codeword position distribution with l-level at most
// l_cap (same weights as avg_momentum).
double momentum_support_fraction(double delta, int n, int l_cap);

// Damping strength whose exact momentum scale equals lbar_target (bisection
// on the monotone map delta -> lbar_exact).
double delta_for_lbar(double lbar_target, int n);

struct LeakageResult {
  double p_numeric = 0.0;     // quadrature over the wrong-parity Voronoi cells
  double p_asymptotic = 0.0;  // csc(pi/2N) (delta/sqrt(pi)) exp(-(pi/(2N delta))^2)
  double cell_mass_sum = 0.0; // all-cell quadrature total; 1 up to quadrature error
  int theta_nodes = 0;
  int omega_panels = 0;
};

// Probability that a position measurement of the damped logical zero lands in
// a Voronoi cell belonging to the other codeword.  The position density is
// the normalized heat-kernel smearing of the Z_N orientation comb; the
// integral runs cell by cell in the axis-angle chart (Gauss-Legendre in
// cos Theta, graded panels in omega up to the cell opening omega_max(Theta)).
// Throws std::invalid_argument for delta outside (0, 0.5] and
// std::runtime_error when the all-cell mass fails to reproduce 1.
LeakageResult leakage_probability(int n, double delta, int resolution = 36);

struct DistortionResult {
  double exact = 0.0;      // <0~| kick(l,0,0) |1~> by the Clebsch-Gordan sum
  double heuristic = 0.0;  // 2 (2l+1) exp(-(pi/(2N delta))^2)
  int l_used = 0;
};

// Matrix element of the m = n = 0 kick between damped codewords; the exact
// route sums squared Clebsch-Gordan couplings over the damped l-lattice.
// l = 0 reports the damped codeword overlap <0~|1~>.  Requires 0 <= l < N.
DistortionResult distortion(int n, double delta, int l);

// ---------------------------------------------------------------------------
// Spin-coherent ancilla readout

struct AncillaReadout {
  int spin = 0;
  double eta = 0.0;
  double invariance_min = 1.0;  // min over T in Z_2N of |<fid|D^L(T)|fid>|
  double outside_max = 0.0;     // max over off-subgroup samples (must be < 1)
  // Overlap magnitude |<grid S'|S~>| against fiducial-frame states on a
  // fundamental-cell grid, with the distance of each grid point from S~
  // measured modulo the invariance group; the peak identifies the syndrome.
  std::vector<std::pair<double, double>> kernel;  // (distance, overlap)
  double peak_overlap = 0.0;
  double peak_distance = 0.0;   // distance of the best grid point from S~
};

// Syndrome readout statistics for the spin ancilla: fiducial state
// cos(eta)|L,L> + sin(eta)|L,-L> with spin L = N and eta in (0, pi/4), whose
// invariance group is exactly Z_2N.  The rotor syndrome S~ is imprinted as
// D^L(S~)|fid>; the returned kernel shows how sharply grid states resolve it.
// Throws std::invalid_argument when eta leaves (0, pi/4).
AncillaReadout ancilla_position_readout(const Rotation& s_tilde, int spin,
                                        double eta, int grid_resolution = 16);

// |<v1|v2>|^2 for spin-L coherent states pointing along unit vectors v1, v2,
// evaluated through D^L matrices.  Closed form: ((1 + v1.v2)/2)^{2L}, i.e.
// exponent = number of elementary spin-1/2 constituents.
double spin_coherent_overlap(int spin, const Vec3& v1, const Vec3& v2);

}  // namespace rotorcodes
