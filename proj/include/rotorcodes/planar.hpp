#pragma once
// Planar-rotor codes on a discretized circle: the M-point grid hosts exact
// codewords, stabilizers, shift/kick errors, syndrome extraction, recovery,
// symplectic gates (quadratic phase, conditional phase, conditional
// rotation, and the quNit-ancilla variant), and logical-state
// initialization.  Everything here is finite and exact: codeword positions
// are grid points, stabilizer/logical identities hold to machine precision,
// and continuum statements are recovered as the grid is refined.
//
// Conventions, matching the rest of the library:
//   * positions phi_j = 2*pi*j/M, position basis |phi_j>;
//   * momentum basis |l> = (1/sqrt M) sum_j e^{i l phi_j} |phi_j>, so the
//     momentum label lives in Z_M and <phi_j|l> = e^{i l phi_j}/sqrt(M);
//   * shift by t grid steps maps |phi_j> -> |phi_{j+t}> (angle +2*pi*t/M);
//   * kick by dl multiplies position amplitudes by e^{i dl phi_j}, raising
//     the momentum label by dl.

#include <complex>
#include <vector>

namespace rotorcodes {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// States on the discretized circle

struct PlanarState {
  int M = 0;                         // grid size; positions phi_j = 2*pi*j/M
  std::vector<Complex> amplitudes;   // position basis, size M
};

// |phi_j> with j taken mod M.
PlanarState planar_position_state(int M, int j);

double planar_norm(const PlanarState& state);
Complex planar_inner(const PlanarState& a, const PlanarState& b);

// Dual view: c_l = (1/sqrt M) sum_j e^{-i l phi_j} amp_j for l = 0..M-1,
// and its inverse.  The pair is unitary, so norms agree.
std::vector<Complex> momentum_amplitudes(const PlanarState& state);
PlanarState state_from_momentum(int M, const std::vector<Complex>& coeffs);

// ---------------------------------------------------------------------------
// Codes

// N-fold comb code with d codewords on an M-point circle (dN must divide M).
// Codeword k is the uniform superposition of the N positions
// 2*pi*(k + h*d)/(d*N), h = 0..N-1 -- grid points at steps (k + h*d)*M/(dN).
//
// Stabilizers and logicals are phase-space displacements, stored by their
// integer data: S_Z = kick by dN, S_X = shift by M/N steps (angle 2*pi/N),
// Zbar = kick by N, Xbar = shift by M/(dN) steps (angle 2*pi/(dN)).
struct PlanarCode {
  int N = 0;
  int d = 0;
  int M = 0;
  std::vector<PlanarState> codewords;   // size d
  int stabilizer_kick = 0;              // S_Z exponent: dN
  int stabilizer_shift_steps = 0;       // S_X steps: M/N
  int logical_kick = 0;                 // Zbar exponent: N
  int logical_shift_steps = 0;          // Xbar steps: M/(dN)
};

PlanarCode make_planar_code(int N, int d, int M);

// Partial-Fourier (Zak) basis state |a;lambda>: the uniform comb over
// positions a + h*(M/N) steps with phases e^{i 2 pi lambda h / N}.  The M
// states with a = 0..M/N-1, lambda = 0..N-1 are orthonormal and complete.
// Codeword k is |a = k*M/(dN); lambda = 0>.
PlanarState zak_state(const PlanarCode& code, int a_steps, int lambda);

// ---------------------------------------------------------------------------
// Errors

// Position shift by delta_steps grid steps (angle 2*pi*delta_steps/M).
PlanarState shift(const PlanarState& state, int delta_steps);

// Momentum kick by delta_ell: position-diagonal phase e^{i delta_ell phi}.
PlanarState kick(const PlanarState& state, int delta_ell);

// ---------------------------------------------------------------------------
// Syndromes and recovery

// Residues of a corrupted codeword: position support modulo the window
// 2*pi/(dN) (= M/(dN) grid steps) and momentum support modulo N.  Both are
// reported centered -- steps in (-P/2, P/2] with P = M/(dN), momentum in
// (-N/2, N/2] -- with ties broken toward the positive end.  If the state
// populates more than one residue class (a superposition of syndromes), the
// dominant class is reported and the matching flag is set.
struct PlanarSyndrome {
  int position_steps = 0;        // centered residue, grid steps
  double position_radians = 0;   // 2*pi*position_steps/M
  int momentum_residue = 0;      // raw residue in 0..N-1
  int momentum_centered = 0;     // centered representative in (-N/2, N/2]
  bool position_ambiguous = false;
  bool momentum_ambiguous = false;
};

PlanarSyndrome syndrome(const PlanarState& state, const PlanarCode& code);

// Undo the diagnosed displacement: shift back by position_steps and kick
// back by momentum_centered.  Inverts any shift/kick error inside the
// correctable window exactly (up to global phase).
PlanarState recover(const PlanarState& state, const PlanarSyndrome& syndrome,
                    const PlanarCode& code);

// ---------------------------------------------------------------------------
// Symplectic gates
//
// The grid quantizes the admissible gate angles: e^{-i phi L(L+1)/2} is a
// well-defined function of the momentum label l mod M only when phi*M is an
// even multiple of 2*pi, and e^{-i phi L x L} needs phi*M to be a multiple
// of 2*pi.  Angles are validated against those lattices (tolerance 1e-9)
// and snapped to the exact lattice value, so the conjugation identities
// hold at every matrix column including the wrap-around one.

// Quadratic phase e^{-i phi L(L+1)/2}: maps Z -> X_phi Z under conjugation.
// Requires phi = 2*pi*t/M with t even.
PlanarState gate_quad(const PlanarState& state, double phi);

// Two-rotor state on the same grid; amplitudes indexed j1*M + j2.
struct TwoRotorState {
  int M = 0;
  std::vector<Complex> amplitudes;   // size M*M
};

TwoRotorState product_state(const PlanarState& first, const PlanarState& second);
double two_rotor_norm(const TwoRotorState& state);
Complex two_rotor_inner(const TwoRotorState& a, const TwoRotorState& b);

// Conditional phase e^{-i phi L x L}: maps Z x 1 -> Z x X_phi and
// 1 x Z -> X_phi x Z.  Requires phi = 2*pi*t/M with t an integer.
TwoRotorState gate_cphase(const TwoRotorState& state, double phi);

// Conditional rotation: shifts the second rotor by the first rotor's
// position (a controlled cyclic permutation by the control's position
// index).  Maps X_s x 1 -> X_s x X_s and 1 x Z -> Zdag x Z.
TwoRotorState gate_crot(const TwoRotorState& state);

// Position/momentum weight of one rotor of a two-rotor state (Born-rule
// marginals; rotor 0 is the first factor).  The momentum marginal uses
// Parseval along the traced axis, so only one transform is needed.
std::vector<double> position_marginal(const TwoRotorState& state, int rotor);
std::vector<double> momentum_marginal(const TwoRotorState& state, int rotor);

// Residues of one rotor of a (possibly entangled) two-rotor state, computed
// from its marginals exactly as syndrome() does for a single rotor.
PlanarSyndrome syndrome_marginal(const TwoRotorState& state, int rotor,
                                 const PlanarCode& code);

// ---------------------------------------------------------------------------
// quNit-ancilla gate and initialization

// Rotor tensor an n-dimensional ancilla; amplitudes indexed j*n + h, where
// h labels the ancilla basis states |h_z>.
struct RotorQunitState {
  int M = 0;
  int n = 0;
  std::vector<Complex> amplitudes;   // size M*n
};

// Rotor state with the ancilla attached in |0_z>.
RotorQunitState with_qunit(const PlanarState& state, int n);

// sum_l |l><l| x X^l with X the cyclic ancilla shift |h_z> -> |h+1_z>:
// the ancilla advances by the rotor's momentum label mod n.  Requires n to
// divide M, so the residue is a function of the grid momentum label.
RotorQunitState gate_cphase_prime(const RotorQunitState& state);

// Projective measurement of the ancilla in the |h_z> basis.
struct QunitBranch {
  int outcome = 0;
  double probability = 0;
  PlanarState post_measurement;   // normalized rotor state given the outcome
};
std::vector<QunitBranch> measure_qunit(const RotorQunitState& state);

// One branch of the logical-state preparation: start from |phi = 0>, attach
// an N-dimensional ancilla, entangle with gate_cphase_prime, measure the
// ancilla (outcome lambda, uniform probability 1/N), and undo the momentum
// residue with a corrective kick.  Every branch ends in codeword 0 exactly.
struct InitializationBranch {
  int lambda = 0;
  double probability = 0;
  PlanarState post_measurement;   // |a = 0; lambda> comb
  PlanarState corrected;          // codeword 0
};
std::vector<InitializationBranch> initialize_branches(const PlanarCode& code);

// The deterministic end product of the scheme above.
PlanarState initialize_logical(const PlanarCode& code);

}  // namespace rotorcodes
