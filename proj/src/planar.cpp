#include "rotorcodes/planar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace rotorcodes {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Weight below which a residue class is treated as unpopulated when reading
// off syndromes (relative to a normalized distribution).
constexpr double kResidueTol = 1e-10;

// Unit phase e^{i 2 pi num / den} with the exponent reduced exactly in
// integer arithmetic first, so lattice phases stay on the lattice.
Complex lattice_phase(long long num, long long den) {
  long long r = num % den;
  if (r < 0) r += den;
  return std::polar(1.0, kTwoPi * static_cast<double>(r) / static_cast<double>(den));
}

void check_state(const PlanarState& state, const char* where) {
  if (state.M < 1 || state.amplitudes.size() != static_cast<std::size_t>(state.M)) {
    throw std::invalid_argument(std::string(where) +
                                ": state must carry M >= 1 position amplitudes");
  }
}

void check_two_rotor(const TwoRotorState& state, const char* where) {
  if (state.M < 1 ||
      state.amplitudes.size() !=
          static_cast<std::size_t>(state.M) * static_cast<std::size_t>(state.M)) {
    throw std::invalid_argument(std::string(where) +
                                ": state must carry M*M position amplitudes");
  }
}

// Snap phi to the lattice 2*pi*t/M and return t; rejects angles off the
// lattice, where the gate would not be a function of the momentum label.
long long snap_gate_angle(double phi, int M, const char* gate) {
  const double t_real = phi * M / kTwoPi;
  const long long t = std::llround(t_real);
  if (std::abs(t_real - static_cast<double>(t)) > 1e-9) {
    throw std::invalid_argument(
        std::string(gate) +
        ": angle must be a multiple of 2*pi/M on an M-point circle");
  }
  return t;
}

struct ResidueReadout {
  int residue = 0;     // raw class in 0..modulus-1
  bool ambiguous = false;
};

int centered_residue(int r, int modulus) {
  // Representative in (-modulus/2, modulus/2], ties to the positive end.
  return (2 * r > modulus) ? r - modulus : r;
}

// Dominant residue class of a weight distribution over Z_M folded mod
// `modulus`; flags states populating more than one class.  Among classes of
// equal weight the one closest to zero (positive first) wins, so the
// readout is deterministic.
ResidueReadout fold_residues(const std::vector<double>& weights, int modulus) {
  std::vector<double> mass(modulus, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    mass[i % modulus] += weights[i];
    total += weights[i];
  }
  if (total <= 0.0) {
    throw std::invalid_argument("syndrome: state has zero norm");
  }

  ResidueReadout out;
  int populated = 0;
  double best_mass = -1.0;
  for (int r = 0; r < modulus; ++r) {
    if (mass[r] / total > kResidueTol) ++populated;
  }
  for (int r = 0; r < modulus; ++r) {
    const double m = mass[r] / total;
    if (m > best_mass + 1e-12) {
      best_mass = m;
      out.residue = r;
    } else if (m > best_mass - 1e-12) {
      // Equal-weight tie: prefer the representative nearer zero, and the
      // positive one of a +/- pair.
      const int cur = centered_residue(out.residue, modulus);
      const int alt = centered_residue(r, modulus);
      if (std::abs(alt) < std::abs(cur) ||
          (std::abs(alt) == std::abs(cur) && alt > cur)) {
        out.residue = r;
      }
    }
  }
  out.ambiguous = populated > 1;
  return out;
}

PlanarSyndrome syndrome_from_weights(const std::vector<double>& position_weights,
                                     const std::vector<double>& momentum_weights,
                                     const PlanarCode& code) {
  const int window = code.M / (code.d * code.N);   // grid steps per 2*pi/(dN)
  const ResidueReadout pos = fold_residues(position_weights, window);
  const ResidueReadout mom = fold_residues(momentum_weights, code.N);

  PlanarSyndrome out;
  out.position_steps = centered_residue(pos.residue, window);
  out.position_radians = kTwoPi * out.position_steps / code.M;
  out.momentum_residue = mom.residue;
  out.momentum_centered = centered_residue(mom.residue, code.N);
  out.position_ambiguous = pos.ambiguous;
  out.momentum_ambiguous = mom.ambiguous;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// States

PlanarState planar_position_state(int M, int j) {
  if (M < 1) throw std::invalid_argument("position state: grid size must be >= 1");
  PlanarState state;
  state.M = M;
  state.amplitudes.assign(M, Complex(0.0, 0.0));
  state.amplitudes[((j % M) + M) % M] = Complex(1.0, 0.0);
  return state;
}

double planar_norm(const PlanarState& state) {
  check_state(state, "norm");
  double s = 0.0;
  for (const Complex& a : state.amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

Complex planar_inner(const PlanarState& a, const PlanarState& b) {
  check_state(a, "inner");
  check_state(b, "inner");
  if (a.M != b.M) throw std::invalid_argument("inner: grid sizes differ");
  Complex s(0.0, 0.0);
  for (int j = 0; j < a.M; ++j) s += std::conj(a.amplitudes[j]) * b.amplitudes[j];
  return s;
}

std::vector<Complex> momentum_amplitudes(const PlanarState& state) {
  check_state(state, "momentum amplitudes");
  const int M = state.M;
  std::vector<Complex> coeffs(M, Complex(0.0, 0.0));
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  for (int l = 0; l < M; ++l) {
    Complex s(0.0, 0.0);
    for (int j = 0; j < M; ++j) {
      s += lattice_phase(-static_cast<long long>(l) * j, M) * state.amplitudes[j];
    }
    coeffs[l] = scale * s;
  }
  return coeffs;
}

PlanarState state_from_momentum(int M, const std::vector<Complex>& coeffs) {
  if (M < 1 || coeffs.size() != static_cast<std::size_t>(M)) {
    throw std::invalid_argument("momentum view: need M coefficients");
  }
  PlanarState state;
  state.M = M;
  state.amplitudes.assign(M, Complex(0.0, 0.0));
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  for (int j = 0; j < M; ++j) {
    Complex s(0.0, 0.0);
    for (int l = 0; l < M; ++l) {
      s += lattice_phase(static_cast<long long>(l) * j, M) * coeffs[l];
    }
    state.amplitudes[j] = scale * s;
  }
  return state;
}

// ---------------------------------------------------------------------------
// Codes

PlanarCode make_planar_code(int N, int d, int M) {
  if (N < 1 || d < 1 || M < 1) {
    throw std::invalid_argument("planar code: N, d, M must be positive");
  }
  if (M % (d * N) != 0) {
    throw std::invalid_argument(
        "planar code: grid size must be a multiple of d*N so all codeword "
        "positions are grid points");
  }
  PlanarCode code;
  code.N = N;
  code.d = d;
  code.M = M;
  code.stabilizer_kick = d * N;
  code.stabilizer_shift_steps = M / N;
  code.logical_kick = N;
  code.logical_shift_steps = M / (d * N);

  const double amp = 1.0 / std::sqrt(static_cast<double>(N));
  for (int k = 0; k < d; ++k) {
    PlanarState word;
    word.M = M;
    word.amplitudes.assign(M, Complex(0.0, 0.0));
    for (int h = 0; h < N; ++h) {
      word.amplitudes[(code.logical_shift_steps * (k + h * d)) % M] = amp;
    }
    code.codewords.push_back(word);
  }
  return code;
}

PlanarState zak_state(const PlanarCode& code, int a_steps, int lambda) {
  const int spacing = code.M / code.N;
  PlanarState state;
  state.M = code.M;
  state.amplitudes.assign(code.M, Complex(0.0, 0.0));
  const double amp = 1.0 / std::sqrt(static_cast<double>(code.N));
  for (int h = 0; h < code.N; ++h) {
    const int j = (((a_steps + h * spacing) % code.M) + code.M) % code.M;
    state.amplitudes[j] =
        amp * lattice_phase(static_cast<long long>(lambda) * h, code.N);
  }
  return state;
}

// ---------------------------------------------------------------------------
// Errors

PlanarState shift(const PlanarState& state, int delta_steps) {
  check_state(state, "shift");
  const int M = state.M;
  PlanarState out;
  out.M = M;
  out.amplitudes.assign(M, Complex(0.0, 0.0));
  const int t = ((delta_steps % M) + M) % M;
  for (int j = 0; j < M; ++j) {
    out.amplitudes[(j + t) % M] = state.amplitudes[j];
  }
  return out;
}

PlanarState kick(const PlanarState& state, int delta_ell) {
  check_state(state, "kick");
  const int M = state.M;
  PlanarState out = state;
  for (int j = 0; j < M; ++j) {
    out.amplitudes[j] *= lattice_phase(static_cast<long long>(delta_ell) * j, M);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Syndromes and recovery

PlanarSyndrome syndrome(const PlanarState& state, const PlanarCode& code) {
  check_state(state, "syndrome");
  if (state.M != code.M) {
    throw std::invalid_argument("syndrome: state and code grids differ");
  }
  std::vector<double> pos(code.M), mom(code.M);
  const std::vector<Complex> coeffs = momentum_amplitudes(state);
  for (int i = 0; i < code.M; ++i) {
    pos[i] = std::norm(state.amplitudes[i]);
    mom[i] = std::norm(coeffs[i]);
  }
  return syndrome_from_weights(pos, mom, code);
}

PlanarState recover(const PlanarState& state, const PlanarSyndrome& syn,
                    const PlanarCode& code) {
  check_state(state, "recover");
  if (state.M != code.M) {
    throw std::invalid_argument("recover: state and code grids differ");
  }
  return kick(shift(state, -syn.position_steps), -syn.momentum_centered);
}

// ---------------------------------------------------------------------------
// Symplectic gates

PlanarState gate_quad(const PlanarState& state, double phi) {
  check_state(state, "quadratic-phase gate");
  const int M = state.M;
  const long long t = snap_gate_angle(phi, M, "quadratic-phase gate");
  if (t % 2 != 0) {
    throw std::invalid_argument(
        "quadratic-phase gate: angle must be an even multiple of 2*pi/M for "
        "the phase to be a function of the momentum label mod M");
  }
  std::vector<Complex> coeffs = momentum_amplitudes(state);
  for (int l = 0; l < M; ++l) {
    // e^{-i phi l(l+1)/2} with phi = 2*pi*t/M, reduced exactly.
    const long long half = static_cast<long long>(l) * (l + 1) / 2;
    coeffs[l] *= lattice_phase(-t * half, M);
  }
  return state_from_momentum(M, coeffs);
}

TwoRotorState product_state(const PlanarState& first, const PlanarState& second) {
  check_state(first, "product state");
  check_state(second, "product state");
  if (first.M != second.M) {
    throw std::invalid_argument("product state: grid sizes differ");
  }
  const int M = first.M;
  TwoRotorState out;
  out.M = M;
  out.amplitudes.assign(static_cast<std::size_t>(M) * M, Complex(0.0, 0.0));
  for (int j1 = 0; j1 < M; ++j1) {
    for (int j2 = 0; j2 < M; ++j2) {
      out.amplitudes[static_cast<std::size_t>(j1) * M + j2] =
          first.amplitudes[j1] * second.amplitudes[j2];
    }
  }
  return out;
}

double two_rotor_norm(const TwoRotorState& state) {
  check_two_rotor(state, "norm");
  double s = 0.0;
  for (const Complex& a : state.amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

Complex two_rotor_inner(const TwoRotorState& a, const TwoRotorState& b) {
  check_two_rotor(a, "inner");
  check_two_rotor(b, "inner");
  if (a.M != b.M) throw std::invalid_argument("inner: grid sizes differ");
  Complex s(0.0, 0.0);
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
    s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  }
  return s;
}

TwoRotorState gate_cphase(const TwoRotorState& state, double phi) {
  check_two_rotor(state, "conditional-phase gate");
  const int M = state.M;
  const long long t = snap_gate_angle(phi, M, "conditional-phase gate");

  // Transform both axes to momentum, apply e^{-i phi l1 l2}, transform back.
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  std::vector<Complex> work(static_cast<std::size_t>(M) * M, Complex(0.0, 0.0));
  std::vector<Complex> out(static_cast<std::size_t>(M) * M, Complex(0.0, 0.0));
  // axis 1: j1 -> l1
  for (int l1 = 0; l1 < M; ++l1) {
    for (int j2 = 0; j2 < M; ++j2) {
      Complex s(0.0, 0.0);
      for (int j1 = 0; j1 < M; ++j1) {
        s += lattice_phase(-static_cast<long long>(l1) * j1, M) *
             state.amplitudes[static_cast<std::size_t>(j1) * M + j2];
      }
      work[static_cast<std::size_t>(l1) * M + j2] = scale * s;
    }
  }
  // axis 2: j2 -> l2, with the conditional phase folded in
  for (int l1 = 0; l1 < M; ++l1) {
    for (int l2 = 0; l2 < M; ++l2) {
      Complex s(0.0, 0.0);
      for (int j2 = 0; j2 < M; ++j2) {
        s += lattice_phase(-static_cast<long long>(l2) * j2, M) *
             work[static_cast<std::size_t>(l1) * M + j2];
      }
      out[static_cast<std::size_t>(l1) * M + l2] =
          scale * s * lattice_phase(-t * static_cast<long long>(l1) * l2, M);
    }
  }
  // back to positions, both axes
  for (int l1 = 0; l1 < M; ++l1) {
    for (int j2 = 0; j2 < M; ++j2) {
      Complex s(0.0, 0.0);
      for (int l2 = 0; l2 < M; ++l2) {
        s += lattice_phase(static_cast<long long>(l2) * j2, M) *
             out[static_cast<std::size_t>(l1) * M + l2];
      }
      work[static_cast<std::size_t>(l1) * M + j2] = scale * s;
    }
  }
  TwoRotorState result;
  result.M = M;
  result.amplitudes.assign(static_cast<std::size_t>(M) * M, Complex(0.0, 0.0));
  for (int j1 = 0; j1 < M; ++j1) {
    for (int j2 = 0; j2 < M; ++j2) {
      Complex s(0.0, 0.0);
      for (int l1 = 0; l1 < M; ++l1) {
        s += lattice_phase(static_cast<long long>(l1) * j1, M) *
             work[static_cast<std::size_t>(l1) * M + j2];
      }
      result.amplitudes[static_cast<std::size_t>(j1) * M + j2] = scale * s;
    }
  }
  return result;
}

TwoRotorState gate_crot(const TwoRotorState& state) {
  check_two_rotor(state, "conditional rotation");
  const int M = state.M;
  TwoRotorState out;
  out.M = M;
  out.amplitudes.assign(static_cast<std::size_t>(M) * M, Complex(0.0, 0.0));
  for (int j1 = 0; j1 < M; ++j1) {
    for (int j2 = 0; j2 < M; ++j2) {
      out.amplitudes[static_cast<std::size_t>(j1) * M + (j2 + j1) % M] =
          state.amplitudes[static_cast<std::size_t>(j1) * M + j2];
    }
  }
  return out;
}

std::vector<double> position_marginal(const TwoRotorState& state, int rotor) {
  check_two_rotor(state, "position marginal");
  if (rotor != 0 && rotor != 1) {
    throw std::invalid_argument("position marginal: rotor index must be 0 or 1");
  }
  const int M = state.M;
  std::vector<double> p(M, 0.0);
  for (int j1 = 0; j1 < M; ++j1) {
    for (int j2 = 0; j2 < M; ++j2) {
      p[rotor == 0 ? j1 : j2] +=
          std::norm(state.amplitudes[static_cast<std::size_t>(j1) * M + j2]);
    }
  }
  return p;
}

std::vector<double> momentum_marginal(const TwoRotorState& state, int rotor) {
  check_two_rotor(state, "momentum marginal");
  if (rotor != 0 && rotor != 1) {
    throw std::invalid_argument("momentum marginal: rotor index must be 0 or 1");
  }
  const int M = state.M;
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  std::vector<double> p(M, 0.0);
  // Transform only the requested axis; Parseval handles the other one.
  for (int l = 0; l < M; ++l) {
    for (int other = 0; other < M; ++other) {
      Complex s(0.0, 0.0);
      for (int j = 0; j < M; ++j) {
        const std::size_t idx = rotor == 0
                                    ? static_cast<std::size_t>(j) * M + other
                                    : static_cast<std::size_t>(other) * M + j;
        s += lattice_phase(-static_cast<long long>(l) * j, M) * state.amplitudes[idx];
      }
      p[l] += std::norm(scale * s);
    }
  }
  return p;
}

PlanarSyndrome syndrome_marginal(const TwoRotorState& state, int rotor,
                                 const PlanarCode& code) {
  if (state.M != code.M) {
    throw std::invalid_argument("syndrome: state and code grids differ");
  }
  return syndrome_from_weights(position_marginal(state, rotor),
                               momentum_marginal(state, rotor), code);
}

// ---------------------------------------------------------------------------
// quNit-ancilla gate and initialization

RotorQunitState with_qunit(const PlanarState& state, int n) {
  check_state(state, "ancilla attach");
  if (n < 1) throw std::invalid_argument("ancilla attach: dimension must be >= 1");
  RotorQunitState out;
  out.M = state.M;
  out.n = n;
  out.amplitudes.assign(static_cast<std::size_t>(state.M) * n, Complex(0.0, 0.0));
  for (int j = 0; j < state.M; ++j) {
    out.amplitudes[static_cast<std::size_t>(j) * n] = state.amplitudes[j];
  }
  return out;
}

RotorQunitState gate_cphase_prime(const RotorQunitState& state) {
  if (state.M < 1 || state.n < 1 ||
      state.amplitudes.size() !=
          static_cast<std::size_t>(state.M) * static_cast<std::size_t>(state.n)) {
    throw std::invalid_argument(
        "momentum-residue gate: state must carry M*n amplitudes");
  }
  if (state.M % state.n != 0) {
    throw std::invalid_argument(
        "momentum-residue gate: ancilla dimension must divide the grid size "
        "so the momentum label has a well-defined residue");
  }
  const int M = state.M;
  const int n = state.n;
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));

  // Rotor axis to momentum, advance the ancilla by l mod n, back again.
  std::vector<Complex> mom(static_cast<std::size_t>(M) * n, Complex(0.0, 0.0));
  for (int l = 0; l < M; ++l) {
    for (int h = 0; h < n; ++h) {
      Complex s(0.0, 0.0);
      for (int j = 0; j < M; ++j) {
        s += lattice_phase(-static_cast<long long>(l) * j, M) *
             state.amplitudes[static_cast<std::size_t>(j) * n + h];
      }
      mom[static_cast<std::size_t>(l) * n + (h + l) % n] = scale * s;
    }
  }
  RotorQunitState out;
  out.M = M;
  out.n = n;
  out.amplitudes.assign(static_cast<std::size_t>(M) * n, Complex(0.0, 0.0));
  for (int j = 0; j < M; ++j) {
    for (int h = 0; h < n; ++h) {
      Complex s(0.0, 0.0);
      for (int l = 0; l < M; ++l) {
        s += lattice_phase(static_cast<long long>(l) * j, M) *
             mom[static_cast<std::size_t>(l) * n + h];
      }
      out.amplitudes[static_cast<std::size_t>(j) * n + h] = scale * s;
    }
  }
  return out;
}

std::vector<QunitBranch> measure_qunit(const RotorQunitState& state) {
  if (state.M < 1 || state.n < 1 ||
      state.amplitudes.size() !=
          static_cast<std::size_t>(state.M) * static_cast<std::size_t>(state.n)) {
    throw std::invalid_argument("ancilla measurement: state must carry M*n amplitudes");
  }
  std::vector<QunitBranch> branches;
  for (int h = 0; h < state.n; ++h) {
    double p = 0.0;
    for (int j = 0; j < state.M; ++j) {
      p += std::norm(state.amplitudes[static_cast<std::size_t>(j) * state.n + h]);
    }
    if (p <= 1e-15) continue;
    QunitBranch branch;
    branch.outcome = h;
    branch.probability = p;
    branch.post_measurement.M = state.M;
    branch.post_measurement.amplitudes.assign(state.M, Complex(0.0, 0.0));
    const double scale = 1.0 / std::sqrt(p);
    for (int j = 0; j < state.M; ++j) {
      branch.post_measurement.amplitudes[j] =
          scale * state.amplitudes[static_cast<std::size_t>(j) * state.n + h];
    }
    branches.push_back(branch);
  }
  return branches;
}

std::vector<InitializationBranch> initialize_branches(const PlanarCode& code) {
  const RotorQunitState entangled =
      gate_cphase_prime(with_qunit(planar_position_state(code.M, 0), code.N));
  std::vector<InitializationBranch> out;
  for (const QunitBranch& branch : measure_qunit(entangled)) {
    InitializationBranch ib;
    ib.lambda = branch.outcome;
    ib.probability = branch.probability;
    ib.post_measurement = branch.post_measurement;
    ib.corrected = kick(branch.post_measurement, -branch.outcome);
    out.push_back(ib);
  }
  return out;
}

PlanarState initialize_logical(const PlanarCode& code) {
  return initialize_branches(code).front().corrected;
}

}  // namespace rotorcodes
