#include "rotorcodes/molecular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rotorcodes {

namespace {

constexpr double kEightPiSq = 8.0 * kPi * kPi;

// Amplitudes below this are treated as numerically absent when deciding
// sparsity (never when accumulating sums).
constexpr double kSparseTol = 1e-14;

std::complex<double> phase(double angle) {
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Frame states

FrameState make_frame_state(std::vector<FrameTerm> terms) {
  FrameState state;
  state.terms = std::move(terms);
  merge_frame_terms(state);
  return state;
}

void merge_frame_terms(FrameState& state, double drop_tol) {
  std::vector<FrameTerm> merged;
  merged.reserve(state.terms.size());
  for (const auto& term : state.terms) {
    bool found = false;
    for (auto& kept : merged) {
      if (Rotation::approx_equal(kept.rotation, term.rotation)) {
        kept.amplitude += term.amplitude;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(term);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [&](const FrameTerm& t) {
                                return std::abs(t.amplitude) <= drop_tol;
                              }),
               merged.end());
  state.terms = std::move(merged);
}

double norm(const FrameState& state) {
  double sum = 0.0;
  for (const auto& term : state.terms) sum += std::norm(term.amplitude);
  return std::sqrt(sum);
}

FrameState normalized(const FrameState& state) {
  const double n = norm(state);
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero state");
  FrameState out = state;
  for (auto& term : out.terms) term.amplitude /= n;
  return out;
}

Complex inner(const FrameState& a, const FrameState& b) {
  Complex sum = 0.0;
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      if (Rotation::approx_equal(ta.rotation, tb.rotation)) {
        sum += std::conj(ta.amplitude) * tb.amplitude;
        break;
      }
    }
  }
  return sum;
}

FrameState operator+(const FrameState& a, const FrameState& b) {
  FrameState out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  merge_frame_terms(out);
  return out;
}

FrameState operator-(const FrameState& a, const FrameState& b) {
  return a + (Complex(-1.0) * b);
}

FrameState operator*(const Complex& scale, const FrameState& state) {
  FrameState out = state;
  for (auto& term : out.terms) term.amplitude *= scale;
  merge_frame_terms(out);
  return out;
}

FrameState apply_rotation(const FrameState& state, const Rotation& s,
                          RotationSide side) {
  FrameState out;
  out.terms.reserve(state.terms.size());
  const Rotation s_inv = s.inverse();
  for (const auto& term : state.terms) {
    const Rotation moved = (side == RotationSide::Active)
                               ? s * term.rotation
                               : term.rotation * s_inv;
    out.terms.push_back({moved, term.amplitude});
  }
  merge_frame_terms(out);
  return out;
}

FrameState apply_kick(const FrameState& state, int l, int m, int n) {
  if (l < 0 || std::abs(m) > l || std::abs(n) > l)
    throw std::invalid_argument("kick indices out of range");
  FrameState out = state;
  for (auto& term : out.terms)
    term.amplitude *= wigner_D_element(l, m, n, term.rotation);
  merge_frame_terms(out);
  return out;
}

FrameState apply_kick_adjoint(const FrameState& state, int l, int m, int n) {
  if (l < 0 || std::abs(m) > l || std::abs(n) > l)
    throw std::invalid_argument("kick indices out of range");
  FrameState out = state;
  for (auto& term : out.terms)
    term.amplitude *= std::conj(wigner_D_element(l, m, n, term.rotation));
  merge_frame_terms(out);
  return out;
}

// ---------------------------------------------------------------------------
// Momentum states

MomentumState zero_momentum_state(int L_max) {
  if (L_max < 0) throw std::invalid_argument("L_max must be non-negative");
  MomentumState state;
  state.L_max = L_max;
  state.blocks.reserve(L_max + 1);
  for (int l = 0; l <= L_max; ++l)
    state.blocks.emplace_back(Eigen::MatrixXcd::Zero(2 * l + 1, 2 * l + 1));
  return state;
}

double norm(const MomentumState& state) {
  double sum = 0.0;
  for (const auto& block : state.blocks) sum += block.squaredNorm();
  return std::sqrt(sum);
}

Complex inner(const MomentumState& a, const MomentumState& b) {
  Complex sum = 0.0;
  const int shared = std::min(a.L_max, b.L_max);
  for (int l = 0; l <= shared; ++l)
    sum += (a.blocks[l].conjugate().cwiseProduct(b.blocks[l])).sum();
  return sum;
}

MomentumProjection frame_to_momentum(const FrameState& state, int L_max,
                                     double delta, bool normalize) {
  if (delta < 0.0) throw std::invalid_argument("delta must be non-negative");
  MomentumProjection result;
  result.state = zero_momentum_state(L_max);

  double abs_amp_sum = 0.0;
  for (const auto& term : state.terms) abs_amp_sum += std::abs(term.amplitude);

  double captured = 0.0;
  for (int l = 0; l <= L_max; ++l) {
    const double damp = std::exp(-0.5 * delta * delta * l * (l + 1));
    if (damp == 0.0) break;
    Eigen::MatrixXcd& block = result.state.blocks[l];
    for (const auto& term : state.terms)
      block += term.amplitude * wigner_D(l, term.rotation).conjugate();
    block *= std::sqrt((2.0 * l + 1.0) / kEightPiSq) * damp;
    captured += block.squaredNorm();
  }

  if (delta == 0.0) {
    result.tail_mass_bound = std::numeric_limits<double>::quiet_NaN();
  } else {
    // |c^l_{mn}| <= sqrt((2l+1)/8pi^2) (sum_g |amp|) damp(l), so the l-level
    // mass is at most (2l+1)^3 / 8pi^2 (sum |amp|)^2 damp(l)^2.
    double tail = 0.0;
    const double scale = abs_amp_sum * abs_amp_sum / kEightPiSq;
    for (int l = L_max + 1;; ++l) {
      const double d = 2.0 * l + 1.0;
      const double term =
          scale * d * d * d * std::exp(-delta * delta * l * (l + 1));
      tail += term;
      if (term < 1e-22 * (captured + tail) || l > L_max + 4000) break;
    }
    result.tail_mass_bound =
        captured > 0.0 ? tail / captured : std::numeric_limits<double>::infinity();
  }

  if (normalize) {
    const double n = std::sqrt(captured);
    if (n == 0.0)
      throw std::invalid_argument("state has no mass below the truncation");
    for (auto& block : result.state.blocks) block /= n;
  }
  return result;
}

int default_momentum_cutoff(double delta) {
  if (delta <= 0.0) throw std::invalid_argument("delta must be positive");
  return static_cast<int>(std::ceil(6.0 / delta));
}

MomentumState apply_rotation(const MomentumState& state, const Rotation& s,
                             RotationSide side) {
  MomentumState out = state;
  for (int l = 0; l <= state.L_max; ++l) {
    const Eigen::MatrixXcd d = wigner_D(l, s);
    if (side == RotationSide::Active)
      out.blocks[l] = d.conjugate() * state.blocks[l];
    else
      out.blocks[l] = state.blocks[l] * d.transpose();
  }
  return out;
}

MomentumKickResult apply_kick(const MomentumState& state, int l, int m, int n,
                              int L_max_out) {
  if (l < 0 || std::abs(m) > l || std::abs(n) > l)
    throw std::invalid_argument("kick indices out of range");
  const int L_full = state.L_max + l;
  if (L_max_out < 0) L_max_out = L_full;

  MomentumState full = zero_momentum_state(L_full);
  for (int lp = 0; lp <= state.L_max; ++lp) {
    const Eigen::MatrixXcd& block = state.blocks[lp];
    if (block.squaredNorm() < kSparseTol * kSparseTol) continue;
    // Cache the n-side Clebsch-Gordan columns once per source level.
    std::vector<CGColumn> col_n(2 * lp + 1);
    for (int np = -lp; np <= lp; ++np)
      col_n[np + lp] = clebsch_gordan_column(l, n, lp, np);
    for (int mp = -lp; mp <= lp; ++mp) {
      const CGColumn col_m = clebsch_gordan_column(l, m, lp, mp);
      for (int np = -lp; np <= lp; ++np) {
        const Complex c = block(mp + lp, np + lp);
        if (std::abs(c) <= kSparseTol) continue;
        const int M = m + mp;
        const int N = n + np;
        const int L_lo = std::max({std::abs(lp - l), std::abs(M), std::abs(N)});
        for (int L = L_lo; L <= lp + l; ++L) {
          const double w = std::sqrt((2.0 * lp + 1.0) / (2.0 * L + 1.0)) *
                           col_m.at(L) * col_n[np + lp].at(L);
          if (w != 0.0) full.blocks[L](M + L, N + L) += w * c;
        }
      }
    }
  }

  MomentumKickResult result;
  result.state = zero_momentum_state(std::min(L_max_out, L_full));
  for (int L = 0; L <= L_full; ++L) {
    if (L <= result.state.L_max)
      result.state.blocks[L] = full.blocks[L];
    else
      result.dropped_mass += full.blocks[L].squaredNorm();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Codes

MolecularCode build_molecular_code(const FiniteSubgroup& h,
                                   const FiniteSubgroup& k) {
  MolecularCode code;
  code.h = h;
  code.k = k;
  code.coset_table = cosets(k, h);  // throws unless H is a subgroup of K
  code.dim = code.coset_table.count();
  code.h_irreps = irrep_table(h);

  const double amp = 1.0 / std::sqrt(static_cast<double>(h.order()));
  for (int r = 0; r < code.dim; ++r) {
    FrameState word;
    word.terms.reserve(h.order());
    for (int idx : code.coset_table.members[r])
      word.terms.push_back({k.elements[idx], amp});
    code.codewords.push_back(std::move(word));
  }
  return code;
}

FrameState zak_state(const MolecularCode& code, const Rotation& s, int irrep,
                     int mu, int nu) {
  if (irrep < 0 || irrep >= code.h_irreps.num_irreps())
    throw std::invalid_argument("irrep index out of range");
  const Irrep& rep = code.h_irreps.irreps[irrep];
  if (mu < 0 || mu >= rep.dim || nu < 0 || nu >= rep.dim)
    throw std::invalid_argument("irrep matrix indices out of range");

  const double scale =
      std::sqrt(static_cast<double>(rep.dim) / code.h.order());
  FrameState state;
  state.terms.reserve(code.h.order());
  for (int i = 0; i < code.h.order(); ++i) {
    const Complex zeta = rep.matrices[i](mu, nu);
    state.terms.push_back({s * code.h.elements[i], scale * zeta});
  }
  merge_frame_terms(state);
  return state;
}

std::vector<Eigen::MatrixXcd> zak_coefficients(const MolecularCode& code,
                                               const Rotation& s,
                                               const FrameState& state) {
  std::vector<Eigen::MatrixXcd> coeffs;
  coeffs.reserve(code.h_irreps.num_irreps());
  for (int irrep = 0; irrep < code.h_irreps.num_irreps(); ++irrep) {
    const int d = code.h_irreps.irreps[irrep].dim;
    Eigen::MatrixXcd m(d, d);
    for (int mu = 0; mu < d; ++mu)
      for (int nu = 0; nu < d; ++nu)
        m(mu, nu) = inner(zak_state(code, s, irrep, mu, nu), state);
    coeffs.push_back(std::move(m));
  }
  return coeffs;
}

// ---------------------------------------------------------------------------
// Error-correction condition check

std::vector<KickIndex> kicks_up_to(int l_max) {
  std::vector<KickIndex> kicks;
  for (int l = 0; l <= l_max; ++l)
    for (int m = -l; m <= l; ++m)
      for (int n = -l; n <= l; ++n) kicks.push_back({l, m, n});
  return kicks;
}

namespace {

std::string rotation_label(const Rotation& r) {
  std::ostringstream os;
  os << "X[" << r.str() << "]";
  return os.str();
}

std::string kick_label(const KickIndex& k) {
  std::ostringstream os;
  os << "D^" << k.l << "_{" << k.m << "," << k.n << "}";
  return os.str();
}

}  // namespace

KLReport kl_check(const MolecularCode& code,
                  const std::vector<Rotation>& rotations,
                  const std::vector<KickIndex>& kicks, double tol) {
  // Materialize E|r> for every error E and codeword r; then
  // <r|E^dag E'|r'> = <E r|E' r'> regardless of whether E is unitary.
  std::vector<std::string> labels;
  std::vector<std::vector<FrameState>> images;

  labels.push_back("I");
  images.push_back(code.codewords);
  for (const auto& s : rotations) {
    labels.push_back(rotation_label(s));
    std::vector<FrameState> row;
    for (const auto& word : code.codewords)
      row.push_back(apply_rotation(word, s, RotationSide::Active));
    images.push_back(std::move(row));
  }
  for (const auto& kick : kicks) {
    labels.push_back(kick_label(kick));
    std::vector<FrameState> row;
    for (const auto& word : code.codewords)
      row.push_back(apply_kick(word, kick.l, kick.m, kick.n));
    images.push_back(std::move(row));
  }

  KLReport report;
  report.tolerance = tol;
  const int n_err = static_cast<int>(images.size());
  const int d = code.dim;
  for (int i = 0; i < n_err; ++i) {
    for (int j = i; j < n_err; ++j) {
      ++report.pairs_checked;
      Eigen::MatrixXcd m(d, d);
      for (int r = 0; r < d; ++r)
        for (int rp = 0; rp < d; ++rp)
          m(r, rp) = inner(images[i][r], images[j][rp]);
      for (int r = 0; r < d; ++r) {
        for (int rp = 0; rp < d; ++rp) {
          if (r == rp) continue;
          const double mag = std::abs(m(r, rp));
          if (mag > tol)
            report.violations.push_back(
                {labels[i], labels[j], r, rp, "off-diagonal", mag});
        }
      }
      for (int r = 1; r < d; ++r) {
        const double mag = std::abs(m(r, r) - m(0, 0));
        if (mag > tol)
          report.violations.push_back(
              {labels[i], labels[j], r, r, "diagonal", mag});
      }
    }
  }
  report.passed = report.violations.empty();
  return report;
}

// ---------------------------------------------------------------------------
// Recovery

PositionDecodeResult decode_position(const FrameState& corrupted,
                                     const MolecularCode& code) {
  if (corrupted.terms.empty())
    throw std::invalid_argument("cannot decode an empty state");

  PositionDecodeResult result;
  bool first = true;
  for (const auto& term : corrupted.terms) {
    const OrbitSnap snap = snap_to_orbit(term.rotation, code.k);
    if (first) {
      result.syndrome = snap.coset_part;
      first = false;
    } else if (!Rotation::approx_equal(result.syndrome, snap.coset_part)) {
      throw std::invalid_argument(
          "support is not a single left rotation of the code space");
    }
    result.boundary_ambiguous = result.boundary_ambiguous || snap.boundary_tie;
  }
  result.corrected =
      apply_rotation(corrupted, result.syndrome.inverse(), RotationSide::Active);
  return result;
}

MomentumRecovery decode_momentum(int lambda, const MolecularCode& code) {
  if (code.h.family != GroupFamily::Cyclic)
    throw std::invalid_argument(
        "momentum-syndrome recovery requires a cyclic symmetry group");
  const int n = code.h.n;
  MomentumRecovery recovery;
  recovery.lambda = ((lambda % n) + n) % n;

  const int low = recovery.lambda;        // in [0, n)
  const int high = recovery.lambda - n;   // in [-n, 0)
  if (std::abs(low) < std::abs(high)) {
    recovery.m = low;
  } else if (std::abs(high) < std::abs(low)) {
    recovery.m = high;
  } else {
    // n even, lambda = n/2: both representatives are minimal; take +n/2.
    recovery.m = low;
    recovery.tie = true;
  }
  recovery.candidates = {recovery.m, recovery.m == low ? high : low};
  return recovery;
}

FrameState apply_momentum_recovery(const FrameState& state,
                                   const MomentumRecovery& recovery) {
  FrameState out = state;
  for (auto& term : out.terms) {
    const EulerZYZ e = term.rotation.to_euler_zyz();
    term.amplitude *= phase(-recovery.m * (e.alpha + e.gamma));
  }
  merge_frame_terms(out);
  return out;
}

// ---------------------------------------------------------------------------
// Check operators

CheckOperatorCertificate check_operators(const MolecularCode& code) {
  if (code.h.family != GroupFamily::Cyclic ||
      code.k.family != GroupFamily::Cyclic || code.k.n != 2 * code.h.n)
    throw std::invalid_argument(
        "check operators are defined for the cyclic index-2 family");
  const int n = code.h.n;
  CheckOperatorCertificate cert;
  cert.n = n;

  const Rotation sx_rot = Rotation::from_axis_angle({0, 0, 1}, 2.0 * kPi / n);
  const Rotation half_rot = Rotation::from_axis_angle({0, 0, 1}, kPi / n);
  const auto apply_sx = [&](const FrameState& s) {
    return apply_rotation(s, sx_rot, RotationSide::Passive);
  };
  const auto apply_sz = [&](const FrameState& s) {
    return apply_kick(s, 2 * n, 2 * n, 2 * n);
  };

  for (const auto& word : code.codewords) {
    cert.codeword_sx_residual =
        std::max(cert.codeword_sx_residual, norm(apply_sx(word) - word));
    cert.codeword_sz_residual =
        std::max(cert.codeword_sz_residual, norm(apply_sz(word) - word));
  }

  for (int r = 0; r < code.dim; ++r) {
    const Rotation anchor = code.coset_table.representatives[r];
    for (int lambda = 0; lambda < n; ++lambda) {
      const FrameState z = zak_state(code, anchor, lambda, 0, 0);
      const Complex eig = phase(2.0 * kPi * lambda / n);
      cert.zak_eigenvalue_residual =
          std::max(cert.zak_eigenvalue_residual, norm(apply_sx(z) - eig * z));
    }
  }

  // Random frame states probe the operator identities beyond the code space.
  std::mt19937_64 rng(0x6d6f6c65u);
  for (int trial = 0; trial < 4; ++trial) {
    FrameState psi;
    for (int i = 0; i < 6; ++i) {
      const double re = 0.5 - std::ldexp(static_cast<double>(rng() >> 11), -53);
      const double im = 0.5 - std::ldexp(static_cast<double>(rng() >> 11), -53);
      psi.terms.push_back({haar_sample(rng), Complex(re, im)});
    }
    psi = normalized(psi);

    const auto kick_half = [&](const FrameState& s) {
      return apply_kick(s, n, n, n);
    };
    const auto rot_half = [&](const FrameState& s) {
      return apply_rotation(s, half_rot, RotationSide::Passive);
    };
    cert.anticommutator_residual =
        std::max(cert.anticommutator_residual,
                 norm(kick_half(rot_half(psi)) + rot_half(kick_half(psi))));
    cert.commutator_residual =
        std::max(cert.commutator_residual,
                 norm(apply_sx(apply_sz(psi)) - apply_sz(apply_sx(psi))));
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Damped-codeword asymptotics

namespace {

// Level weight of the damped (Z_N, Z_2N) codeword: (2l+1) momentum-basis
// scale, 2 floor(l/n)+1 occupied (m = n = pN) columns, squared damping.
double level_weight(double delta, int n, int l) {
  const double count = 2.0 * (l / n) + 1.0;
  return (2.0 * l + 1.0) * count * std::exp(-delta * delta * l * (l + 1));
}

struct LevelMoments {
  double w_sum = 0.0;    // sum of weights
  double l2_sum = 0.0;   // weighted l(l+1)
  double l4_sum = 0.0;   // weighted (l(l+1))^2
  int l_used = 0;
};

LevelMoments level_moments(double delta, int n) {
  LevelMoments acc;
  for (int l = 0;; ++l) {
    const double w = level_weight(delta, n, l);
    const double eig = static_cast<double>(l) * (l + 1);
    acc.w_sum += w;
    acc.l2_sum += w * eig;
    acc.l4_sum += w * eig * eig;
    acc.l_used = l;
    if (l > 2 && w * eig * eig < 1e-18 * acc.l4_sum) break;
    if (l > 2000000) throw std::runtime_error("level sum failed to converge");
  }
  return acc;
}

}  // namespace

MomentumBudget avg_momentum(double delta, int n) {
  if (delta <= 0.0) throw std::invalid_argument("delta must be positive");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  const LevelMoments acc = level_moments(delta, n);
  MomentumBudget budget;
  budget.l_used = acc.l_used;
  const double l2 = acc.l2_sum / acc.w_sum;
  budget.lbar_exact = std::sqrt(l2);
  budget.lbar_asymptotic =
      std::sqrt(std::max(0.0, 1.5 / (delta * delta) - 0.25));
  budget.spread = std::sqrt(acc.l4_sum / acc.w_sum) - l2;
  return budget;
}

double momentum_support_fraction(double delta, int n, int l_cap) {
  if (delta <= 0.0) throw std::invalid_argument("delta must be positive");
  const LevelMoments acc = level_moments(delta, n);
  double below = 0.0;
  for (int l = 0; l <= std::min(l_cap, acc.l_used); ++l)
    below += level_weight(delta, n, l);
  return below / acc.w_sum;
}

double delta_for_lbar(double lbar_target, int n) {
  if (lbar_target <= 0.0)
    throw std::invalid_argument("target momentum scale must be positive");
  double lo = 1e-3, hi = 8.0;  // lbar is monotone decreasing in delta
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (avg_momentum(mid, n).lbar_exact > lbar_target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// Heat kernel on SO(3) at diffusion time s:
//   K_s(omega) = sum_l (2l+1)/(8 pi^2) e^{-s l(l+1)} chi_l(omega).
struct HeatKernel {
  std::vector<double> coeff;  // (2l+1) e^{-s l(l+1)} / 8pi^2

  explicit HeatKernel(double s) {
    double scale = 0.0;
    for (int l = 0;; ++l) {
      const double c =
          (2.0 * l + 1.0) * std::exp(-s * l * (l + 1)) / kEightPiSq;
      coeff.push_back(c);
      scale += c * (2.0 * l + 1.0);
      if (l > 2 && c * (2.0 * l + 1.0) < 1e-19 * scale) break;
      if (l > 200000)
        throw std::runtime_error("heat kernel failed to converge");
    }
  }

  double operator()(double omega) const {
    double sum = 0.0;
    for (int l = 0; l < static_cast<int>(coeff.size()); ++l)
      sum += coeff[l] * character_so3(l, omega);
    return sum;
  }
};

}  // namespace

LeakageResult leakage_probability(int n, double delta, int resolution) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (delta <= 0.0 || delta > 0.5)
    throw std::invalid_argument("delta must lie in (0, 0.5]");
  if (resolution < 8) throw std::invalid_argument("resolution too small");

  const int m = 2 * n;  // order of the Voronoi-partitioning subgroup Z_2N
  const HeatKernel half_kernel(0.5 * delta * delta);
  const HeatKernel full_kernel(delta * delta);

  // Comb points (the Z_N orientations) and the state normalization
  // <comb| e^{-delta^2 L^2} |comb> = sum_k K_{delta^2}(angle of k-th element).
  std::vector<Rotation> comb;
  double norm_sum = 0.0;
  for (int h = 0; h < n; ++h) {
    comb.push_back(Rotation::from_axis_angle({0, 0, 1}, 2.0 * kPi * h / n));
    norm_sum += full_kernel(comb.back().angle());
  }

  const auto density = [&](const Rotation& r) {
    double u = 0.0;
    for (const auto& g : comb) u += half_kernel(Rotation::distance(g, r));
    return u * u / (n * norm_sum);
  };

  // Voronoi cell of the j-th Z_2N element is the right translate F * k_j of
  // the identity cell, which in the axis-angle chart is omega < omega_max
  // (Theta).  The density is invariant under conjugation by z-rotations, so
  // the azimuth integral contributes a flat 2 pi.
  const int n_theta = resolution;
  const int n_panels = std::max(6, resolution / 3);
  const int gl_per_panel = 10;
  const auto [tx, tw] = gauss_legendre(n_theta, -1.0, 1.0);

  double mass_even = 0.0, mass_odd = 0.0;
  for (int j = 0; j < m; ++j) {
    const Rotation k_j = Rotation::from_axis_angle({0, 0, 1}, kPi * j / n);
    const bool odd = (j % 2) != 0;
    double cell_mass = 0.0;
    for (int it = 0; it < n_theta; ++it) {
      const double theta = std::acos(tx[it]);
      const double sin_theta = std::sin(theta);
      const double w_max = omega_max(theta, m);
      const Vec3 axis{sin_theta, 0.0, std::cos(theta)};
      for (int p = 0; p < n_panels; ++p) {
        // Smoothstep grading packs panels near both omega = 0 (where the
        // identity-cell peak sits) and omega = omega_max (cell corners).
        const double t0 = static_cast<double>(p) / n_panels;
        const double t1 = static_cast<double>(p + 1) / n_panels;
        const double a = w_max * t0 * t0 * (3.0 - 2.0 * t0);
        const double b = w_max * t1 * t1 * (3.0 - 2.0 * t1);
        const auto [ox, ow] = gauss_legendre(gl_per_panel, a, b);
        for (int io = 0; io < gl_per_panel; ++io) {
          const double omega = ox[io];
          const double half = std::sin(0.5 * omega);
          const Rotation r = Rotation::from_axis_angle(axis, omega) * k_j;
          cell_mass += tw[it] * ow[io] * 4.0 * half * half * density(r);
        }
      }
    }
    cell_mass *= 2.0 * kPi;
    (odd ? mass_odd : mass_even) += cell_mass;
  }

  LeakageResult result;
  result.p_numeric = mass_odd;
  result.p_asymptotic = (delta / std::sqrt(kPi)) / std::sin(kPi / (2.0 * n)) *
                        std::exp(-std::pow(kPi / (2.0 * n * delta), 2));
  result.cell_mass_sum = mass_even + mass_odd;
  result.theta_nodes = n_theta;
  result.omega_panels = n_panels;
  if (std::abs(result.cell_mass_sum - 1.0) > 1e-6)
    throw std::runtime_error("cell quadrature failed to reproduce unit mass");
  return result;
}

DistortionResult distortion(int n, double delta, int l) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (l < 0 || l >= n)
    throw std::invalid_argument("distortion is defined for 0 <= l < n");
  if (delta <= 0.0) throw std::invalid_argument("delta must be positive");

  const int l_cut =
      std::max(static_cast<int>(std::ceil(9.0 / delta)), 3 * n + l + 4);
  const auto damp = [&](int lev) {
    return std::exp(-0.5 * delta * delta * lev * (lev + 1));
  };

  double den = 0.0;
  for (int lp = 0; lp <= l_cut; ++lp) {
    const double d = damp(lp);
    den += (2.0 * lp + 1.0) * (2.0 * (lp / n) + 1.0) * d * d;
  }

  // <0~| D-kick(l,0,0) |1~>: bra level L and ket level lp couple only on the
  // shared m = n = p*n column, with weight sqrt((2lp+1)/(2L+1)) C^2 from the
  // momentum-basis product expansion; the sqrt cancels against the
  // codeword coefficients, leaving (2lp+1) e^{-...} C^2.
  double num = 0.0;
  for (int lp = 0; lp <= l_cut; ++lp) {
    const double ket = (2.0 * lp + 1.0) * damp(lp);
    for (int p = -lp / n; p <= lp / n; ++p) {
      const double sign = (p % 2 == 0) ? 1.0 : -1.0;
      const CGColumn col = clebsch_gordan_column(l, 0, lp, p * n);
      const int L_lo = std::max(std::abs(lp - l), std::abs(p * n));
      const int L_hi = std::min(lp + l, l_cut);
      for (int L = L_lo; L <= L_hi; ++L) {
        const double c = col.at(L);
        num += ket * damp(L) * sign * c * c;
      }
    }
  }

  DistortionResult result;
  result.exact = num / den;
  result.heuristic = 2.0 * (2.0 * l + 1.0) *
                     std::exp(-std::pow(kPi / (2.0 * n * delta), 2));
  result.l_used = l_cut;
  return result;
}

// ---------------------------------------------------------------------------
// Spin-coherent ancilla readout

namespace {

Eigen::VectorXcd ancilla_fiducial(int spin, double eta) {
  Eigen::VectorXcd fid = Eigen::VectorXcd::Zero(2 * spin + 1);
  fid(2 * spin) = std::cos(eta);  // m = +spin
  fid(0) = std::sin(eta);         // m = -spin
  return fid;
}

}  // namespace

AncillaReadout ancilla_position_readout(const Rotation& s_tilde, int spin,
                                        double eta, int grid_resolution) {
  if (spin < 1) throw std::invalid_argument("spin must be at least 1");
  if (!(eta > 0.0 && eta < kPi / 4.0))
    throw std::invalid_argument("eta must lie strictly inside (0, pi/4)");
  if (grid_resolution < 4) throw std::invalid_argument("grid too coarse");

  const int n = spin;  // matched code family: L = N, invariance group Z_2N
  const int m = 2 * n;
  AncillaReadout readout;
  readout.spin = spin;
  readout.eta = eta;

  const Eigen::VectorXcd fid = ancilla_fiducial(spin, eta);
  const auto overlap_with_fid = [&](const Rotation& r) {
    return std::abs((fid.adjoint() * (wigner_D(spin, r) * fid))(0));
  };

  for (int j = 0; j < m; ++j) {
    const Rotation t = Rotation::from_axis_angle({0, 0, 1}, kPi * j / n);
    readout.invariance_min = std::min(readout.invariance_min, overlap_with_fid(t));
  }

  std::mt19937_64 rng(0x616e63u);
  const FiniteSubgroup z2n = build_subgroup(GroupFamily::Cyclic, m);
  for (int trial = 0; trial < 400; ++trial) {
    const Rotation r = haar_sample(rng);
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& t : z2n.elements)
      dist = std::min(dist, Rotation::distance(r, t));
    if (dist < 0.05) continue;  // keep clear of the invariance set
    readout.outside_max = std::max(readout.outside_max, overlap_with_fid(r));
  }

  // Overlap kernel: compare D(S~)|fid> against grid states D(S')|fid> for S'
  // in the fundamental cell; |<S'|S~>| = |<fid| D(S'^{-1} S~) |fid>|.  The
  // distance is taken modulo the invariance group (|S' T> and |S'> are the
  // same physical state), so near-wall aliasing does not masquerade as a
  // long-range overlap.
  const auto coset_distance = [&](const Rotation& a, const Rotation& b) {
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& t : z2n.elements)
      dist = std::min(dist, Rotation::distance(a * t, b));
    return dist;
  };
  const int res = grid_resolution;
  double best = -1.0, best_dist = 0.0;
  for (int it = 0; it < res; ++it) {
    const double ct = -1.0 + (2.0 * it + 1.0) / res;
    const double theta = std::acos(ct);
    const double w_cell = omega_max(theta, m);
    for (int ip = 0; ip < res; ++ip) {
      const double phi = 2.0 * kPi * (ip + 0.5) / res;
      const Vec3 axis{std::sin(theta) * std::cos(phi),
                      std::sin(theta) * std::sin(phi), std::cos(theta)};
      for (int io = 0; io < res; ++io) {
        const double omega = w_cell * (io + 0.5) / res;
        const Rotation s_prime = Rotation::from_axis_angle(axis, omega);
        const double ov = overlap_with_fid(s_prime.inverse() * s_tilde);
        const double dist = coset_distance(s_prime, s_tilde);
        readout.kernel.emplace_back(dist, ov);
        if (ov > best) {
          best = ov;
          best_dist = dist;
        }
      }
    }
  }
  readout.peak_overlap = best;
  readout.peak_distance = best_dist;
  return readout;
}

double spin_coherent_overlap(int spin, const Vec3& v1, const Vec3& v2) {
  if (spin < 1) throw std::invalid_argument("spin must be at least 1");
  const auto rotation_to = [](const Vec3& v) {
    const Vec3 unit = v.normalized();
    const Vec3 zhat{0, 0, 1};
    const Vec3 cross = zhat.cross(unit);
    const double s = cross.norm();
    const double c = unit.z;
    if (s < 1e-14)
      return c > 0.0 ? Rotation::identity()
                     : Rotation::from_axis_angle({1, 0, 0}, kPi);
    return Rotation::from_axis_angle(cross * (1.0 / s), std::atan2(s, c));
  };
  const Rotation rel = rotation_to(v1).inverse() * rotation_to(v2);
  const Complex amp = wigner_D_element(spin, spin, spin, rel);
  return std::norm(amp);
}

}  // namespace rotorcodes
