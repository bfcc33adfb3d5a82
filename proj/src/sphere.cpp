#include "rotorcodes/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rotorcodes {

namespace {

constexpr double kFourPi = 4.0 * kPi;

// Latitude window treated as a cone point; well below any seed spacing used
// by callers but far above rounding noise.
constexpr double kConeTol = 1e-9;

std::complex<double> phase(double angle) {
  return {std::cos(angle), std::sin(angle)};
}

bool same_point(const SpherePoint& a, const SpherePoint& b) {
  return sphere_distance(a, b) <= kPointMatchTol;
}

std::string rotation_label(const Rotation& r) {
  std::ostringstream os;
  os << "X[" << r.str() << "]";
  return os.str();
}

std::string harmonic_label(const SphereKick& k) {
  std::ostringstream os;
  os << "Y^" << k.l << "_" << k.m;
  return os.str();
}

void check_harmonic_indices(int l, int m) {
  if (l < 0 || std::abs(m) > l)
    throw std::invalid_argument("harmonic indices out of range");
}

// Shared construction behind s2_partial_fourier and the codeword builder.
PointState orbit_fourier(const FiniteSubgroup& h, const IrrepTable& table,
                         const SpherePoint& seed, int coset, int irrep, int mu,
                         int nu) {
  if (coset != 0 && coset != 1)
    throw std::invalid_argument("coset index must be 0 or 1");
  if (irrep < 0 || irrep >= table.num_irreps())
    throw std::invalid_argument("irrep index out of range");
  const Irrep& z = table.irreps[irrep];
  if (mu < 0 || mu >= z.dim || nu < 0 || nu >= z.dim)
    throw std::invalid_argument("irrep matrix indices out of range");

  const Vec3 v = seed.to_vec();
  std::vector<PointTerm> terms;
  std::vector<PointTerm> footprint;
  terms.reserve(h.order());
  footprint.reserve(h.order());
  for (int e = 0; e < h.order(); ++e) {
    const SpherePoint p = sphere_point_from_vec(h.elements[e].apply(v));
    terms.push_back({p, z.matrix(e)(mu, nu)});
    footprint.push_back({p, 1.0});
  }
  PointState state = make_point_state(std::move(terms));

  // Orbit size = number of distinct points of {h seed}, counted with unit
  // weights so that amplitude cancellations cannot skew it; the prefactor
  // sqrt(d |orbit|)/|H| makes free-orbit states unit norm.
  const int orbit_size =
      static_cast<int>(make_point_state(std::move(footprint)).size());
  const double prefactor =
      std::sqrt(static_cast<double>(z.dim) * orbit_size) / h.order();
  for (auto& term : state.terms) term.amplitude *= prefactor;
  merge_point_terms(state);

  if (coset == 1) state = apply_parity(state);

  const double n = norm(state);
  if (n <= 1e-9)
    throw std::invalid_argument(
        "the seed's stabilizer annihilates this irrep element");
  if (std::abs(n - 1.0) > 1e-6)
    throw std::invalid_argument(
        "the seed's stabilizer does not preserve this irrep element; use a "
        "free orbit or a stabilizer-adapted combination");
  return state;
}

double pow_int(double x, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= x;
  return out;
}

// K-symmetric quartic harmonic of the tetrahedral family, normalized to
// value 1 at the cube corners cos^2(theta) = 1/3, phi = pi/4 + k pi/2.
double tetrahedral_check_value(const SpherePoint& p) {
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  return (3.0 / 16.0) *
         (30.0 * c * c - 35.0 * c * c * c * c -
          5.0 * s * s * s * s * std::cos(4.0 * p.phi) - 3.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Points

Vec3 SpherePoint::to_vec() const {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

SpherePoint SpherePoint::canonical() const {
  return sphere_point_from_vec(to_vec());
}

SpherePoint sphere_point_from_vec(const Vec3& v) {
  const double n = v.norm();
  if (n == 0.0)
    throw std::invalid_argument("cannot project the zero vector to a point");
  const double rho = std::sqrt(v.x * v.x + v.y * v.y);
  SpherePoint p;
  p.theta = std::atan2(rho, v.z);
  p.phi = rho / n <= 1e-15 ? 0.0 : std::atan2(v.y, v.x);
  if (p.phi <= -kPi) p.phi = kPi;
  return p;
}

double sphere_distance(const SpherePoint& a, const SpherePoint& b) {
  return (a.to_vec() - b.to_vec()).norm();
}

// ---------------------------------------------------------------------------
// Point states

PointState make_point_state(std::vector<PointTerm> terms) {
  PointState state;
  state.terms = std::move(terms);
  for (auto& term : state.terms) term.point = term.point.canonical();
  merge_point_terms(state);
  return state;
}

void merge_point_terms(PointState& state, double drop_tol) {
  std::vector<PointTerm> merged;
  merged.reserve(state.terms.size());
  for (const auto& term : state.terms) {
    bool found = false;
    for (auto& kept : merged) {
      if (same_point(kept.point, term.point)) {
        kept.amplitude += term.amplitude;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(term);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [&](const PointTerm& t) {
                                return std::abs(t.amplitude) <= drop_tol;
                              }),
               merged.end());
  state.terms = std::move(merged);
}

double norm(const PointState& state) {
  double sum = 0.0;
  for (const auto& term : state.terms) sum += std::norm(term.amplitude);
  return std::sqrt(sum);
}

PointState normalized(const PointState& state) {
  const double n = norm(state);
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero state");
  PointState out = state;
  for (auto& term : out.terms) term.amplitude /= n;
  return out;
}

Complex inner(const PointState& a, const PointState& b) {
  Complex sum = 0.0;
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      if (same_point(ta.point, tb.point)) {
        sum += std::conj(ta.amplitude) * tb.amplitude;
        break;
      }
    }
  }
  return sum;
}

PointState operator+(const PointState& a, const PointState& b) {
  std::vector<PointTerm> terms = a.terms;
  terms.insert(terms.end(), b.terms.begin(), b.terms.end());
  return make_point_state(std::move(terms));
}

PointState operator-(const PointState& a, const PointState& b) {
  return a + (Complex(-1.0) * b);
}

PointState operator*(const Complex& scale, const PointState& state) {
  PointState out = state;
  for (auto& term : out.terms) term.amplitude *= scale;
  merge_point_terms(out);
  return out;
}

PointState apply_rotation(const PointState& state, const Rotation& r) {
  std::vector<PointTerm> terms;
  terms.reserve(state.terms.size());
  for (const auto& term : state.terms)
    terms.push_back(
        {sphere_point_from_vec(r.apply(term.point.to_vec())), term.amplitude});
  return make_point_state(std::move(terms));
}

PointState apply_parity(const PointState& state) {
  std::vector<PointTerm> terms;
  terms.reserve(state.terms.size());
  for (const auto& term : state.terms)
    terms.push_back(
        {sphere_point_from_vec(-term.point.to_vec()), term.amplitude});
  return make_point_state(std::move(terms));
}

PointState apply_harmonic(const PointState& state, int l, int m) {
  check_harmonic_indices(l, m);
  PointState out = state;
  for (auto& term : out.terms)
    term.amplitude *=
        spherical_harmonic(l, m, term.point.theta, term.point.phi);
  merge_point_terms(out);
  return out;
}

PointState apply_harmonic_adjoint(const PointState& state, int l, int m) {
  check_harmonic_indices(l, m);
  PointState out = state;
  for (auto& term : out.terms)
    term.amplitude *= std::conj(
        spherical_harmonic(l, m, term.point.theta, term.point.phi));
  merge_point_terms(out);
  return out;
}

// ---------------------------------------------------------------------------
// Momentum states

SphereMomentumState zero_sphere_momentum(int L_max) {
  if (L_max < 0) throw std::invalid_argument("L_max must be non-negative");
  SphereMomentumState state;
  state.L_max = L_max;
  state.blocks.reserve(L_max + 1);
  for (int l = 0; l <= L_max; ++l)
    state.blocks.push_back(Eigen::VectorXcd::Zero(2 * l + 1));
  return state;
}

double norm(const SphereMomentumState& state) {
  double sum = 0.0;
  for (const auto& block : state.blocks) sum += block.squaredNorm();
  return std::sqrt(sum);
}

Complex inner(const SphereMomentumState& a, const SphereMomentumState& b) {
  Complex sum = 0.0;
  const int L = std::min(a.L_max, b.L_max);
  for (int l = 0; l <= L; ++l) sum += a.blocks[l].dot(b.blocks[l]);
  return sum;
}

SphereMomentumProjection point_to_momentum(const PointState& state, int L_max,
                                           double delta, bool normalize) {
  if (delta < 0.0) throw std::invalid_argument("delta must be non-negative");
  SphereMomentumProjection result;
  result.state = zero_sphere_momentum(L_max);

  double abs_amp_sum = 0.0;
  for (const auto& term : state.terms) abs_amp_sum += std::abs(term.amplitude);

  double captured = 0.0;
  for (int l = 0; l <= L_max; ++l) {
    const double damp = std::exp(-0.5 * delta * delta * l * (l + 1));
    if (damp == 0.0) break;
    Eigen::VectorXcd& block = result.state.blocks[l];
    for (const auto& term : state.terms)
      for (int m = -l; m <= l; ++m)
        block[m + l] +=
            term.amplitude *
            std::conj(
                spherical_harmonic(l, m, term.point.theta, term.point.phi));
    block *= damp;
    captured += block.squaredNorm();
  }

  if (delta == 0.0) {
    result.tail_mass_bound = std::numeric_limits<double>::quiet_NaN();
  } else {
    // |c^l_m| <= sqrt((2l+1)/4pi) (sum_v |amp|) damp(l), so the l-level mass
    // is at most (2l+1)^2 / 4pi (sum |amp|)^2 damp(l)^2.
    double tail = 0.0;
    const double scale = abs_amp_sum * abs_amp_sum / kFourPi;
    for (int l = L_max + 1;; ++l) {
      const double d = 2.0 * l + 1.0;
      const double term =
          scale * d * d * std::exp(-delta * delta * l * (l + 1));
      tail += term;
      if (term < 1e-22 * (captured + tail) || l > L_max + 4000) break;
    }
    result.tail_mass_bound =
        captured > 0.0 ? tail / captured
                       : std::numeric_limits<double>::infinity();
  }

  if (normalize) {
    const double n = std::sqrt(captured);
    if (n == 0.0)
      throw std::invalid_argument("state has no mass below the truncation");
    for (auto& block : result.state.blocks) block /= n;
  }
  return result;
}

int default_sphere_momentum_cutoff(double delta) {
  if (delta <= 0.0) throw std::invalid_argument("delta must be positive");
  return static_cast<int>(std::ceil(6.0 / delta));
}

SphereMomentumState apply_rotation(const SphereMomentumState& state,
                                   const Rotation& r) {
  SphereMomentumState out = zero_sphere_momentum(state.L_max);
  for (int l = 0; l <= state.L_max; ++l)
    out.blocks[l] = wigner_D(l, r).conjugate() * state.blocks[l];
  return out;
}

SphereMomentumState apply_parity(const SphereMomentumState& state) {
  SphereMomentumState out = state;
  for (int l = 1; l <= state.L_max; l += 2) out.blocks[l] *= -1.0;
  return out;
}

SphereKickResult apply_harmonic(const SphereMomentumState& state, int l, int m,
                                int L_max_out) {
  check_harmonic_indices(l, m);
  if (L_max_out < 0) L_max_out = state.L_max + l;
  SphereKickResult result;
  result.state = zero_sphere_momentum(L_max_out);

  for (int lp = 0; lp <= state.L_max; ++lp) {
    const Eigen::VectorXcd& block = state.blocks[lp];
    for (int mp = -lp; mp <= lp; ++mp) {
      const Complex c = block[mp + lp];
      if (c == Complex(0.0)) continue;
      const int M = m + mp;
      const CGColumn col_m = clebsch_gordan_column(l, m, lp, mp);
      const CGColumn col_0 = clebsch_gordan_column(l, 0, lp, 0);
      for (int L = std::abs(l - lp); L <= l + lp; ++L) {
        if (std::abs(M) > L) continue;
        const double coeff =
            std::sqrt((2.0 * l + 1.0) * (2.0 * lp + 1.0) /
                      (kFourPi * (2.0 * L + 1.0))) *
            col_m.at(L) * col_0.at(L);
        if (coeff == 0.0) continue;
        const Complex value = coeff * c;
        if (L <= L_max_out)
          result.state.blocks[L][M + L] += value;
        else
          result.dropped_mass += std::norm(value);
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Codes

SphereCode build_sphere_code(const std::string& family) {
  SphereCode code;
  if (family == "T") {
    code.family = "T";
    code.h = build_subgroup("T");
    code.seed = {std::acos(1.0 / std::sqrt(3.0)), kPi / 4.0};
  } else if (!family.empty() && family[0] == 'Z') {
    int n = 0;
    try {
      std::size_t pos = 0;
      n = std::stoi(family.substr(1), &pos);
      if (pos + 1 != family.size()) n = 0;
    } catch (const std::exception&) {
      n = 0;
    }
    if (n < 1)
      throw std::invalid_argument("unknown code family: " + family);
    if (n % 2 == 0)
      throw std::invalid_argument(
          "even cyclic order: the constituent antipodes would fall on the "
          "same codeword, so parity could not act as the logical flip");
    code.family = family;
    code.h = build_subgroup(family);
    code.seed = {kPi / 2.0, 0.0};
  } else {
    throw std::invalid_argument("unknown code family: " + family);
  }

  code.h_irreps = irrep_table(code.h);
  for (int r = 0; r < 2; ++r) {
    code.codewords.push_back(orbit_fourier(code.h, code.h_irreps, code.seed, r,
                                           code.h_irreps.trivial_index(), 0,
                                           0));
    std::vector<SpherePoint> points;
    for (const auto& term : code.codewords.back().terms)
      points.push_back(term.point);
    code.constituents.push_back(std::move(points));
  }
  return code;
}

// ---------------------------------------------------------------------------
// Error-correction condition check

std::vector<SphereKick> sphere_kicks_up_to(int l_max) {
  std::vector<SphereKick> kicks;
  for (int l = 0; l <= l_max; ++l)
    for (int m = -l; m <= l; ++m) kicks.push_back({l, m});
  return kicks;
}

KLReport kl_check(const SphereCode& code,
                  const std::vector<Rotation>& rotations,
                  const std::vector<SphereKick>& kicks, bool include_combined,
                  double tol) {
  // Materialize E|r> for every error E and codeword r; then
  // <r|E^dag E'|r'> = <E r|E' r'> regardless of whether E is unitary.
  std::vector<std::string> labels;
  std::vector<std::vector<PointState>> images;

  labels.push_back("I");
  images.push_back(code.codewords);
  for (const auto& r : rotations) {
    labels.push_back(rotation_label(r));
    std::vector<PointState> row;
    for (const auto& word : code.codewords)
      row.push_back(apply_rotation(word, r));
    images.push_back(std::move(row));
  }
  for (const auto& kick : kicks) {
    labels.push_back(harmonic_label(kick));
    std::vector<PointState> row;
    for (const auto& word : code.codewords)
      row.push_back(apply_harmonic(word, kick.l, kick.m));
    images.push_back(std::move(row));
  }
  if (include_combined) {
    for (const auto& r : rotations) {
      for (const auto& kick : kicks) {
        labels.push_back(rotation_label(r) + " " + harmonic_label(kick));
        std::vector<PointState> row;
        for (const auto& word : code.codewords)
          row.push_back(
              apply_rotation(apply_harmonic(word, kick.l, kick.m), r));
        images.push_back(std::move(row));
      }
    }
  }

  KLReport report;
  report.tolerance = tol;
  const int n_err = static_cast<int>(images.size());
  const int d = static_cast<int>(code.codewords.size());
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
// Check operators

double check_function_value(const SphereCode& code, const SpherePoint& p) {
  const SpherePoint q = p.canonical();
  if (code.family == "T") return tetrahedral_check_value(q);
  const int n = code.h.order();
  return std::cos(2.0 * n * q.phi) * pow_int(std::sin(q.theta), 2 * n);
}

double tetrahedral_logical_z_value(const SpherePoint& p) {
  const SpherePoint q = p.canonical();
  const double s = std::sin(q.theta);
  return 1.5 * std::sqrt(3.0) * s * s * std::cos(q.theta) *
         std::sin(2.0 * q.phi);
}

SphereCheckCertificate check_operators(const SphereCode& code) {
  SphereCheckCertificate cert;
  cert.family = code.family;

  auto averaged_rotation_residual = [&](const Rotation& r) {
    double worst = 0.0;
    for (const auto& word : code.codewords) {
      const PointState image =
          Complex(0.5) * (apply_rotation(word, r) +
                          apply_rotation(word, r.inverse()));
      worst = std::max(worst, norm(image - word));
    }
    return worst;
  };

  for (int r = 0; r < 2; ++r)
    for (const auto& p : code.constituents[r])
      cert.sz_constituent_deviation =
          std::max(cert.sz_constituent_deviation,
                   std::abs(check_function_value(code, p) - 1.0));

  const Vec3 z_axis{0.0, 0.0, 1.0};
  if (code.family == "T") {
    const Rotation diag = Rotation::from_axis_angle(
        code.seed.to_vec(), 2.0 * kPi / 3.0);
    cert.sx_codeword_residual = averaged_rotation_residual(diag);

    const Rotation half_turn = Rotation::from_axis_angle(z_axis, kPi);
    for (const auto& word : code.codewords)
      cert.sx2_codeword_residual = std::max(
          cert.sx2_codeword_residual, norm(apply_rotation(word, half_turn) - word));

    for (int r = 0; r < 2; ++r) {
      const double target = r == 0 ? 1.0 : -1.0;
      for (const auto& p : code.constituents[r])
        cert.logical_z_constituent_deviation =
            std::max(cert.logical_z_constituent_deviation,
                     std::abs(tetrahedral_logical_z_value(p) - target));
    }
    return cert;
  }

  const int n = code.h.order();
  cert.n = n;
  const Rotation stab = Rotation::from_axis_angle(z_axis, 2.0 * kPi / n);
  cert.sx_codeword_residual = averaged_rotation_residual(stab);

  const Complex inv_sqrt2(1.0 / std::sqrt(2.0));
  for (int sign : {+1, -1}) {
    const PointState x_word =
        inv_sqrt2 * (code.codewords[0] +
                     Complex(static_cast<double>(sign)) * code.codewords[1]);
    const PointState image =
        Complex(0.5) * (apply_rotation(x_word, stab) +
                        apply_rotation(x_word, stab.inverse()));
    cert.x_basis_sx_residual =
        std::max(cert.x_basis_sx_residual, norm(image - x_word));
  }

  const Rotation logical_x = Rotation::from_axis_angle(z_axis, kPi / n);
  cert.logical_x_residual =
      std::max(norm(apply_rotation(code.codewords[0], logical_x) -
                    code.codewords[1]),
               norm(apply_rotation(code.codewords[1], logical_x) -
                    code.codewords[0]));

  const Complex z_scale = spherical_harmonic(n, n, kPi / 2.0, 0.0);
  const Complex id_scale = spherical_harmonic(2 * n, 2 * n, kPi / 2.0, 0.0);
  for (int r = 0; r < 2; ++r) {
    const Complex target = r == 0 ? z_scale : -z_scale;
    cert.logical_z_residual =
        std::max(cert.logical_z_residual,
                 norm(apply_harmonic(code.codewords[r], n, n) -
                      target * code.codewords[r]));
    cert.identity_kick_residual =
        std::max(cert.identity_kick_residual,
                 norm(apply_harmonic(code.codewords[r], 2 * n, 2 * n) -
                      id_scale * code.codewords[r]));
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Twirled harmonics

Eigen::VectorXcd twirl_harmonic(int l, int m, const FiniteSubgroup& h,
                                bool include_parity) {
  check_harmonic_indices(l, m);
  Eigen::VectorXcd coeff = Eigen::VectorXcd::Zero(2 * l + 1);
  for (const auto& element : h.elements)
    coeff += wigner_D(l, element).conjugate().col(m + l);
  coeff /= h.order();
  // Parity conjugates Yhat^l_p into (-1)^l Yhat^l_p, so extending the average
  // over H x Z2^P multiplies by (1 + (-1)^l)/2.
  if (include_parity && l % 2 == 1) coeff.setZero();
  return coeff;
}

Complex harmonic_sum_value(const Eigen::VectorXcd& coeff, int l,
                           const SpherePoint& p) {
  if (coeff.size() != 2 * l + 1)
    throw std::invalid_argument("coefficient vector has the wrong length");
  Complex sum = 0.0;
  for (int q = -l; q <= l; ++q)
    sum += coeff[q + l] * spherical_harmonic(l, q, p.theta, p.phi);
  return sum;
}

// ---------------------------------------------------------------------------
// Spherical designs

DesignReport is_spherical_design(const std::vector<SpherePoint>& points, int L,
                                 double tol) {
  if (points.empty())
    throw std::invalid_argument("a design needs at least one point");
  if (L < 0) throw std::invalid_argument("L must be non-negative");

  DesignReport report;
  report.L = L;
  report.tolerance = tol;
  report.residual_by_l.assign(L + 1, 0.0);

  for (int l = 0; l <= L; ++l) {
    double worst = 0.0;
    for (int m = -l; m <= l; ++m) {
      Complex mean = 0.0;
      for (const auto& p : points)
        mean += spherical_harmonic(l, m, p.theta, p.phi);
      mean /= static_cast<double>(points.size());
      const Complex target =
          l == 0 && m == 0 ? Complex(1.0 / std::sqrt(kFourPi)) : Complex(0.0);
      worst = std::max(worst, std::abs(mean - target));
    }
    report.residual_by_l[l] = worst;
    if (l >= 1 && worst > tol && report.first_violation_l < 0)
      report.first_violation_l = l;
  }
  report.is_design = report.first_violation_l < 0;
  return report;
}

// ---------------------------------------------------------------------------
// Partial Fourier basis and recovery

PointState s2_partial_fourier(const SphereCode& code, const SpherePoint& seed,
                              int coset, int irrep, int mu, int nu) {
  return orbit_fourier(code.h, code.h_irreps, seed, coset, irrep, mu, nu);
}

LuneDecomposition snap_to_lune(const SpherePoint& p, int n) {
  if (n < 1) throw std::invalid_argument("cyclic order must be positive");
  const SpherePoint q = p.canonical();
  LuneDecomposition out;

  if (q.theta <= kConeTol || q.theta >= kPi - kConeTol) {
    out.cone = true;
    out.seed = {q.theta <= kConeTol ? 0.0 : kPi, 0.0};
    return out;
  }

  // Reduce the longitude modulo the rotation step into (-pi/2n, 3pi/2n];
  // the first half of that window is the fundamental lune (coset 0), the
  // second half belongs to antipodal branches (coset 1).
  const double step = 2.0 * kPi / n;
  const double half = kPi / (2.0 * n);
  double y = q.phi - step * std::floor((q.phi + half) / step);
  if (y - (-half) < 1e-12) y += step;

  const auto wrap = [&](double turns) {
    const int h = static_cast<int>(std::llround(turns)) % n;
    return h < 0 ? h + n : h;
  };
  if (y <= half + 1e-12) {
    out.seed = {q.theta, y};
    out.h = wrap((q.phi - y) / step);
  } else {
    out.coset = 1;
    out.seed = {kPi - q.theta, y - kPi / n};
    out.h = wrap((q.phi - out.seed.phi - kPi) / step);
  }
  return out;
}

SphereRecoveryOutcome apply_sphere_recovery(const SphereCode& code,
                                            const PointState& state) {
  if (code.family == "T")
    throw std::invalid_argument(
        "recovery is implemented for the cyclic family; the tetrahedral "
        "orbit basis is exposed via s2_partial_fourier");
  const int n = code.h.order();

  // Group the support by orbit anchor; cone points stand alone.
  struct Bucket {
    SpherePoint seed;
    bool cone = false;
    PointState part;
  };
  std::vector<Bucket> buckets;
  for (const auto& term : state.terms) {
    const LuneDecomposition snap = snap_to_lune(term.point, n);
    bool found = false;
    for (auto& bucket : buckets) {
      if (bucket.cone == snap.cone && same_point(bucket.seed, snap.seed)) {
        bucket.part.terms.push_back(term);
        found = true;
        break;
      }
    }
    if (!found) buckets.push_back({snap.seed, snap.cone, {{term}}});
  }

  const Complex inv_sqrt2(1.0 / std::sqrt(2.0));
  const PointState cone_target =
      inv_sqrt2 * (code.codewords[0] + code.codewords[1]);

  SphereRecoveryOutcome outcome;
  for (const auto& bucket : buckets) {
    if (bucket.cone) {
      const double p = norm(bucket.part);
      if (p * p <= 1e-15) continue;
      outcome.branches.push_back(
          {bucket.seed, 0, true, p * p, cone_target});
      continue;
    }
    for (int lambda = 0; lambda < n; ++lambda) {
      Complex amp0 = 0.0, amp1 = 0.0;
      // <coset, seed; lambda | state>, support restricted to this orbit.
      amp0 = inner(s2_partial_fourier(code, bucket.seed, 0, lambda),
                   bucket.part);
      amp1 = inner(s2_partial_fourier(code, bucket.seed, 1, lambda),
                   bucket.part);
      const double p = std::norm(amp0) + std::norm(amp1);
      if (p <= 1e-15) continue;
      const PointState post = normalized(amp0 * code.codewords[0] +
                                         amp1 * code.codewords[1]);
      outcome.branches.push_back({bucket.seed, lambda, false, p, post});
    }
  }
  return outcome;
}

}  // namespace rotorcodes
