#include "rotorcodes/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace rotorcodes {

namespace {

constexpr int kMaxFactorial = 400;

const long double* factorials() {
  static const auto table = [] {
    auto t = new long double[kMaxFactorial + 1];
    t[0] = 1.0L;
    for (int i = 1; i <= kMaxFactorial; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table;
}

bool cg_selection_ok(int l1, int m1, int l2, int m2, int L, int M) {
  if (l1 < 0 || l2 < 0 || L < 0) return false;
  if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(M) > L) return false;
  if (m1 + m2 != M) return false;
  if (L < std::abs(l1 - l2) || L > l1 + l2) return false;
  return true;
}

// Three-term recursion coefficients for the 3j column w(L) =
// (l1 l2 L; m1 m2 -M):  L X(L+1) w(L+1) + Y(L) w(L) + (L+1) X(L) w(L-1) = 0.
double rec_X(int l1, int l2, int M, int L) {
  const double a = static_cast<double>(L) * L - static_cast<double>(l1 - l2) * (l1 - l2);
  const double b = static_cast<double>(l1 + l2 + 1) * (l1 + l2 + 1) -
                   static_cast<double>(L) * L;
  const double c = static_cast<double>(L) * L - static_cast<double>(M) * M;
  return std::sqrt(std::max(0.0, a * b * c));
}

double rec_Y(int l1, int m1, int l2, int m2, int M, int L) {
  const double axial = static_cast<double>(M) *
                       (static_cast<double>(l1) * (l1 + 1) - static_cast<double>(l2) * (l2 + 1));
  return (2.0 * L + 1.0) *
         (axial - static_cast<double>(m1 - m2) * L * (L + 1));
}

void rescale_if_large(std::vector<double>& w, int upto) {
  double peak = 0.0;
  for (int i = 0; i <= upto; ++i) peak = std::max(peak, std::abs(w[i]));
  if (peak > 1e250) {
    for (int i = 0; i <= upto; ++i) w[i] /= peak;
  }
}

}  // namespace

double wigner_small_d(int l, int m, int n, double beta) {
  if (l < 0 || std::abs(m) > l || std::abs(n) > l) return 0.0;
  const long double* f = factorials();
  const long double c = std::cos(static_cast<long double>(beta) / 2);
  const long double s = std::sin(static_cast<long double>(beta) / 2);
  const long double pref =
      std::sqrt(f[l + m] * f[l - m] * f[l + n] * f[l - n]);
  const int smin = std::max(0, n - m);
  const int smax = std::min(l + n, l - m);
  long double sum = 0.0L;
  for (int k = smin; k <= smax; ++k) {
    const long double denom = f[l + n - k] * f[k] * f[m - n + k] * f[l - m - k];
    long double term = std::pow(c, 2 * l + n - m - 2 * k) *
                       std::pow(s, m - n + 2 * k) / denom;
    if ((m - n + k) & 1) term = -term;
    sum += term;
  }
  return static_cast<double>(pref * sum);
}

Complex wigner_D_element(int l, int m, int n, const EulerZYZ& e) {
  const double d = wigner_small_d(l, m, n, e.beta);
  return std::polar(d, m * e.alpha + n * e.gamma);
}

Complex wigner_D_element(int l, int m, int n, const Rotation& r) {
  return wigner_D_element(l, m, n, r.to_euler_zyz());
}

Eigen::MatrixXcd wigner_D(int l, const Rotation& r) {
  const EulerZYZ e = r.to_euler_zyz();
  Eigen::MatrixXcd out(2 * l + 1, 2 * l + 1);
  for (int m = -l; m <= l; ++m) {
    const Complex pm = std::polar(1.0, m * e.alpha);
    for (int n = -l; n <= l; ++n) {
      out(m + l, n + l) =
          pm * std::polar(wigner_small_d(l, m, n, e.beta), n * e.gamma);
    }
  }
  return out;
}

double character_so3(int l, double omega) {
  if (l < 0) throw std::invalid_argument("character_so3 requires l >= 0");
  const double half = omega / 2;
  const double denom = std::sin(half);
  if (std::abs(denom) < 1e-7) {
    // Exact cosine-sum form near the removable singularities.
    double sum = 1.0;
    for (int m = 1; m <= l; ++m) sum += 2.0 * std::cos(m * omega);
    return sum;
  }
  return std::sin((2 * l + 1) * half) / denom;
}

CGColumn clebsch_gordan_column(int l1, int m1, int l2, int m2) {
  CGColumn col;
  if (l1 < 0 || l2 < 0 || std::abs(m1) > l1 || std::abs(m2) > l2) return col;
  const int M = m1 + m2;
  const int lmin = std::max(std::abs(l1 - l2), std::abs(M));
  const int lmax = l1 + l2;
  const int count = lmax - lmin + 1;
  col.l_min = lmin;
  col.values.assign(count, 0.0);
  const double phase = ((l1 - l2 + M) & 1) ? -1.0 : 1.0;
  if (count == 1) {
    // Lone coupling channel: |C| = 1 by completeness, + sign by convention.
    col.values[0] = 1.0;
    return col;
  }

  auto X = [&](int L) { return rec_X(l1, l2, M, L); };
  auto Y = [&](int L) { return rec_Y(l1, m1, l2, m2, M, L); };
  auto idx = [&](int L) { return L - lmin; };

  // Downward sweep from lmax; the w(lmax+1) coefficient vanishes
  // identically, so the start relation is two-term.
  std::vector<double> w(count, 0.0);
  w[idx(lmax)] = 1.0;
  w[idx(lmax - 1)] = -Y(lmax) * w[idx(lmax)] / ((lmax + 1.0) * X(lmax));
  for (int L = lmax - 1; L >= lmin + 1; --L) {
    w[idx(L - 1)] =
        -(L * X(L + 1) * w[idx(L + 1)] + Y(L) * w[idx(L)]) / ((L + 1.0) * X(L));
    rescale_if_large(w, count - 1);
  }
  int peak = 0;
  for (int i = 1; i < count; ++i) {
    if (std::abs(w[i]) > std::abs(w[peak])) peak = i;
  }
  // Upward sweep toward the matching point rescues accuracy in the lower
  // classically-forbidden region; its start relation is two-term as well
  // (the w(lmin-1) coefficient vanishes).  lmin = 0 forces l1 = l2, M = 0,
  // where that relation degenerates to 0 = 0; the downward sweep alone
  // is then kept.
  if (lmin > 0 && peak > 0) {
    std::vector<double> up(peak + 1, 0.0);
    up[0] = 1.0;
    if (peak >= 1) {
      up[1] = -Y(lmin) * up[0] / (lmin * X(lmin + 1));
      for (int L = lmin + 1; L + 1 <= lmin + peak; ++L) {
        up[idx(L + 1)] =
            -(Y(L) * up[idx(L)] + (L + 1.0) * X(L) * up[idx(L - 1)]) /
            (L * X(L + 1));
        rescale_if_large(up, idx(L + 1));
      }
    }
    if (up[peak] != 0.0) {
      const double scale = w[peak] / up[peak];
      for (int i = 0; i < peak; ++i) w[i] = up[i] * scale;
    }
  }
  // Normalize by the sum rule and fix the overall sign so C(lmax) > 0.
  double norm = 0.0;
  for (int L = lmin; L <= lmax; ++L) {
    norm += (2.0 * L + 1.0) * w[idx(L)] * w[idx(L)];
  }
  double s = 1.0 / std::sqrt(norm);
  if (w[idx(lmax)] * phase < 0.0) s = -s;
  for (int L = lmin; L <= lmax; ++L) {
    col.values[idx(L)] = phase * std::sqrt(2.0 * L + 1.0) * w[idx(L)] * s;
  }
  return col;
}

double clebsch_gordan(int l1, int m1, int l2, int m2, int L, int M) {
  if (!cg_selection_ok(l1, m1, l2, m2, L, M)) return 0.0;
  return clebsch_gordan_column(l1, m1, l2, m2).at(L);
}

double clebsch_gordan_exact(int l1, int m1, int l2, int m2, int L, int M) {
  if (!cg_selection_ok(l1, m1, l2, m2, L, M)) return 0.0;
  using Int = boost::multiprecision::cpp_int;
  using Rat = boost::multiprecision::cpp_rational;
  auto fact = [](int k) {
    Int v = 1;
    for (int i = 2; i <= k; ++i) v *= i;
    return v;
  };
  // Finite-sum form: C = sqrt(pref) * S with pref an exact rational and S an
  // exact rational alternating sum.
  Rat pref(Int(2 * L + 1));
  pref *= Rat(fact(l1 + l2 - L) * fact(l1 - l2 + L) * fact(-l1 + l2 + L),
              fact(l1 + l2 + L + 1));
  pref *= Rat(fact(L + M) * fact(L - M) * fact(l1 + m1) * fact(l1 - m1) *
              fact(l2 + m2) * fact(l2 - m2));
  Rat S(0);
  const int zmin = std::max({0, l2 - L - m1, l1 - L + m2});
  const int zmax = std::min({l1 + l2 - L, l1 - m1, l2 + m2});
  for (int z = zmin; z <= zmax; ++z) {
    Rat term(Int(1), fact(z) * fact(l1 + l2 - L - z) * fact(l1 - m1 - z) *
                         fact(l2 + m2 - z) * fact(L - l2 + m1 + z) *
                         fact(L - l1 - m2 + z));
    S += (z & 1) ? -term : term;
  }
  // C^2 = pref * S^2 exactly; one rounding to double at the end.
  const double value = std::sqrt(static_cast<double>(pref * S * S));
  return S < 0 ? -value : value;
}

std::vector<ProductTerm> d_product_expand(int l, int m, int n, int lp, int mp,
                                          int np) {
  const CGColumn cm = clebsch_gordan_column(l, m, lp, mp);
  const CGColumn cn = clebsch_gordan_column(l, n, lp, np);
  std::vector<ProductTerm> terms;
  const int lo = std::max(cm.l_min, cn.l_min);
  for (int L = lo; L <= l + lp; ++L) {
    terms.push_back({L, cm.at(L) * cn.at(L)});
  }
  return terms;
}

Complex spherical_harmonic(int l, int m, double theta, double phi) {
  if (l < 0 || std::abs(m) > l) return 0.0;
  const double scale = std::sqrt((2 * l + 1) / (4.0 * kPi));
  return std::polar(scale * wigner_small_d(l, m, 0, theta), m * phi);
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n,
                                                                   double a,
                                                                   double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre requires n >= 1");
  std::vector<double> x(n), w(n);
  // Newton iteration on P_n over [-1, 1]; nodes are symmetric.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / pp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    const double wi = 2.0 / ((1.0 - t * t) * pp * pp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  // Affine map to [a, b].
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    x[i] = mid + half * x[i];
    w[i] *= half;
  }
  return {x, w};
}

QuadratureRule so3_quadrature(int band_limit) {
  if (band_limit < 0) throw std::invalid_argument("band limit must be >= 0");
  const int na = 2 * band_limit + 1;
  const int nb = band_limit + 1;
  const auto [xb, wb] = gauss_legendre(nb, -1.0, 1.0);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(na) * na * nb);
  rule.weights.reserve(rule.nodes.capacity());
  const double wa = 2.0 * kPi / na;
  for (int ia = 0; ia < na; ++ia) {
    const double alpha = 2.0 * kPi * ia / na;
    for (int ib = 0; ib < nb; ++ib) {
      const double beta = std::acos(std::clamp(xb[ib], -1.0, 1.0));
      for (int ig = 0; ig < na; ++ig) {
        const double gamma = 2.0 * kPi * ig / na;
        rule.nodes.push_back(Rotation::from_euler_zyz(alpha, beta, gamma));
        rule.weights.push_back(wa * wa * wb[ib]);
      }
    }
  }
  return rule;
}

QuadratureRule so3_axis_angle_quadrature(int n_theta, int n_phi, int n_omega) {
  const auto [xt, wt] = gauss_legendre(n_theta, -1.0, 1.0);
  const auto [xo, wo] = gauss_legendre(n_omega, 0.0, kPi);
  QuadratureRule rule;
  const double wp = 2.0 * kPi / n_phi;
  for (int it = 0; it < n_theta; ++it) {
    const double st = std::sqrt(std::max(0.0, 1.0 - xt[it] * xt[it]));
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = 2.0 * kPi * ip / n_phi;
      const Vec3 axis{st * std::cos(phi), st * std::sin(phi), xt[it]};
      for (int io = 0; io < n_omega; ++io) {
        const double half = std::sin(xo[io] / 2);
        rule.nodes.push_back(Rotation::from_axis_angle(axis, xo[io]));
        rule.weights.push_back(4.0 * half * half * wt[it] * wp * wo[io]);
      }
    }
  }
  return rule;
}

SphereQuadrature sphere_quadrature(int band_limit) {
  if (band_limit < 0) throw std::invalid_argument("band limit must be >= 0");
  const int np = 2 * band_limit + 1;
  const int nt = band_limit + 1;
  const auto [xt, wt] = gauss_legendre(nt, -1.0, 1.0);
  SphereQuadrature q;
  const double wp = 2.0 * kPi / np;
  for (int it = 0; it < nt; ++it) {
    for (int ip = 0; ip < np; ++ip) {
      q.theta.push_back(std::acos(std::clamp(xt[it], -1.0, 1.0)));
      q.phi.push_back(2.0 * kPi * ip / np);
      q.weights.push_back(wt[it] * wp);
    }
  }
  return q;
}

PoissonReport poisson_gaussian_sum(double delta, double center) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("poisson_gaussian_sum requires delta > 0");
  }
  PoissonReport rep{};
  // Direct lattice sum, truncated far beyond double precision.
  const double reach = 40.0 / delta + 2.0;
  const long lo = std::lround(std::floor(center - reach));
  const long hi = std::lround(std::ceil(center + reach));
  double direct = 0.0;
  for (long h = lo; h <= hi; ++h) {
    const double u = (h - center) * delta;
    direct += std::exp(-u * u);
  }
  rep.direct_sum = direct;
  // Harmonic route: the transform of exp(-delta^2 x^2) at angular frequency
  // 2 pi k is (sqrt(pi)/delta) exp(-pi^2 k^2/delta^2), phase-shifted by the
  // center offset.
  const double lead = std::sqrt(kPi) / delta;
  rep.leading_term = lead;
  double fourier = lead;
  for (int k = 1; k < 200; ++k) {
    const double amp = lead * std::exp(-kPi * kPi * k * k / (delta * delta));
    if (amp < 1e-300) break;
    fourier += 2.0 * amp * std::cos(2.0 * kPi * k * center);
  }
  rep.fourier_sum = fourier;
  rep.abs_diff = std::abs(direct - fourier);
  return rep;
}

}  // namespace rotorcodes
