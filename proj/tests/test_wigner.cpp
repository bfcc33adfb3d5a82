// Wigner D-matrices, Clebsch-Gordan coefficients, harmonics, quadrature.
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "rotorcodes/rotation.hpp"
#include "rotorcodes/wigner.hpp"

using namespace rotorcodes;

namespace {

std::mt19937_64 rng_for(int salt) { return std::mt19937_64(9000 + salt); }

double rand_angle(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 2 * kPi)(rng);
}

}  // namespace

TEST_CASE("D-matrix convention anchors") {
  // l = 0 is the scalar 1.
  CHECK(wigner_D(0, Rotation::from_euler_zyz(0.4, 1.0, 2.2))(0, 0).real() ==
        doctest::Approx(1.0).epsilon(1e-14));
  // z-rotations are diagonal with entries e^{i m omega}.
  auto rng = rng_for(1);
  for (int l : {1, 2, 5, 9, 25}) {
    const double omega = rand_angle(rng);
    const Rotation rz = Rotation::from_axis_angle({0, 0, 1}, omega);
    const Eigen::MatrixXcd d = wigner_D(l, rz);
    for (int m = -l; m <= l; ++m) {
      for (int n = -l; n <= l; ++n) {
        const Complex want =
            (m == n) ? std::polar(1.0, m * omega) : Complex(0, 0);
        CHECK(std::abs(d(m + l, n + l) - want) < 1e-12);
      }
    }
  }
  // Corner element: D^N_{NN}(a,b,g) = e^{iN(a+g)} cos^{2N}(b/2).
  for (int N : {1, 2, 3, 4, 5}) {
    const double a = rand_angle(rng), b = rand_angle(rng) / 2,
                 g = rand_angle(rng);
    const Complex got = wigner_D_element(N, N, N, EulerZYZ{a, b, g});
    const Complex want =
        std::polar(std::pow(std::cos(b / 2), 2 * N), N * (a + g));
    CHECK(std::abs(got - want) < 1e-13);
  }
}

TEST_CASE("D-matrices are unitary and multiplicative") {
  auto rng = rng_for(2);
  for (int l = 0; l <= 8; ++l) {
    const Rotation r = haar_sample(rng), s = haar_sample(rng);
    const Eigen::MatrixXcd dr = wigner_D(l, r), ds = wigner_D(l, s);
    const int dim = 2 * l + 1;
    CHECK((dr * dr.adjoint() - Eigen::MatrixXcd::Identity(dim, dim))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    // Homomorphism D(RS) = D(R) D(S).
    CHECK((wigner_D(l, r * s) - dr * ds).cwiseAbs().maxCoeff() < 1e-9);
    // Inverse rule D_{mn}(R^{-1}) = conj(D_{nm}(R)).
    CHECK((wigner_D(l, r.inverse()) - dr.adjoint()).cwiseAbs().maxCoeff() <
          1e-10);
    // Index-reflection symmetry conj(D_{mn}) = (-1)^{m-n} D_{-m,-n}.
    for (int m = -l; m <= l; ++m) {
      for (int n = -l; n <= l; ++n) {
        const Complex lhs = std::conj(dr(m + l, n + l));
        const Complex rhs =
            (((m - n) % 2) ? -1.0 : 1.0) * dr(-m + l, -n + l);
        CHECK(std::abs(lhs - rhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("clebsch-gordan: trivial values and selection rules") {
  CHECK(clebsch_gordan(0, 0, 0, 0, 0, 0) == doctest::Approx(1.0));
  CHECK(clebsch_gordan(1, 1, 1, 0, 2, 0) == 0.0);   // M != m1 + m2
  CHECK(clebsch_gordan(1, 1, 1, 0, 3, 1) == 0.0);   // L out of range
  CHECK(clebsch_gordan(2, 0, 1, 0, 0, 0) == 0.0);   // L below |l1 - l2|
  CHECK(clebsch_gordan(1, 1, 1, -1, 1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(clebsch_gordan(1, 1, 1, -1, 2, 0) == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(clebsch_gordan(1, 1, 1, -1, 0, 0) == doctest::Approx(1.0 / std::sqrt(3.0)));
  // Singlet column: C^{00}_{l m l -m} = (-1)^{l-m}/sqrt(2l+1).
  for (int l = 0; l <= 5; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double want = (((l - m) % 2) ? -1.0 : 1.0) / std::sqrt(2.0 * l + 1);
      CHECK(clebsch_gordan(l, m, l, -m, 0, 0) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("clebsch-gordan recursion agrees with the exact-rational route") {
  // Exhaustive window.
  for (int l1 = 0; l1 <= 5; ++l1) {
    for (int l2 = 0; l2 <= 5; ++l2) {
      for (int m1 = -l1; m1 <= l1; ++m1) {
        for (int m2 = -l2; m2 <= l2; ++m2) {
          const CGColumn col = clebsch_gordan_column(l1, m1, l2, m2);
          for (int L = col.l_min; L <= l1 + l2; ++L) {
            const double exact =
                clebsch_gordan_exact(l1, m1, l2, m2, L, m1 + m2);
            CHECK(col.at(L) == doctest::Approx(exact).epsilon(1e-11).scale(1.0));
          }
        }
      }
    }
  }
  // Random samples in the larger window.
  auto rng = rng_for(3);
  std::uniform_int_distribution<int> dl(0, 10);
  for (int trial = 0; trial < 300; ++trial) {
    const int l1 = dl(rng), l2 = dl(rng);
    const int m1 = std::uniform_int_distribution<int>(-l1, l1)(rng);
    const int m2 = std::uniform_int_distribution<int>(-l2, l2)(rng);
    const CGColumn col = clebsch_gordan_column(l1, m1, l2, m2);
    for (int L = col.l_min; L <= l1 + l2; ++L) {
      const double exact = clebsch_gordan_exact(l1, m1, l2, m2, L, m1 + m2);
      CHECK(std::abs(col.at(L) - exact) < 1e-12);
    }
  }
}

TEST_CASE("clebsch-gordan columns are orthonormal rows of a unitary") {
  // Fixed (m1, m2): sum over L of C^2 is 1.
  auto rng = rng_for(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int l1 = std::uniform_int_distribution<int>(0, 12)(rng);
    const int l2 = std::uniform_int_distribution<int>(0, 12)(rng);
    const int m1 = std::uniform_int_distribution<int>(-l1, l1)(rng);
    const int m2 = std::uniform_int_distribution<int>(-l2, l2)(rng);
    const CGColumn col = clebsch_gordan_column(l1, m1, l2, m2);
    double norm = 0.0;
    for (double v : col.values) norm += v * v;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Fixed M: distinct L rows are orthogonal over (m1, m2) splits.
  const int l1 = 3, l2 = 2;
  for (int M = -2; M <= 2; ++M) {
    for (int L = std::abs(M); L <= l1 + l2; ++L) {
      for (int Lp = L; Lp <= l1 + l2; ++Lp) {
        double dot = 0.0;
        for (int m1 = -l1; m1 <= l1; ++m1) {
          const int m2 = M - m1;
          if (std::abs(m2) > l2) continue;
          dot += clebsch_gordan(l1, m1, l2, m2, L, M) *
                 clebsch_gordan(l1, m1, l2, m2, Lp, M);
        }
        if (L < std::abs(l1 - l2)) continue;
        CHECK(dot == doctest::Approx(L == Lp ? 1.0 : 0.0).epsilon(1e-11).scale(1.0));
      }
    }
  }
  // Maximal-L coefficients carry the conventional + sign.
  auto rng2 = rng_for(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int a = std::uniform_int_distribution<int>(0, 8)(rng2);
    const int b = std::uniform_int_distribution<int>(0, 8)(rng2);
    const int ma = std::uniform_int_distribution<int>(-a, a)(rng2);
    const int mb = std::uniform_int_distribution<int>(-b, b)(rng2);
    CHECK(clebsch_gordan(a, ma, b, mb, a + b, ma + mb) > 0.0);
  }
}

TEST_CASE("clebsch-gordan values match the group-integral route at l = 1") {
  const QuadratureRule rule = so3_quadrature(3);
  std::vector<Eigen::MatrixXcd> d1(rule.size()), dL0(rule.size()),
      dL1(rule.size()), dL2(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    d1[i] = wigner_D(1, rule.nodes[i]);
    dL0[i] = wigner_D(0, rule.nodes[i]);
    dL1[i] = d1[i];
    dL2[i] = wigner_D(2, rule.nodes[i]);
  }
  auto dL = [&](int L, std::size_t i) -> const Eigen::MatrixXcd& {
    return L == 0 ? dL0[i] : (L == 1 ? dL1[i] : dL2[i]);
  };
  for (int m1 = -1; m1 <= 1; ++m1) {
    for (int n1 = -1; n1 <= 1; ++n1) {
      for (int m2 = -1; m2 <= 1; ++m2) {
        for (int n2 = -1; n2 <= 1; ++n2) {
          const int M = m1 + m2, N = n1 + n2;
          for (int L = 0; L <= 2; ++L) {
            if (std::abs(M) > L || std::abs(N) > L) continue;
            Complex integral = 0.0;
            for (std::size_t i = 0; i < rule.size(); ++i) {
              integral += rule.weights[i] * d1[i](m1 + 1, n1 + 1) *
                          d1[i](m2 + 1, n2 + 1) *
                          std::conj(dL(L, i)(M + L, N + L));
            }
            const double want = clebsch_gordan(1, m1, 1, m2, L, M) *
                                clebsch_gordan(1, n1, 1, n2, L, N);
            const Complex got = integral * (2.0 * L + 1.0) / (8 * kPi * kPi);
            CHECK(std::abs(got - want) < 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("euler-grid quadrature integrates the constant and D-products") {
  const QuadratureRule rule = so3_quadrature(4);
  double total = 0.0;
  for (double w : rule.weights) total += w;
  CHECK(total == doctest::Approx(8 * kPi * kPi).epsilon(1e-12));

  // Full orthogonality Gram within band 6.
  {
    const QuadratureRule r6 = so3_quadrature(6);
    std::vector<int> ls, ms, ns;
    for (int l = 0; l <= 6; ++l) {
      for (int m = -l; m <= l; ++m) {
        for (int n = -l; n <= l; ++n) {
          ls.push_back(l);
          ms.push_back(m);
          ns.push_back(n);
        }
      }
    }
    const int F = static_cast<int>(ls.size());
    Eigen::MatrixXcd V(F, r6.size());
    for (std::size_t i = 0; i < r6.size(); ++i) {
      const EulerZYZ e = r6.nodes[i].to_euler_zyz();
      for (int f = 0; f < F; ++f) {
        V(f, i) = std::sqrt(r6.weights[i]) *
                  wigner_D_element(ls[f], ms[f], ns[f], e);
      }
    }
    const Eigen::MatrixXcd G = V * V.adjoint();
    for (int f = 0; f < F; ++f) {
      for (int g = 0; g < F; ++g) {
        const double want = (f == g) ? 8 * kPi * kPi / (2.0 * ls[f] + 1) : 0.0;
        CHECK(std::abs(G(f, g) - want) < 1e-10);
      }
    }
  }

  // Random spot checks up to band 8.
  {
    const QuadratureRule r8 = so3_quadrature(8);
    auto rng = rng_for(6);
    std::uniform_int_distribution<int> dl(0, 8);
    for (int trial = 0; trial < 300; ++trial) {
      const int l = dl(rng), lp = dl(rng);
      const int m = std::uniform_int_distribution<int>(-l, l)(rng);
      const int n = std::uniform_int_distribution<int>(-l, l)(rng);
      const int mp = std::uniform_int_distribution<int>(-lp, lp)(rng);
      const int np = std::uniform_int_distribution<int>(-lp, lp)(rng);
      Complex integral = 0.0;
      for (std::size_t i = 0; i < r8.size(); ++i) {
        const EulerZYZ e = r8.nodes[i].to_euler_zyz();
        integral += r8.weights[i] *
                    std::conj(wigner_D_element(l, m, n, e)) *
                    wigner_D_element(lp, mp, np, e);
      }
      const double want = (l == lp && m == mp && n == np)
                              ? 8 * kPi * kPi / (2.0 * l + 1)
                              : 0.0;
      CHECK(std::abs(integral - want) < 1e-10);
    }
  }
}

TEST_CASE("axis-angle and euler charts integrate identically") {
  auto f = [](const Rotation& r) {
    return wigner_D_element(2, 2, 1, r).real() +
           std::norm(wigner_D_element(3, 3, 0, r)) + 0.7;
  };
  const QuadratureRule euler = so3_quadrature(6);
  double ie = 0.0;
  for (std::size_t i = 0; i < euler.size(); ++i) {
    ie += euler.weights[i] * f(euler.nodes[i]);
  }
  const QuadratureRule axis = so3_axis_angle_quadrature(24, 24, 24);
  double ia = 0.0, vol = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    ia += axis.weights[i] * f(axis.nodes[i]);
    vol += axis.weights[i];
  }
  CHECK(vol == doctest::Approx(8 * kPi * kPi).epsilon(1e-12));
  CHECK(ia == doctest::Approx(ie).epsilon(1e-8));
}

TEST_CASE("characters: closed form, limits, orthogonality") {
  auto rng = rng_for(7);
  for (int l : {0, 1, 2, 7, 30}) {
    CHECK(character_so3(l, 0.0) == doctest::Approx(2.0 * l + 1));
    CHECK(character_so3(l, 1e-9) == doctest::Approx(2.0 * l + 1));
    for (int trial = 0; trial < 20; ++trial) {
      const double omega = rand_angle(rng);
      Complex sum = 0.0;
      for (int m = -l; m <= l; ++m) sum += std::polar(1.0, m * omega);
      CHECK(character_so3(l, omega) ==
            doctest::Approx(sum.real()).epsilon(1e-10).scale(1.0));
    }
  }
  // (1/8pi^2) integral of chi_l chi_lp over the group is delta_{l,lp}.
  const auto [xo, wo] = gauss_legendre(40, 0.0, kPi);
  for (int l = 0; l <= 6; ++l) {
    for (int lp = 0; lp <= 6; ++lp) {
      double integral = 0.0;
      for (std::size_t i = 0; i < xo.size(); ++i) {
        const double s = std::sin(xo[i] / 2);
        integral += wo[i] * 4.0 * s * s * 4.0 * kPi *
                    character_so3(l, xo[i]) * character_so3(lp, xo[i]);
      }
      CHECK(integral / (8 * kPi * kPi) ==
            doctest::Approx(l == lp ? 1.0 : 0.0).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("product of D-functions expands into single D-functions") {
  // Trivial factor: a single term with coefficient 1.
  const auto trivial = d_product_expand(0, 0, 0, 3, 2, -1);
  REQUIRE(trivial.size() == 1);
  CHECK(trivial[0].L == 3);
  CHECK(trivial[0].coeff == doctest::Approx(1.0));

  auto check_pointwise = [](int l, int m, int n, int lp, int mp, int np,
                            int trials, std::mt19937_64& rng) {
    const auto terms = d_product_expand(l, m, n, lp, mp, np);
    for (int t = 0; t < trials; ++t) {
      const Rotation r = haar_sample(rng);
      const Complex lhs = wigner_D_element(l, m, n, r) *
                          wigner_D_element(lp, mp, np, r);
      Complex rhs = 0.0;
      for (const ProductTerm& term : terms) {
        rhs += term.coeff * wigner_D_element(term.L, m + mp, n + np, r);
      }
      CHECK(std::abs(lhs - rhs) < 1e-10);
    }
  };
  auto rng = rng_for(8);
  check_pointwise(1, 1, 1, 1, 1, 1, 100, rng);
  for (int trial = 0; trial < 25; ++trial) {
    const int l = std::uniform_int_distribution<int>(0, 6)(rng);
    const int lp = std::uniform_int_distribution<int>(0, 6)(rng);
    const int m = std::uniform_int_distribution<int>(-l, l)(rng);
    const int n = std::uniform_int_distribution<int>(-l, l)(rng);
    const int mp = std::uniform_int_distribution<int>(-lp, lp)(rng);
    const int np = std::uniform_int_distribution<int>(-lp, lp)(rng);
    check_pointwise(l, m, n, lp, mp, np, 4, rng);
  }
}

TEST_CASE("spherical harmonics: anchors, parity, orthonormality") {
  CHECK(spherical_harmonic(0, 0, 1.0, 2.0).real() ==
        doctest::Approx(1.0 / std::sqrt(4 * kPi)).epsilon(1e-14));
  CHECK(spherical_harmonic(1, 1, kPi / 2, 0.0).real() ==
        doctest::Approx(-std::sqrt(3.0 / (8 * kPi))).epsilon(1e-13));
  auto rng = rng_for(9);
  for (int l = 0; l <= 10; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double phi = rand_angle(rng);
      const Complex rotated = spherical_harmonic(l, m, kPi / 2, phi);
      const Complex base = spherical_harmonic(l, m, kPi / 2, 0.0);
      CHECK(std::abs(rotated - base * std::polar(1.0, m * phi)) < 1e-12);
      if ((l - m) % 2 != 0) CHECK(std::abs(rotated) < 1e-12);
    }
  }
  const SphereQuadrature q = sphere_quadrature(8);
  double area = 0.0;
  for (double w : q.weights) area += w;
  CHECK(area == doctest::Approx(4 * kPi).epsilon(1e-12));
  std::vector<int> ls, ms;
  for (int l = 0; l <= 8; ++l) {
    for (int m = -l; m <= l; ++m) {
      ls.push_back(l);
      ms.push_back(m);
    }
  }
  const int F = static_cast<int>(ls.size());
  Eigen::MatrixXcd V(F, q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (int f = 0; f < F; ++f) {
      V(f, i) = std::sqrt(q.weights[i]) *
                spherical_harmonic(ls[f], ms[f], q.theta[i], q.phi[i]);
    }
  }
  const Eigen::MatrixXcd G = V * V.adjoint();
  for (int f = 0; f < F; ++f) {
    for (int g = 0; g < F; ++g) {
      CHECK(std::abs(G(f, g) - (f == g ? 1.0 : 0.0)) < 1e-11);
    }
  }
}

TEST_CASE("spherical harmonic addition theorem") {
  auto rng = rng_for(10);
  for (int l : {1, 2, 4, 6}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Rotation ra = haar_sample(rng), rb = haar_sample(rng);
      const Vec3 u = ra.apply({0, 0, 1}), v = rb.apply({0, 0, 1});
      const double tu = std::acos(std::clamp(u.z, -1.0, 1.0));
      const double pu = std::atan2(u.y, u.x);
      const double tv = std::acos(std::clamp(v.z, -1.0, 1.0));
      const double pv = std::atan2(v.y, v.x);
      Complex sum = 0.0;
      for (int m = -l; m <= l; ++m) {
        sum += std::conj(spherical_harmonic(l, m, tv, pv)) *
               spherical_harmonic(l, m, tu, pu);
      }
      const double cosang = std::clamp(u.dot(v), -1.0, 1.0);
      const double want =
          (2 * l + 1) / (4 * kPi) * wigner_small_d(l, 0, 0, std::acos(cosang));
      CHECK(sum.real() == doctest::Approx(want).epsilon(1e-10).scale(1.0));
      CHECK(std::abs(sum.imag()) < 1e-12);
    }
  }
}

TEST_CASE("gauss-legendre rules hit polynomial exactness degree") {
  const auto [x, w] = gauss_legendre(5, 0.0, 1.0);
  for (int k = 0; k <= 9; ++k) {
    double integral = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      integral += w[i] * std::pow(x[i], k);
    }
    CHECK(integral == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
  }
}

TEST_CASE("poisson summation on lattice gaussians") {
  // Sharp agreement between the direct and harmonic routes.
  for (double center : {0.0, 0.3, -1.7}) {
    const PoissonReport rep = poisson_gaussian_sum(0.3, center);
    CHECK(rep.abs_diff < 1e-12 * rep.direct_sum);
  }
  // The zeroth harmonic alone captures the sum up to O(e^{-pi^2/delta^2}).
  for (double delta : {0.8, 1.2}) {
    const PoissonReport rep = poisson_gaussian_sum(delta);
    const double envelope =
        2.0 * (std::sqrt(kPi) / delta) * std::exp(-kPi * kPi / (delta * delta));
    const double err = std::abs(rep.direct_sum - rep.leading_term);
    CHECK(err < 3.0 * envelope);
    CHECK(err > 0.1 * envelope);
  }
  CHECK_THROWS_AS(poisson_gaussian_sum(0.0), std::invalid_argument);
}
