#pragma once
// Wigner D-matrices, Clebsch-Gordan coefficients, spherical harmonics, SO(3)
// characters, Haar quadrature rules, and the D-matrix product expansion.
//
// Convention (pinned by tests): D^l_{mn}(alpha,beta,gamma) =
// e^{i m alpha} d^l_{mn}(beta) e^{i n gamma}, so z-rotations act diagonally
// with entries e^{i m omega} and D^l(RS) = D^l(R) D^l(S).

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rotorcodes/rotation.hpp"

namespace rotorcodes {

using Complex = std::complex<double>;

// Real little-d matrix element d^l_{mn}(beta); 0 when |m| or |n| exceeds l.
double wigner_small_d(int l, int m, int n, double beta);

Complex wigner_D_element(int l, int m, int n, const EulerZYZ& e);
Complex wigner_D_element(int l, int m, int n, const Rotation& r);

// Full (2l+1) x (2l+1) matrix; index (m, n) lives at (m + l, n + l).
Eigen::MatrixXcd wigner_D(int l, const Rotation& r);

// SO(3) character chi_l(omega) = sin((2l+1) omega/2) / sin(omega/2),
// continuously extended through omega = 0 (value 2l+1).
double character_so3(int l, double omega);

// Clebsch-Gordan coefficients C^{L,M}_{l1 m1 l2 m2} in the standard real
// convention (C at L = l1+l2 positive).  The column form returns every L for
// fixed (l1, m1, l2, m2) from one stable three-term recursion pass.
struct CGColumn {
  int l_min = 0;
  std::vector<double> values;  // values[L - l_min] = C^{L, m1+m2}

  double at(int L) const {
    const int i = L - l_min;
    return (i >= 0 && i < static_cast<int>(values.size())) ? values[i] : 0.0;
  }
};
CGColumn clebsch_gordan_column(int l1, int m1, int l2, int m2);
double clebsch_gordan(int l1, int m1, int l2, int m2, int L, int M);
// Independent exact-rational evaluation (C^2 as an exact fraction, one final
// rounding); intended for modest l as a cross-check of the recursion route.
double clebsch_gordan_exact(int l1, int m1, int l2, int m2, int L, int M);

// Expansion of the pointwise product of two D-functions into single
// D-functions: D^l_{mn} D^lp_{mp np} = sum_L coeff(L) D^L_{m+mp, n+np} with
// coeff(L) = C^{L,m+mp}_{l m lp mp} C^{L,n+np}_{l n lp np}.
struct ProductTerm {
  int L;
  double coeff;
};
std::vector<ProductTerm> d_product_expand(int l, int m, int n, int lp, int mp,
                                          int np);

// Spherical harmonic with the standard Condon-Shortley phase:
// Y^l_m(theta,phi) = sqrt((2l+1)/4pi) e^{i m phi} d^l_{m0}(theta).
Complex spherical_harmonic(int l, int m, double theta, double phi);

// Gauss-Legendre nodes and weights on [a, b].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n,
                                                                   double a,
                                                                   double b);

struct QuadratureRule {
  std::vector<Rotation> nodes;
  std::vector<double> weights;  // sum to 8 pi^2

  std::size_t size() const { return nodes.size(); }
};

// Product rule over ZYZ Euler angles: uniform in alpha and gamma,
// Gauss-Legendre in cos(beta).  Integrates products of two D-functions of
// degree <= band_limit exactly (so D-matrix orthogonality holds to rounding).
QuadratureRule so3_quadrature(int band_limit);

// Product rule over the axis-angle chart (polar angle Theta, azimuth Phi,
// rotation angle omega in [0, pi]) with measure 4 sin^2(omega/2) sin(Theta).
QuadratureRule so3_axis_angle_quadrature(int n_theta, int n_phi, int n_omega);

struct SphereQuadrature {
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> weights;  // sum to 4 pi

  std::size_t size() const { return theta.size(); }
};

// Gauss-Legendre in cos(theta) x uniform in phi; integrates products of two
// spherical harmonics of degree <= band_limit exactly.
SphereQuadrature sphere_quadrature(int band_limit);

// Poisson-summation agreement report for the lattice Gaussian
// f(x) = exp(-delta^2 (x - center)^2): the direct sum over integers against
// the sum of Fourier-transform samples at integer harmonics, whose k = 0
// term alone is accurate up to O(exp(-pi^2/delta^2)).
struct PoissonReport {
  double direct_sum;
  double fourier_sum;
  double leading_term;
  double abs_diff;
};
PoissonReport poisson_gaussian_sum(double delta, double center = 0.0);

}  // namespace rotorcodes
