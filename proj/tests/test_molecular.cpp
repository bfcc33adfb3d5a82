// Rotor codes: frame/momentum states, kicks, error-correction conditions,
// syndrome recovery, damped-codeword asymptotics, and the ancilla readout.
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "rotorcodes/irreps.hpp"
#include "rotorcodes/molecular.hpp"
#include "rotorcodes/rotation.hpp"
#include "rotorcodes/subgroup.hpp"
#include "rotorcodes/wigner.hpp"

using namespace rotorcodes;

namespace {

Complex expi(double t) { return {std::cos(t), std::sin(t)}; }

Rotation rz(double omega) {
  return Rotation::from_axis_angle({0.0, 0.0, 1.0}, omega);
}

// Haar sample conditioned to lie strictly inside the fundamental cell of K
// (margin keeps decoding round trips away from Voronoi walls).
Rotation haar_in_cell(const FiniteSubgroup& k, std::mt19937_64& rng) {
  for (;;) {
    const Rotation r = haar_sample(rng);
    const OrbitSnap snap = snap_to_orbit(r, k, 1e-6);
    if (!snap.boundary_tie && Rotation::approx_equal(snap.coset_part, r))
      return r;
  }
}

FrameState random_frame_state(std::mt19937_64& rng, int npts) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<FrameTerm> terms;
  for (int i = 0; i < npts; ++i)
    terms.push_back({haar_sample(rng), Complex(u(rng), u(rng))});
  return normalized(make_frame_state(std::move(terms)));
}

double block_mass(const MomentumState& s, int l) {
  return s.blocks[l].squaredNorm();
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  LineFit fit;
  const double den = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace

TEST_CASE("molecular code construction: cosets, codewords, dimensions") {
  SUBCASE("cyclic pair") {
    const MolecularCode code =
        build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));
    CHECK(code.dim == 2);
    REQUIRE(code.codewords.size() == 2);
    // Coset 0 is the symmetry group itself; coset 1 is represented by the
    // smallest-angle member, the +z rotation by pi/3.
    CHECK(Rotation::approx_equal(code.coset_table.representatives[0],
                                 Rotation{}));
    CHECK(Rotation::approx_equal(code.coset_table.representatives[1],
                                 rz(kPi / 3)));
    for (int r = 0; r < 2; ++r) {
      REQUIRE(code.codewords[r].size() == 3);
      for (const auto& term : code.codewords[r].terms) {
        CHECK(std::abs(term.amplitude - Complex(1.0 / std::sqrt(3.0), 0.0)) <
              1e-12);
        // Word r sits on the rotated copy of the Z3 comb.
        bool found = false;
        for (int h = 0; h < 3; ++h)
          found = found || Rotation::approx_equal(
                               term.rotation, rz(r * kPi / 3 + 2 * kPi * h / 3));
        CHECK(found);
      }
    }
    CHECK(std::abs(inner(code.codewords[0], code.codewords[0]) - 1.0) < 1e-12);
    CHECK(std::abs(inner(code.codewords[0], code.codewords[1])) < 1e-12);
    CHECK(code.h_irreps.num_irreps() == 3);
    CHECK(code.h_irreps.irreps[1].label == "1");
  }

  SUBCASE("polyhedral pairs") {
    const MolecularCode to =
        build_molecular_code(build_subgroup("T"), build_subgroup("O"));
    CHECK(to.dim == 2);
    for (const auto& word : to.codewords) {
      CHECK(word.size() == 12);
      CHECK(std::abs(norm(word) - 1.0) < 1e-12);
    }
    CHECK(std::abs(inner(to.codewords[0], to.codewords[1])) < 1e-12);

    const MolecularCode ti =
        build_molecular_code(build_subgroup("T"), build_subgroup("I"));
    CHECK(ti.dim == 5);
    for (int r = 0; r < 5; ++r) {
      CHECK(ti.codewords[r].size() == 12);
      for (int rp = 0; rp < 5; ++rp) {
        const Complex g = inner(ti.codewords[r], ti.codewords[rp]);
        CHECK(std::abs(g - (r == rp ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }

  SUBCASE("trivial symmetry group") {
    const MolecularCode code =
        build_molecular_code(build_subgroup("Z1"), build_subgroup("Z3"));
    CHECK(code.dim == 3);
    for (const auto& word : code.codewords) CHECK(word.size() == 1);
  }

  SUBCASE("non-nested pairs are rejected") {
    CHECK_THROWS_AS(
        build_molecular_code(build_subgroup("Z4"), build_subgroup("Z6")),
        std::invalid_argument);
    CHECK_THROWS_AS(
        build_molecular_code(build_subgroup("O"), build_subgroup("I")),
        std::invalid_argument);
  }
}

TEST_CASE("frame states: merging, inner products, rotation actions") {
  SUBCASE("duplicate orientations merge, including across the double cover") {
    const FrameState s = make_frame_state(
        {{rz(0.4), Complex(0.3, 0.0)},
         {Rotation::from_axis_angle({0, 0, 1}, 0.4 + 4 * kPi), Complex(0.5, 0.0)}});
    REQUIRE(s.size() == 1);
    CHECK(std::abs(s.terms[0].amplitude - Complex(0.8, 0.0)) < 1e-12);

    const FrameState cancel = make_frame_state(
        {{rz(1.1), Complex(1.0, 0.0)}, {rz(1.1), Complex(-1.0, 0.0)}});
    CHECK(cancel.size() == 0);
    CHECK(norm(cancel) == 0.0);
  }

  SUBCASE("inner products match points and conjugate the left factor") {
    const FrameState a = make_frame_state({{rz(0.2), Complex(0.0, 1.0)}});
    const FrameState b = make_frame_state({{rz(0.2), Complex(1.0, 0.0)}});
    const FrameState c = make_frame_state({{rz(1.5), Complex(1.0, 0.0)}});
    CHECK(std::abs(inner(a, b) - Complex(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(inner(a, c)) < 1e-12);
  }

  SUBCASE("space-frame and body-frame rotations commute") {
    std::mt19937_64 rng(0xc0de01);
    const FrameState f = random_frame_state(rng, 5);
    const Rotation s = haar_sample(rng);
    const Rotation t = haar_sample(rng);
    const FrameState ab = apply_rotation(
        apply_rotation(f, s, RotationSide::Active), t, RotationSide::Passive);
    const FrameState ba = apply_rotation(
        apply_rotation(f, t, RotationSide::Passive), s, RotationSide::Active);
    CHECK(norm(ab - ba) < 1e-12);
    CHECK(std::abs(norm(ab) - 1.0) < 1e-12);
    // Active rotations compose on the left.
    const FrameState two = apply_rotation(
        apply_rotation(f, s, RotationSide::Active), t, RotationSide::Active);
    const FrameState one = apply_rotation(f, t * s, RotationSide::Active);
    CHECK(norm(two - one) < 1e-12);
  }

  SUBCASE("body-frame z-rotation shifts a z-rotation state backwards") {
    const FrameState f = make_frame_state({{rz(1.0), Complex(1.0, 0.0)}});
    const FrameState g = apply_rotation(f, rz(0.3), RotationSide::Passive);
    REQUIRE(g.size() == 1);
    CHECK(Rotation::approx_equal(g.terms[0].rotation, rz(0.7)));
  }
}

TEST_CASE("momentum expansion of cyclic codewords") {
  const MolecularCode code =
      build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));
  const double scale = std::sqrt(3.0 / (8.0 * kPi * kPi));

  SUBCASE("support lattice and signs") {
    for (int r = 0; r < 2; ++r) {
      const MomentumState mom =
          frame_to_momentum(code.codewords[r], 7, 0.0, false).state;
      for (int l = 0; l <= 7; ++l) {
        for (int m = -l; m <= l; ++m) {
          for (int n = -l; n <= l; ++n) {
            Complex want(0.0, 0.0);
            if (m == n && m % 3 == 0) {
              const int p = m / 3;
              const double sign = (p * r) % 2 == 0 ? 1.0 : -1.0;
              want = Complex(sign * scale * std::sqrt(2.0 * l + 1.0), 0.0);
            }
            INFO("r=", r, " l=", l, " m=", m, " n=", n);
            CHECK(std::abs(mom.blocks[l](m + l, n + l) - want) < 1e-12);
          }
        }
      }
    }
  }

  SUBCASE("plus and minus superpositions keep alternate lattice rows") {
    const Complex half(1.0 / std::sqrt(2.0), 0.0);
    const FrameState plus = half * (code.codewords[0] + code.codewords[1]);
    const FrameState minus = half * (code.codewords[0] - code.codewords[1]);
    const MomentumState mp = frame_to_momentum(plus, 4, 0.0, false).state;
    const MomentumState mm = frame_to_momentum(minus, 4, 0.0, false).state;
    // At l = 3 the lattice holds p = 0 and p = +-1; the plus word keeps even
    // p only, the minus word odd p only.
    CHECK(std::abs(mp.blocks[3](3, 3)) > 0.1);
    CHECK(std::abs(mp.blocks[3](6, 6)) < 1e-12);
    CHECK(std::abs(mm.blocks[3](3, 3)) < 1e-12);
    CHECK(std::abs(mm.blocks[3](6, 6)) > 0.1);
  }

  SUBCASE("identity orientation expands into unit matrices") {
    const FrameState e = make_frame_state({{Rotation{}, Complex(1.0, 0.0)}});
    const MomentumState mom = frame_to_momentum(e, 3, 0.0, false).state;
    const double w = std::sqrt(5.0 / (8.0 * kPi * kPi));
    CHECK((mom.blocks[2] - w * Eigen::MatrixXcd::Identity(5, 5))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }

  SUBCASE("damping and normalization") {
    const MomentumProjection undamped =
        frame_to_momentum(code.codewords[0], 6, 0.0, true);
    CHECK(std::abs(norm(undamped.state) - 1.0) < 1e-12);
    // Without damping the coefficient tail is not summable.
    CHECK(std::isnan(undamped.tail_mass_bound));

    const MomentumState damped =
        frame_to_momentum(code.codewords[0], 6, 0.3, false).state;
    const double got = std::abs(damped.blocks[2](2, 2));
    const double want = scale * std::sqrt(5.0) * std::exp(-0.3 * 0.3 * 3.0);
    CHECK(std::abs(got - want) < 1e-12);

    const int cutoff = default_momentum_cutoff(0.25);
    CHECK(cutoff == 24);
    const MomentumProjection proj =
        frame_to_momentum(code.codewords[0], cutoff, 0.25, true);
    CHECK(proj.tail_mass_bound < 1e-4);
  }

  SUBCASE("argument validation") {
    const FrameState e = make_frame_state({{Rotation{}, Complex(1.0, 0.0)}});
    CHECK_THROWS_AS(frame_to_momentum(e, -1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(frame_to_momentum(e, 4, -0.1), std::invalid_argument);
  }
}

TEST_CASE("rotations commute with the momentum expansion") {
  std::mt19937_64 rng(0xc0de02);
  const FrameState f = random_frame_state(rng, 4);
  const Rotation s = haar_sample(rng);
  for (const RotationSide side : {RotationSide::Active, RotationSide::Passive}) {
    const MomentumState via_frame =
        frame_to_momentum(apply_rotation(f, s, side), 6, 0.0, false).state;
    const MomentumState via_momentum =
        apply_rotation(frame_to_momentum(f, 6, 0.0, false).state, s, side);
    for (int l = 0; l <= 6; ++l) {
      INFO("side=", side == RotationSide::Active ? "active" : "passive",
           " l=", l);
      CHECK((via_frame.blocks[l] - via_momentum.blocks[l]).cwiseAbs().maxCoeff() <
            1e-11);
    }
    CHECK(std::abs(norm(via_momentum) - norm(frame_to_momentum(f, 6, 0.0, false)
                                                 .state)) < 1e-12);
  }

  // The half-step space-frame rotation exchanges the two codewords.
  const MolecularCode code =
      build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));
  CHECK(norm(apply_rotation(code.codewords[0], rz(kPi / 3),
                            RotationSide::Active) -
             code.codewords[1]) < 1e-12);
  CHECK(norm(apply_rotation(code.codewords[1], rz(kPi / 3),
                            RotationSide::Active) -
             code.codewords[0]) < 1e-12);
}

TEST_CASE("kicks send codewords to syndrome states with fixed phases") {
  const MolecularCode code =
      build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));

  SUBCASE("diagonal kicks: syndrome sector and relative phase") {
    for (int l = 1; l <= 4; ++l) {
      for (int m = -l; m <= l; ++m) {
        const int lambda = ((m % 3) + 3) % 3;
        const FrameState target = zak_state(code, Rotation{}, lambda, 0, 0);

        const FrameState k0 = apply_kick(code.codewords[0], l, m, m);
        INFO("l=", l, " m=", m);
        CHECK(std::abs(norm(k0) - 1.0) < 1e-12);
        CHECK(norm(k0 - target) < 1e-12);

        const FrameState k1 = apply_kick(code.codewords[1], l, m, m);
        const FrameState expected =
            expi(kPi * m / 3.0) *
            apply_rotation(target, rz(kPi / 3), RotationSide::Active);
        CHECK(norm(k1 - expected) < 1e-12);
      }
    }
  }

  SUBCASE("off-diagonal kicks annihilate z-rotation combs") {
    CHECK(apply_kick(code.codewords[0], 1, 1, 0).size() == 0);
    CHECK(apply_kick(code.codewords[0], 2, 2, -1).size() == 0);
    CHECK(apply_kick(code.codewords[1], 3, 0, 2).size() == 0);
  }

  SUBCASE("kick index validation") {
    CHECK_THROWS_AS(apply_kick(code.codewords[0], 1, 2, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_kick(code.codewords[0], -1, 0, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("kick algebra: products, adjoints, rotation covariance") {
  std::mt19937_64 rng(0xc0de03);
  const FrameState f = random_frame_state(rng, 5);

  SUBCASE("the l = 0 kick is the identity") {
    CHECK(norm(apply_kick(f, 0, 0, 0) - f) < 1e-14);
  }

  SUBCASE("pointwise products expand into single kicks") {
    const struct {
      int l1, m1, n1, l2, m2, n2;
    } cases[] = {{1, 1, 0, 2, -1, 1}, {2, 2, -1, 2, -2, 2}, {1, 0, 1, 3, 1, -2}};
    for (const auto& c : cases) {
      const FrameState lhs =
          apply_kick(apply_kick(f, c.l1, c.m1, c.n1), c.l2, c.m2, c.n2);
      FrameState rhs;
      for (const ProductTerm& t :
           d_product_expand(c.l1, c.m1, c.n1, c.l2, c.m2, c.n2))
        rhs = rhs + Complex(t.coeff, 0.0) *
                        apply_kick(f, t.L, c.m1 + c.m2, c.n1 + c.n2);
      INFO("l1=", c.l1, " m1=", c.m1, " n1=", c.n1, " l2=", c.l2);
      CHECK(norm(lhs - rhs) < 1e-10);
    }
  }

  SUBCASE("adjoint kicks: pairing identity and index reflection") {
    const FrameState g = random_frame_state(rng, 5);
    CHECK(std::abs(inner(apply_kick_adjoint(f, 2, 1, -1), g) -
                   inner(f, apply_kick(g, 2, 1, -1))) < 1e-12);
    // conj(D^l_{mn}) = (-1)^{m-n} D^l_{-m,-n}.
    CHECK(norm(apply_kick_adjoint(f, 2, 1, -1) - apply_kick(f, 2, -1, 1)) <
          1e-12);
    CHECK(norm(apply_kick_adjoint(f, 2, 1, 0) -
               Complex(-1.0, 0.0) * apply_kick(f, 2, -1, 0)) < 1e-12);
  }

  SUBCASE("conjugation by a space-frame rotation mixes the m index") {
    const Rotation s = haar_sample(rng);
    const int l = 2, m = 1, n = -1;
    const FrameState lhs = apply_rotation(
        apply_kick(apply_rotation(f, s.inverse(), RotationSide::Active), l, m,
                   n),
        s, RotationSide::Active);
    const Eigen::MatrixXcd d = wigner_D(l, s);
    FrameState rhs;
    for (int p = -l; p <= l; ++p)
      rhs = rhs + std::conj(d(p + l, m + l)) * apply_kick(f, l, p, n);
    CHECK(norm(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("momentum-space kicks agree with the frame route") {
  std::mt19937_64 rng(0xc0de04);
  const FrameState f = random_frame_state(rng, 4);
  const int lbig = 9;
  const MomentumState mom = frame_to_momentum(f, lbig, 0.0, false).state;

  SUBCASE("exact expansion below the truncation horizon") {
    const MomentumKickResult kicked = apply_kick(mom, 2, 1, -1);
    CHECK(kicked.state.L_max == lbig + 2);
    CHECK(kicked.dropped_mass == 0.0);
    const MomentumState direct =
        frame_to_momentum(apply_kick(f, 2, 1, -1), lbig + 2, 0.0, false).state;
    // Output level L draws on source levels up to L + 2, so levels at most
    // lbig - 2 are complete and must match the frame expansion exactly.
    for (int l = 0; l <= lbig - 2; ++l) {
      INFO("l=", l);
      CHECK((kicked.state.blocks[l] - direct.blocks[l]).cwiseAbs().maxCoeff() <
            1e-10);
    }
  }

  SUBCASE("truncation reports the discarded mass") {
    const MomentumKickResult full = apply_kick(mom, 2, 1, -1);
    const MomentumKickResult cut = apply_kick(mom, 2, 1, -1, 5);
    CHECK(cut.state.L_max == 5);
    double tail = 0.0;
    for (int l = 6; l <= full.state.L_max; ++l)
      tail += block_mass(full.state, l);
    CHECK(std::abs(cut.dropped_mass - tail) < 1e-12);
    for (int l = 0; l <= 5; ++l)
      CHECK((cut.state.blocks[l] - full.state.blocks[l]).cwiseAbs().maxCoeff() <
            1e-14);
  }
}

TEST_CASE("error-correction conditions for rotor codes") {
  const MolecularCode z36 =
      build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));

  SUBCASE("low-order kicks on the cyclic code satisfy the conditions") {
    // Error set: identity, plus the l = 0 and the nine l = 1 kicks.
    const KLReport r = kl_check(z36, {}, kicks_up_to(1));
    CHECK(r.passed);
    CHECK(r.violations.empty());
    CHECK(r.pairs_checked == 11 * 12 / 2);

    const std::vector<Rotation> rots = {
        rz(0.1), Rotation::from_axis_angle({1, 0, 0}, 0.07)};
    const KLReport r2 = kl_check(z36, rots, kicks_up_to(1));
    CHECK(r2.passed);
    CHECK(r2.pairs_checked == 13 * 14 / 2);
  }

  SUBCASE("same-syndrome kicks with mismatched phases are flagged") {
    const KLReport r = kl_check(z36, {}, {{1, -1, -1}, {2, 2, 2}});
    CHECK_FALSE(r.passed);
    REQUIRE(r.violations.size() == 1);
    const KLViolation& v = r.violations[0];
    CHECK(v.error_a == "D^1_{-1,-1}");
    CHECK(v.error_b == "D^2_{2,2}");
    CHECK(v.condition == "diagonal");
    CHECK(std::abs(v.magnitude - 2.0) < 1e-9);

    // Both kicks map into the lambda = 2 syndrome sector, but the codeword-1
    // phases differ by pi, which is exactly the flagged magnitude-2 gap.
    const Complex m00 = inner(apply_kick(z36.codewords[0], 1, -1, -1),
                              apply_kick(z36.codewords[0], 2, 2, 2));
    const Complex m11 = inner(apply_kick(z36.codewords[1], 1, -1, -1),
                              apply_kick(z36.codewords[1], 2, 2, 2));
    CHECK(std::abs(m00 - Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(m11 - Complex(-1.0, 0.0)) < 1e-12);

    // A generous tolerance accepts the same pair.
    CHECK(kl_check(z36, {}, {{1, -1, -1}, {2, 2, 2}}, 3.0).passed);
  }

  SUBCASE("tetrahedral code: l <= 1 passes, l = 3 acts logically") {
    const MolecularCode to =
        build_molecular_code(build_subgroup("T"), build_subgroup("O"));
    CHECK(kl_check(to, {}, kicks_up_to(1)).passed);

    const KLReport r = kl_check(to, {}, kicks_up_to(3));
    CHECK_FALSE(r.passed);
    bool found_identity_l3 = false;
    for (const KLViolation& v : r.violations) {
      if (v.error_a == "I" && v.error_b.rfind("D^3", 0) == 0 &&
          v.condition == "diagonal")
        found_identity_l3 = true;
    }
    // An l = 3 kick overlaps the code space and distinguishes the codewords:
    // an undetectable logical action.
    CHECK(found_identity_l3);
  }

  SUBCASE("the empty error list is vacuously correctable") {
    const KLReport r = kl_check(z36, {}, {});
    CHECK(r.passed);
    CHECK(r.pairs_checked == 1);
  }
}

TEST_CASE("position syndrome decoding") {
  const MolecularCode z36 =
      build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));
  const FrameState psi = Complex(0.6, 0.0) * z36.codewords[0] +
                         Complex(0.0, 0.8) * z36.codewords[1];

  SUBCASE("clean states decode to the identity") {
    const PositionDecodeResult r = decode_position(psi, z36);
    CHECK(r.syndrome.angle() < 1e-9);
    CHECK_FALSE(r.boundary_ambiguous);
    CHECK(norm(r.corrected - psi) < 1e-12);
  }

  SUBCASE("in-cell rotations are corrected exactly") {
    std::mt19937_64 rng(0xc0de05);
    for (int trial = 0; trial < 300; ++trial) {
      const Rotation s = haar_in_cell(z36.k, rng);
      const PositionDecodeResult r =
          decode_position(apply_rotation(psi, s, RotationSide::Active), z36);
      INFO("trial ", trial, " rotation ", s.str());
      REQUIRE(Rotation::approx_equal(r.syndrome, s, 1e-8));
      REQUIRE(norm(r.corrected - psi) < 1e-9);
      REQUIRE_FALSE(r.boundary_ambiguous);
    }
  }

  SUBCASE("in-cell rotations are corrected exactly on the tetrahedral code") {
    const MolecularCode to =
        build_molecular_code(build_subgroup("T"), build_subgroup("O"));
    const FrameState phi = Complex(1.0 / std::sqrt(3.0), 0.0) * to.codewords[0] +
                           Complex(0.0, std::sqrt(2.0 / 3.0)) * to.codewords[1];
    std::mt19937_64 rng(0xc0de06);
    for (int trial = 0; trial < 300; ++trial) {
      const Rotation s = haar_in_cell(to.k, rng);
      const PositionDecodeResult r =
          decode_position(apply_rotation(phi, s, RotationSide::Active), to);
      REQUIRE(Rotation::approx_equal(r.syndrome, s, 1e-8));
      REQUIRE(norm(r.corrected - phi) < 1e-9);
    }
  }

  SUBCASE("rotations past the cell wall decode to a logical swap") {
    const Rotation s = rz(kPi / 6 + 0.02);
    const PositionDecodeResult r =
        decode_position(apply_rotation(psi, s, RotationSide::Active), z36);
    // The snap lands on the equivalent rotation by pi/6 + 0.02 - pi/3, so the
    // correction leaves a residual half-step: the codewords swap with the
    // superposition amplitudes intact.
    CHECK(Rotation::approx_equal(r.syndrome, rz(kPi / 6 + 0.02 - kPi / 3),
                                 1e-8));
    const FrameState swapped = Complex(0.6, 0.0) * z36.codewords[1] +
                               Complex(0.0, 0.8) * z36.codewords[0];
    CHECK(norm(r.corrected - swapped) < 1e-9);
  }

  SUBCASE("exact cell-wall rotations are flagged ambiguous") {
    const PositionDecodeResult r = decode_position(
        apply_rotation(psi, rz(kPi / 6), RotationSide::Active), z36);
    CHECK(r.boundary_ambiguous);
  }

  SUBCASE("inconsistent supports are rejected") {
    const FrameState bad = make_frame_state(
        {{Rotation{}, Complex(1.0, 0.0)},
         {Rotation::from_axis_angle({1, 0, 0}, 1.0), Complex(1.0, 0.0)}});
    CHECK_THROWS_AS(decode_position(normalized(bad), z36),
                    std::invalid_argument);
    CHECK_THROWS_AS(decode_position(FrameState{}, z36), std::invalid_argument);
  }
}

TEST_CASE("momentum syndrome decoding and recovery") {
  const MolecularCode z36 =
      build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));

  SUBCASE("syndrome to minimal momentum shift") {
    const MomentumRecovery r1 = decode_momentum(1, z36);
    CHECK(r1.lambda == 1);
    CHECK(r1.m == 1);
    CHECK_FALSE(r1.tie);
    CHECK(r1.candidates[0] == 1);
    CHECK(r1.candidates[1] == -2);

    const MomentumRecovery r2 = decode_momentum(2, z36);
    CHECK(r2.m == -1);
    CHECK(r2.candidates[0] == -1);
    CHECK(r2.candidates[1] == 2);

    CHECK(decode_momentum(0, z36).m == 0);
    CHECK(decode_momentum(-1, z36).lambda == 2);
    CHECK(decode_momentum(3, z36).m == 0);

    const MolecularCode z48 =
        build_molecular_code(build_subgroup("Z4"), build_subgroup("Z8"));
    const MomentumRecovery tie = decode_momentum(2, z48);
    CHECK(tie.tie);
    CHECK(tie.m == 2);
    CHECK(tie.candidates[1] == -2);
  }

  SUBCASE("recovery phase acts as e^{-i m omega} on z-rotation states") {
    MomentumRecovery rec;
    rec.m = 2;
    const FrameState f = make_frame_state({{rz(0.7), Complex(1.0, 0.0)}});
    const FrameState g = apply_momentum_recovery(f, rec);
    CHECK(std::abs(inner(f, g) - expi(-1.4)) < 1e-12);
  }

  SUBCASE("correctly diagnosed kicks are undone exactly") {
    const Complex a(1.0 / std::sqrt(3.0), 0.0);
    const Complex b(0.0, std::sqrt(2.0 / 3.0));
    const FrameState psi = a * z36.codewords[0] + b * z36.codewords[1];
    const FrameState kicked = apply_kick(psi, 1, 1, 1);
    const FrameState recovered =
        apply_momentum_recovery(kicked, decode_momentum(1, z36));
    CHECK(norm(recovered - psi) < 1e-12);
  }

  SUBCASE("aliased kicks recover the code space up to a logical flip") {
    const Complex a(0.8, 0.0);
    const Complex b(0.0, 0.6);
    const FrameState psi = a * z36.codewords[0] + b * z36.codewords[1];
    // The (2,2,2) kick reads out as lambda = 2, whose minimal representative
    // is m = -1; the recovery then misses by a full comb step and imprints a
    // relative sign between the codewords.
    const FrameState kicked = apply_kick(psi, 2, 2, 2);
    const FrameState recovered =
        apply_momentum_recovery(kicked, decode_momentum(2, z36));
    const FrameState flipped = a * z36.codewords[0] - b * z36.codewords[1];
    CHECK(norm(recovered - flipped) < 1e-12);
  }

  SUBCASE("the even-order tie choice is exact for both codewords") {
    const MolecularCode z48 =
        build_molecular_code(build_subgroup("Z4"), build_subgroup("Z8"));
    const Complex a(0.6, 0.0), b(0.0, 0.8);
    const FrameState psi = a * z48.codewords[0] + b * z48.codewords[1];
    const FrameState kicked = apply_kick(psi, 2, 2, 2);
    const FrameState recovered =
        apply_momentum_recovery(kicked, decode_momentum(2, z48));
    CHECK(norm(recovered - psi) < 1e-12);
  }

  SUBCASE("non-cyclic codes are rejected") {
    const MolecularCode to =
        build_molecular_code(build_subgroup("T"), build_subgroup("O"));
    CHECK_THROWS_AS(decode_momentum(1, to), std::invalid_argument);
  }
}

TEST_CASE("check operator certificate") {
  SUBCASE("cyclic index-2 codes stabilize") {
    for (const auto& pair :
         {std::pair<const char*, const char*>{"Z3", "Z6"}, {"Z2", "Z4"}}) {
      const MolecularCode code = build_molecular_code(
          build_subgroup(pair.first), build_subgroup(pair.second));
      const CheckOperatorCertificate cert = check_operators(code);
      INFO("code ", pair.first, " in ", pair.second);
      CHECK(cert.n == code.h.n);
      CHECK(cert.codeword_sx_residual < 1e-10);
      CHECK(cert.codeword_sz_residual < 1e-10);
      CHECK(cert.zak_eigenvalue_residual < 1e-10);
      CHECK(cert.anticommutator_residual < 1e-10);
      CHECK(cert.commutator_residual < 1e-10);
    }
  }

  SUBCASE("other code families are rejected") {
    CHECK_THROWS_AS(check_operators(build_molecular_code(
                        build_subgroup("T"), build_subgroup("O"))),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_operators(build_molecular_code(
                        build_subgroup("Z3"), build_subgroup("Z9"))),
                    std::invalid_argument);
  }

  SUBCASE("the half-step sign flip behind the anticommutator") {
    // D^N_{NN} picks up a minus sign under a body-frame rotation by pi/N.
    std::mt19937_64 rng(0xc0de07);
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 20; ++trial) {
      const EulerZYZ e{u(rng), u(rng) / 2.0, u(rng)};
      const EulerZYZ shifted{e.alpha, e.beta, e.gamma + kPi / 3.0};
      const Complex lhs = wigner_D_element(3, 3, 3, shifted);
      const Complex rhs = -wigner_D_element(3, 3, 3, e);
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("damped codeword momentum scale") {
  SUBCASE("exact and asymptotic scales agree for weak damping") {
    for (const double delta : {0.15, 0.25}) {
      const MomentumBudget b = avg_momentum(delta, 3);
      INFO("delta=", delta);
      CHECK(std::abs(b.lbar_asymptotic -
                     std::sqrt(1.5 / (delta * delta) - 0.25)) < 1e-12);
      CHECK(std::abs(b.lbar_exact - b.lbar_asymptotic) <
            0.02 * b.lbar_asymptotic);
      // The level spread is of the same order as the scale squared.
      const double ratio = b.spread / (b.lbar_exact * b.lbar_exact);
      CHECK(ratio > 0.1);
      CHECK(ratio < 0.6);
    }
  }

  SUBCASE("strong damping collapses onto the uniform state") {
    CHECK(avg_momentum(1.0, 3).lbar_exact > avg_momentum(2.0, 3).lbar_exact);
    CHECK(avg_momentum(2.0, 3).lbar_exact > avg_momentum(4.0, 3).lbar_exact);
    CHECK(avg_momentum(4.0, 3).lbar_exact < 0.01);
    CHECK_THROWS_AS(avg_momentum(0.0, 3), std::invalid_argument);
  }

  SUBCASE("damping strength solves for a requested scale") {
    const double d1 = delta_for_lbar(5.4, 3);
    CHECK(std::abs(d1 - 0.2259) < 0.01);
    CHECK(std::abs(avg_momentum(d1, 3).lbar_exact - 5.4) < 1e-6);
    const double d2 = delta_for_lbar(8.1, 3);
    CHECK(std::abs(d2 - 0.1509) < 0.008);
    CHECK_THROWS_AS(delta_for_lbar(-1.0, 3), std::invalid_argument);
  }

  SUBCASE("level fractions accumulate monotonically") {
    const double d1 = delta_for_lbar(5.4, 3);
    const double d2 = delta_for_lbar(8.1, 3);
    CHECK(momentum_support_fraction(d1, 3, 10) >= 0.99);
    CHECK(momentum_support_fraction(d2, 3, 15) >= 0.99);
    CHECK(momentum_support_fraction(d1, 3, 0) < 0.02);
    CHECK(momentum_support_fraction(d1, 3, 5) <
          momentum_support_fraction(d1, 3, 10));
  }

  SUBCASE("level weights match the explicit codeword expansion") {
    const MolecularCode code =
        build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));
    const double delta = 0.35;
    const MomentumState mom =
        frame_to_momentum(code.codewords[0], 12, delta, false).state;
    // Block mass per level = (3 / 8 pi^2) (2l+1)(2 floor(l/3)+1) e^{-d^2 l(l+1)}.
    const double scale = 3.0 / (8.0 * kPi * kPi);
    for (int l = 0; l <= 12; ++l) {
      const double weight = (2.0 * l + 1.0) * (2.0 * (l / 3) + 1.0) *
                            std::exp(-delta * delta * l * (l + 1));
      INFO("l=", l);
      CHECK(std::abs(block_mass(mom, l) / weight - scale) < 1e-12 * scale + 1e-15);
    }
  }
}

TEST_CASE("leakage probability of the damped comb") {
  SUBCASE("desk-scale anchors and the closed-form estimate") {
    const double d1 = delta_for_lbar(5.4, 3);
    const LeakageResult r1 = leakage_probability(3, d1);
    CHECK(std::abs(r1.cell_mass_sum - 1.0) < 1e-6);
    CHECK(r1.p_numeric > 3e-4);
    CHECK(r1.p_numeric < 4e-3);
    CHECK(r1.p_numeric / r1.p_asymptotic > 0.5);
    CHECK(r1.p_numeric / r1.p_asymptotic < 2.0);

    const double d2 = delta_for_lbar(8.1, 3);
    const LeakageResult r2 = leakage_probability(3, d2);
    CHECK(r2.p_numeric > 3e-7);
    CHECK(r2.p_numeric < 4e-6);
    CHECK(r2.p_numeric / r2.p_asymptotic > 0.5);
    CHECK(r2.p_numeric / r2.p_asymptotic < 2.0);
  }

  SUBCASE("quadrature refinement is converged") {
    const LeakageResult coarse = leakage_probability(3, 0.22, 24);
    const LeakageResult fine = leakage_probability(3, 0.22, 48);
    CHECK(coarse.theta_nodes == 24);
    CHECK(std::abs(coarse.p_numeric / fine.p_numeric - 1.0) < 5e-3);
  }

  SUBCASE("log-slope against 1/delta^2 matches the Gaussian tail rate") {
    std::vector<double> xs, ys;
    for (double delta = 0.15; delta < 0.2501; delta += 0.02) {
      const LeakageResult r = leakage_probability(3, delta);
      xs.push_back(1.0 / (delta * delta));
      ys.push_back(std::log(r.p_numeric));
    }
    const LineFit fit = fit_line(xs, ys);
    const double target = -(kPi / 6.0) * (kPi / 6.0);
    CHECK(fit.r2 > 0.999);
    CHECK(std::abs(fit.slope - target) < 0.10 * std::abs(target));
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(leakage_probability(0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(leakage_probability(3, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(leakage_probability(3, 0.2, 4), std::invalid_argument);
  }
}

TEST_CASE("distortion between damped codewords") {
  SUBCASE("the l = 0 element reproduces the damped overlap") {
    const MolecularCode code =
        build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));
    const DistortionResult d0 = distortion(3, 0.30, 0);
    const MomentumState m0 =
        frame_to_momentum(code.codewords[0], d0.l_used, 0.30, true).state;
    const MomentumState m1 =
        frame_to_momentum(code.codewords[1], d0.l_used, 0.30, true).state;
    const Complex ov = inner(m0, m1);
    CHECK(std::abs(ov.imag()) < 1e-12);
    CHECK(std::abs(d0.exact - ov.real()) < 1e-9);
  }

  SUBCASE("the l = 1 element matches the momentum-kick route") {
    const MolecularCode code =
        build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));
    const DistortionResult d1 = distortion(3, 0.35, 1);
    const MomentumState m0 =
        frame_to_momentum(code.codewords[0], d1.l_used, 0.35, true).state;
    const MomentumState m1 =
        frame_to_momentum(code.codewords[1], d1.l_used, 0.35, true).state;
    const MomentumKickResult kicked = apply_kick(m1, 1, 0, 0, d1.l_used);
    const Complex ov = inner(m0, kicked.state);
    CHECK(std::abs(ov.imag()) < 1e-12);
    CHECK(std::abs(d1.exact - ov.real()) < 1e-8 * std::max(1.0, std::abs(ov.real())));
  }

  SUBCASE("log-linear decay in 1/delta^2") {
    for (const int l : {1, 2}) {
      std::vector<double> xs, ys;
      for (double delta = 0.18; delta < 0.3001; delta += 0.03) {
        const DistortionResult d = distortion(3, delta, l);
        REQUIRE(d.exact > 0.0);
        xs.push_back(1.0 / (delta * delta));
        ys.push_back(std::log(d.exact));
      }
      const LineFit fit = fit_line(xs, ys);
      INFO("l=", l);
      CHECK(fit.r2 > 0.98);
      CHECK(fit.slope < -0.1);
    }
  }

  SUBCASE("strong damping leaves order-one distortion") {
    CHECK(distortion(3, 1.0, 1).exact > 0.3);
    CHECK(distortion(3, 1.0, 1).exact < 1.0);
    CHECK(distortion(3, 2.0, 0).exact > 0.9);
    const DistortionResult weak = distortion(3, 0.2, 0);
    CHECK(weak.exact < 5e-3);
    CHECK(weak.exact / weak.heuristic > 0.5);
    CHECK(weak.exact / weak.heuristic < 2.0);
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(distortion(3, 0.2, 3), std::invalid_argument);
    CHECK_THROWS_AS(distortion(3, 0.2, -1), std::invalid_argument);
    CHECK_THROWS_AS(distortion(3, 0.0, 1), std::invalid_argument);
  }
}

TEST_CASE("spin-coherent ancilla readout") {
  SUBCASE("overlap of coherent directions: closed form and decay") {
    std::mt19937_64 rng(0xc0de08);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const Vec3 v = Vec3{gauss(rng), gauss(rng), gauss(rng)}.normalized();
      const Vec3 w = Vec3{gauss(rng), gauss(rng), gauss(rng)}.normalized();
      const double dot = v.dot(w);
      for (const int spin : {1, 2, 5}) {
        const double want = std::pow((1.0 + dot) / 2.0, 2 * spin);
        CHECK(std::abs(spin_coherent_overlap(spin, v, w) - want) < 1e-12);
      }
      CHECK(spin_coherent_overlap(3, v, w) >= spin_coherent_overlap(4, v, w));
    }
    const Vec3 z{0.0, 0.0, 1.0};
    CHECK(std::abs(spin_coherent_overlap(3, z, z) - 1.0) < 1e-12);
    CHECK(spin_coherent_overlap(3, z, Vec3{0.0, 0.0, -1.0}) < 1e-20);
  }

  SUBCASE("readout kernel resolves the syndrome") {
    const Rotation s_tilde = Rotation::from_axis_angle(
        Vec3{0.2, -0.4, 0.9}.normalized(), 0.18);
    const AncillaReadout r = ancilla_position_readout(s_tilde, 3, 0.5);
    CHECK(r.spin == 3);
    CHECK(r.invariance_min > 1.0 - 1e-10);
    CHECK(r.outside_max < 1.0 - 1e-4);
    CHECK(r.kernel.size() == 16u * 16u * 16u);
    CHECK(r.peak_overlap > 0.5);
    CHECK(r.peak_distance < 0.4);
    // Far-away grid states (distance modulo the invariance group) never reach
    // the near-peak overlap: the readout localizes.
    double far = 0.0;
    for (const auto& [dist, ov] : r.kernel)
      if (dist > 1.3) far = std::max(far, ov);
    CHECK(far < 0.85);
  }

  SUBCASE("an identity syndrome peaks at the origin") {
    const AncillaReadout r = ancilla_position_readout(Rotation{}, 2, 0.3);
    CHECK(r.peak_overlap > 0.99);
    CHECK(r.peak_distance < 0.05);
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(ancilla_position_readout(Rotation{}, 0, 0.3),
                    std::invalid_argument);
    CHECK_THROWS_AS(ancilla_position_readout(Rotation{}, 3, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ancilla_position_readout(Rotation{}, 3, kPi / 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(ancilla_position_readout(Rotation{}, 3, 0.3, 3),
                    std::invalid_argument);
  }
}

TEST_CASE("momentum-route matrix elements converge to the frame values") {
  const MolecularCode code =
      build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));
  // In the frame picture, diagonal m = n = 0 kicks fix every codeword, and
  // equal-m diagonal kicks of different order land on the same syndrome
  // state; both give matrix elements exactly 1.  The truncated momentum route
  // must approach that value from below as the cutoff grows.
  CHECK(std::abs(inner(code.codewords[0],
                       apply_kick(code.codewords[0], 1, 0, 0)) -
                 Complex(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(inner(apply_kick(code.codewords[0], 1, 1, 1),
                       apply_kick(code.codewords[0], 2, 1, 1)) -
                 Complex(1.0, 0.0)) < 1e-12);

  std::vector<double> err_fix, err_cross;
  for (const int lmax : {12, 24, 48}) {
    const MomentumState m0 =
        frame_to_momentum(code.codewords[0], lmax, 0.0, true).state;
    const Complex fix = inner(m0, apply_kick(m0, 1, 0, 0).state);
    const Complex cross = inner(apply_kick(m0, 1, 1, 1).state,
                                apply_kick(m0, 2, 1, 1).state);
    CHECK(std::abs(fix.imag()) < 1e-10);
    CHECK(std::abs(cross.imag()) < 1e-10);
    err_fix.push_back(std::abs(fix - Complex(1.0, 0.0)));
    err_cross.push_back(std::abs(cross - Complex(1.0, 0.0)));
  }
  CHECK(err_fix[1] < err_fix[0]);
  CHECK(err_fix[2] < err_fix[1]);
  CHECK(err_fix[2] < 0.05);
  CHECK(err_cross[1] < err_cross[0]);
  CHECK(err_cross[2] < err_cross[1]);
  CHECK(err_cross[2] < 0.05);
}

TEST_CASE("coset-Fourier basis: orthonormality, sectors, phases") {
  SUBCASE("cyclic basis is orthonormal") {
    const MolecularCode code =
        build_molecular_code(build_subgroup("Z3"), build_subgroup("Z6"));
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const Complex g = inner(zak_state(code, Rotation{}, a, 0, 0),
                                zak_state(code, Rotation{}, b, 0, 0));
        CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-12);
      }
    CHECK_THROWS_AS(zak_state(code, Rotation{}, 5, 0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(zak_state(code, Rotation{}, 0, 1, 0),
                    std::invalid_argument);
  }

  const MolecularCode dd =
      build_molecular_code(build_subgroup("D3"), build_subgroup("D6"));
  struct Label {
    int irrep, mu, nu;
  };
  std::vector<Label> labels;
  for (int i = 0; i < dd.h_irreps.num_irreps(); ++i) {
    const int d = dd.h_irreps.irreps[i].dim;
    for (int mu = 0; mu < d; ++mu)
      for (int nu = 0; nu < d; ++nu) labels.push_back({i, mu, nu});
  }
  REQUIRE(labels.size() == 6);

  SUBCASE("dihedral basis is orthonormal on both cosets") {
    for (int coset = 0; coset < 2; ++coset) {
      const Rotation anchor = dd.coset_table.representatives[coset];
      for (std::size_t a = 0; a < labels.size(); ++a)
        for (std::size_t b = 0; b < labels.size(); ++b) {
          const Complex g = inner(
              zak_state(dd, anchor, labels[a].irrep, labels[a].mu, labels[a].nu),
              zak_state(dd, anchor, labels[b].irrep, labels[b].mu, labels[b].nu));
          INFO("coset=", coset, " a=", a, " b=", b);
          CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-12);
        }
    }
  }

  SUBCASE("coefficients reconstruct coset-supported states") {
    std::mt19937_64 rng(0xc0de09);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<FrameTerm> terms;
    for (const Rotation& h : dd.h.elements)
      terms.push_back({h, Complex(u(rng), u(rng))});
    const FrameState f = normalized(make_frame_state(std::move(terms)));

    const std::vector<Eigen::MatrixXcd> c =
        zak_coefficients(dd, Rotation{}, f);
    FrameState rebuilt;
    for (const Label& lab : labels)
      rebuilt = rebuilt + c[lab.irrep](lab.mu, lab.nu) *
                              zak_state(dd, Rotation{}, lab.irrep, lab.mu, lab.nu);
    CHECK(norm(rebuilt - f) < 1e-12);

    // A codeword is the trivial-sector basis state itself.
    const std::vector<Eigen::MatrixXcd> cw =
        zak_coefficients(dd, Rotation{}, dd.codewords[0]);
    CHECK(std::abs(cw[dd.h_irreps.trivial_index()](0, 0) - Complex(1.0, 0.0)) <
          1e-12);
  }

  SUBCASE("order-1 kicks land in fixed symmetry sectors") {
    const int sector_two = dd.h_irreps.index_of("2");
    const int sector_sign = dd.h_irreps.index_of("1'");
    for (int m = -1; m <= 1; ++m) {
      for (int n = -1; n <= 1; ++n) {
        const FrameState kicked = apply_kick(dd.codewords[0], 1, m, n);
        INFO("m=", m, " n=", n);
        if ((m == 0) != (n == 0)) {
          // Mixed axial/planar index pairs vanish on dihedral frames.
          CHECK(kicked.size() == 0);
          continue;
        }
        const int sector = (m == 0 && n == 0) ? sector_sign : sector_two;
        const std::vector<Eigen::MatrixXcd> c =
            zak_coefficients(dd, Rotation{}, kicked);
        double in_sector = 0.0, elsewhere = 0.0;
        for (int i = 0; i < dd.h_irreps.num_irreps(); ++i) {
          const double mass = c[i].squaredNorm();
          (i == sector ? in_sector : elsewhere) += mass;
        }
        CHECK(elsewhere < 1e-20);
        CHECK(std::abs(in_sector - norm(kicked) * norm(kicked)) < 1e-12);
        const double want_mass = (m == 0 && n == 0) ? 1.0 : 0.5;
        CHECK(std::abs(in_sector - want_mass) < 1e-12);
      }
    }
  }

  SUBCASE("kicked codewords differ by the half-step phase") {
    for (int m = -1; m <= 1; ++m) {
      for (int n = -1; n <= 1; ++n) {
        const FrameState k0 = apply_kick(dd.codewords[0], 1, m, n);
        if (k0.size() == 0) continue;
        const FrameState k1 = apply_kick(dd.codewords[1], 1, m, n);
        const FrameState expected =
            expi(kPi * m / 3.0) *
            apply_rotation(k0, rz(kPi / 3), RotationSide::Active);
        INFO("m=", m, " n=", n);
        CHECK(norm(k1 - expected) < 1e-12);
      }
    }
  }
}

TEST_CASE("fundamental cells translate with the orientation comb") {
  const FiniteSubgroup z6 = build_subgroup("Z6");
  std::mt19937_64 rng(0xc0de0a);
  for (int trial = 0; trial < 50; ++trial) {
    const Rotation s = haar_in_cell(z6, rng);
    for (int j = 0; j < 6; ++j) {
      const Rotation kj = rz(kPi * j / 3.0);
      const OrbitSnap snap = snap_to_orbit(s * kj, z6);
      INFO("trial=", trial, " j=", j);
      REQUIRE(Rotation::approx_equal(snap.coset_part, s));
      REQUIRE(Rotation::approx_equal(snap.compensator, kj));
      REQUIRE_FALSE(snap.boundary_tie);
    }
  }
}
