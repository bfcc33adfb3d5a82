#pragma once
// Unit-quaternion representation of SO(3) rotations: composition, Euler (z-y-z)
// and axis-angle forms, the double-cover canonical hemisphere, and geodesic
// distances.  All angles are radians.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace rotorcodes {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Default tolerance for deciding that two rotations are the same element.
inline constexpr double kMatchTol = 1e-9;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const;
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
};

// Euler angles in the z-y-z convention: R = Rz(alpha) * Ry(beta) * Rz(gamma).
struct EulerZYZ {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
};

class Rotation {
 public:
  // Identity rotation.
  Rotation() = default;

  // From quaternion components; normalizes and canonicalizes.  Rejects the
  // zero quaternion.
  static Rotation from_quaternion(double w, double x, double y, double z);

  static Rotation identity() { return Rotation(); }
  static Rotation from_axis_angle(const Vec3& axis, double angle);
  static Rotation from_euler_zyz(double alpha, double beta, double gamma);
  static Rotation from_euler_zyz(const EulerZYZ& e) {
    return from_euler_zyz(e.alpha, e.beta, e.gamma);
  }

  // Canonical double-cover representative: scalar part >= 0; if the scalar
  // part is exactly zero the first nonzero vector component is made positive.
  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  // Composition: (a * b) acts as "apply b, then a" on column vectors.
  Rotation operator*(const Rotation& o) const;
  Rotation inverse() const;

  Vec3 apply(const Vec3& v) const;           // rotate a vector
  std::array<std::array<double, 3>, 3> to_matrix() const;

  // Rotation angle in [0, pi] (geodesic distance from the identity on SO(3)).
  double angle() const;
  // Rotation axis (unit); the identity returns +z by convention.
  Vec3 axis() const;
  EulerZYZ to_euler_zyz() const;

  // Geodesic SO(3) distance: the rotation angle of a^{-1} b.
  static double distance(const Rotation& a, const Rotation& b);

  // Same group element within tol (double cover handled).
  static bool approx_equal(const Rotation& a, const Rotation& b,
                           double tol = kMatchTol);

  // Strict lexicographic order on canonical components (w, x, y, z);
  // returns true if a < b.  Used only for deterministic tie-breaking.
  static bool lex_less(const Rotation& a, const Rotation& b);

  std::string str() const;

 private:
  Rotation(double w, double x, double y, double z, bool /*raw*/)
      : w_(w), x_(x), y_(y), z_(z) {}
  void canonicalize();

  double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

// Haar-uniform random rotation.  Uses an internal Box-Muller transform over
// the engine's raw 64-bit output so a fixed seed pins the exact sample
// sequence independent of library distribution internals.
Rotation haar_sample(std::mt19937_64& rng);

}  // namespace rotorcodes
