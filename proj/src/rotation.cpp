#include "rotorcodes/rotation.hpp"

#include <algorithm>
#include <sstream>

namespace rotorcodes {

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
  return {x / n, y / n, z / n};
}

void Rotation::canonicalize() {
  const double n = std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
  if (n == 0.0) throw std::invalid_argument("zero quaternion");
  w_ /= n;
  x_ /= n;
  y_ /= n;
  z_ /= n;
  bool flip = false;
  if (w_ < 0.0) {
    flip = true;
  } else if (w_ == 0.0) {
    // Half-turns: pick the hemisphere where the first nonzero vector
    // component is positive.
    if (x_ < 0.0) flip = true;
    else if (x_ == 0.0 && y_ < 0.0) flip = true;
    else if (x_ == 0.0 && y_ == 0.0 && z_ < 0.0) flip = true;
  }
  if (flip) {
    w_ = -w_;
    x_ = -x_;
    y_ = -y_;
    z_ = -z_;
  }
}

Rotation Rotation::from_quaternion(double w, double x, double y, double z) {
  Rotation r(w, x, y, z, true);
  r.canonicalize();
  return r;
}

Rotation Rotation::from_axis_angle(const Vec3& axis, double angle) {
  const Vec3 u = axis.normalized();
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  return from_quaternion(std::cos(h), u.x * s, u.y * s, u.z * s);
}

Rotation Rotation::from_euler_zyz(double alpha, double beta, double gamma) {
  // Rz(alpha) * Ry(beta) * Rz(gamma), assembled directly:
  const double ca = std::cos(alpha / 2), sa = std::sin(alpha / 2);
  const double cb = std::cos(beta / 2), sb = std::sin(beta / 2);
  const double cg = std::cos(gamma / 2), sg = std::sin(gamma / 2);
  // qz(alpha) * qy(beta):
  const double w1 = ca * cb, x1 = -sa * sb, y1 = ca * sb, z1 = sa * cb;
  // ... * qz(gamma):
  return from_quaternion(w1 * cg - z1 * sg, x1 * cg + y1 * sg,
                         y1 * cg - x1 * sg, z1 * cg + w1 * sg);
}

Rotation Rotation::operator*(const Rotation& o) const {
  return from_quaternion(
      w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
      w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
      w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
      w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_);
}

Rotation Rotation::inverse() const {
  return from_quaternion(w_, -x_, -y_, -z_);
}

Vec3 Rotation::apply(const Vec3& v) const {
  // v' = v + 2 u x (u x v + w v) with u the vector part.
  const Vec3 u{x_, y_, z_};
  const Vec3 t = u.cross(v) * 2.0;
  return v + t * w_ + u.cross(t);
}

std::array<std::array<double, 3>, 3> Rotation::to_matrix() const {
  const double ww = w_ * w_, xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  return {{{ww + xx - yy - zz, 2 * (x_ * y_ - w_ * z_), 2 * (x_ * z_ + w_ * y_)},
           {2 * (x_ * y_ + w_ * z_), ww - xx + yy - zz, 2 * (y_ * z_ - w_ * x_)},
           {2 * (x_ * z_ - w_ * y_), 2 * (y_ * z_ + w_ * x_), ww - xx - yy + zz}}};
}

double Rotation::angle() const {
  // Canonical w >= 0, so the angle is in [0, pi].  atan2 is more accurate
  // than acos near the identity.
  const double vn = std::sqrt(x_ * x_ + y_ * y_ + z_ * z_);
  return 2.0 * std::atan2(vn, w_);
}

Vec3 Rotation::axis() const {
  const double vn = std::sqrt(x_ * x_ + y_ * y_ + z_ * z_);
  if (vn < 1e-300) return {0.0, 0.0, 1.0};
  return {x_ / vn, y_ / vn, z_ / vn};
}

EulerZYZ Rotation::to_euler_zyz() const {
  const auto m = to_matrix();
  EulerZYZ e;
  const double c = std::clamp(m[2][2], -1.0, 1.0);
  e.beta = std::acos(c);
  if (std::abs(m[2][2]) > 1.0 - 1e-13) {
    // Gimbal case: only alpha + sgn * gamma is defined; put it all in alpha.
    e.gamma = 0.0;
    e.alpha = std::atan2(m[1][0], m[0][0]);
    if (m[2][2] < 0.0) e.alpha = std::atan2(-m[1][0], -m[0][0]);
  } else {
    e.alpha = std::atan2(m[1][2], m[0][2]);
    e.gamma = std::atan2(m[2][1], -m[2][0]);
  }
  if (e.alpha < 0.0) e.alpha += 2.0 * kPi;
  if (e.gamma < 0.0) e.gamma += 2.0 * kPi;
  return e;
}

double Rotation::distance(const Rotation& a, const Rotation& b) {
  return (a.inverse() * b).angle();
}

bool Rotation::approx_equal(const Rotation& a, const Rotation& b, double tol) {
  const double dp = std::max({std::abs(a.w_ - b.w_), std::abs(a.x_ - b.x_),
                              std::abs(a.y_ - b.y_), std::abs(a.z_ - b.z_)});
  const double dm = std::max({std::abs(a.w_ + b.w_), std::abs(a.x_ + b.x_),
                              std::abs(a.y_ + b.y_), std::abs(a.z_ + b.z_)});
  return std::min(dp, dm) <= tol;
}

bool Rotation::lex_less(const Rotation& a, const Rotation& b) {
  if (a.w_ != b.w_) return a.w_ < b.w_;
  if (a.x_ != b.x_) return a.x_ < b.x_;
  if (a.y_ != b.y_) return a.y_ < b.y_;
  return a.z_ < b.z_;
}

std::string Rotation::str() const {
  std::ostringstream os;
  os << "[" << w_ << ", " << x_ << ", " << y_ << ", " << z_ << "]";
  return os.str();
}

Rotation haar_sample(std::mt19937_64& rng) {
  // Four i.i.d. normals normalized to S^3 give the Haar measure.  Box-Muller
  // over explicit uniforms keeps the sequence reproducible for a given seed.
  auto uniform01 = [&rng]() {
    // 53-bit mantissa uniform in (0, 1].
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  double g[4];
  for (int i = 0; i < 4; i += 2) {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    g[i] = r * std::cos(2.0 * kPi * u2);
    g[i + 1] = r * std::sin(2.0 * kPi * u2);
  }
  return Rotation::from_quaternion(g[0], g[1], g[2], g[3]);
}

}  // namespace rotorcodes
