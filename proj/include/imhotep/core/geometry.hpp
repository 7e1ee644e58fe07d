#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <limits>

namespace imhotep {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Affine3 = Eigen::Affine3d;
using Quat = Eigen::Quaterniond;

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 dir = Vec3::UnitZ();  // unit length
};

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (lo.array() > hi.array()).any(); }
  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    if (b.empty()) return;
    extend(b.lo);
    extend(b.hi);
  }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
};

/// Slab test. Returns false when the ray misses; otherwise [t0, t1] is the
/// parametric overlap (t0 may be negative when the origin is inside).
bool intersect_aabb(const Ray& ray, const Aabb& box, double& t0, double& t1);

}  // namespace imhotep
