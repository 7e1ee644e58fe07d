#include "imhotep/render/camera.hpp"

#include "imhotep/core/error.hpp"

#include <cmath>

namespace imhotep {

void Camera::validate() const {
  const double tol = 1e-6;
  const bool unit = std::abs(forward.norm() - 1.0) < tol && std::abs(up.norm() - 1.0) < tol &&
                    std::abs(right.norm() - 1.0) < tol;
  const bool ortho = std::abs(forward.dot(up)) < tol && std::abs(forward.dot(right)) < tol &&
                     std::abs(up.dot(right)) < tol;
  if (!unit || !ortho) fail(ErrorCode::InvalidArgument, "camera basis is not orthonormal");
  if ((forward.cross(up) - right).norm() > tol) {
    fail(ErrorCode::InvalidArgument, "camera basis must satisfy right = forward x up");
  }
  if (!(near_plane > 0.0 && near_plane < far_plane)) {
    fail(ErrorCode::InvalidArgument, "camera needs 0 < near < far");
  }
  if (!(vertical_fov > 0.0 && vertical_fov < EIGEN_PI)) {
    fail(ErrorCode::InvalidArgument, "camera fov must lie in (0, pi)");
  }
  if (width <= 0 || height <= 0) fail(ErrorCode::InvalidArgument, "image size must be positive");
}

double Camera::focal_px() const { return 0.5 * height / std::tan(0.5 * vertical_fov); }

Ray Camera::pixel_ray(int x, int y) const {
  const double f = focal_px();
  const double sx = (x + 0.5 - 0.5 * width) / f;
  const double sy = (0.5 * height - (y + 0.5)) / f;
  Ray r;
  r.origin = eye;
  r.dir = (forward + sx * right + sy * up).normalized();
  return r;
}

Vec3 Camera::project(const Vec3& p) const {
  const Vec3 d = p - eye;
  const double z = d.dot(forward);
  const double f = focal_px();
  return Vec3(0.5 * width + f * d.dot(right) / z, 0.5 * height - f * d.dot(up) / z, z);
}

Camera look_along(const Vec3& eye, const Vec3& forward, const Vec3& up, int width, int height,
                  double vertical_fov, double near_plane, double far_plane) {
  Camera c;
  c.eye = eye;
  c.forward = forward.normalized();
  c.right = c.forward.cross(up).normalized();
  c.up = c.right.cross(c.forward).normalized();
  c.width = width;
  c.height = height;
  c.vertical_fov = vertical_fov;
  c.near_plane = near_plane;
  c.far_plane = far_plane;
  c.validate();
  return c;
}

Camera StereoRig::eye_camera(int eye) const {
  Camera c = center;
  const double half = 0.5 * ipd;
  if (eye == 1) c.eye -= half * c.right;
  if (eye == 2) c.eye += half * c.right;
  return c;
}

}  // namespace imhotep
