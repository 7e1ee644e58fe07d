#pragma once

#include "imhotep/core/geometry.hpp"

namespace imhotep {

/// Pinhole camera. `right = forward x up`; pixel (0, 0) is the top-left.
/// Distances are in world units (millimetres in an assembled scene).
struct Camera {
  Vec3 eye = Vec3::Zero();
  Vec3 forward = -Vec3::UnitZ();
  Vec3 up = Vec3::UnitY();
  Vec3 right = Vec3::UnitX();
  double vertical_fov = EIGEN_PI / 3.0;
  int width = 512;
  int height = 512;
  double near_plane = 1.0;
  double far_plane = 1e5;

  void validate() const;

  double aspect() const { return static_cast<double>(width) / height; }
  /// Focal length in pixels: (height / 2) / tan(fov / 2).
  double focal_px() const;

  /// Unit ray through the centre of pixel (x, y).
  Ray pixel_ray(int x, int y) const;

  /// World point -> (x_px, y_px, view depth along forward). Pixel centres
  /// sit at half-integer coordinates.
  Vec3 project(const Vec3& p) const;
};

/// Camera at `eye` looking along `forward` with approximate `up`; the basis
/// is re-orthonormalised.
Camera look_along(const Vec3& eye, const Vec3& forward, const Vec3& up, int width, int height,
                  double vertical_fov, double near_plane, double far_plane);

struct StereoRig {
  Camera center;
  double ipd = 0.0;  // mm

  /// Parallel-axis eye: the centre camera shifted by -ipd/2 (left, eye = 1)
  /// or +ipd/2 (right, eye = 2) along `right`. Eye 0 is the centre camera.
  Camera eye_camera(int eye) const;
};

}  // namespace imhotep
