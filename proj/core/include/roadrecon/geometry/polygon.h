#pragma once

#include <vector>

#include <Eigen/Core>

#include "roadrecon/geometry/camera.h"
#include "roadrecon/geometry/pose.h"

namespace roadrecon {

// Polygon on a horizontal plane z = const, vertices in counter-clockwise order.
struct GroundPolygon {
  std::vector<Eigen::Vector2d> vertices;

  double Area() const;
  bool IsConvex() const;
};

double SignedArea(const std::vector<Eigen::Vector2d>& vertices);

// Sutherland-Hodgman clipping of `subject` against a convex `clip` polygon.
// Both inputs must be counter-clockwise.
GroundPolygon ClipConvex(const GroundPolygon& subject, const GroundPolygon& clip);

// Intersection-over-union of two convex polygons, in [0, 1].
double PolygonIou(const GroundPolygon& a, const GroundPolygon& b);

// Footprint of a camera on the plane z = ground_z: the rays through the four
// image corners are intersected with the plane. Rays that miss the plane, or
// hit it farther than `max_range` horizontally, are clamped at `max_range`
// along their horizontal direction. Throws NoFootprintError when no corner
// ray descends toward the plane, InvalidArgumentError when the camera is not
// above the plane.
GroundPolygon GroundFootprint(const Pose& cam_to_world, const CameraIntrinsics& cam,
                              double ground_z, double max_range = 100.0);

}  // namespace roadrecon
