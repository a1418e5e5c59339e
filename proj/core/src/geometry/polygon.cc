#include "roadrecon/geometry/polygon.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "roadrecon/errors.h"

namespace roadrecon {
namespace {

double Cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// > 0 when p lies left of the directed edge a -> b.
double EdgeSide(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                const Eigen::Vector2d& p) {
  return Cross(b - a, p - a);
}

Eigen::Vector2d LineIntersection(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                 const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const double s0 = EdgeSide(a, b, p0);
  const double s1 = EdgeSide(a, b, p1);
  const double t = s0 / (s0 - s1);
  return p0 + t * (p1 - p0);
}

}  // namespace

double SignedArea(const std::vector<Eigen::Vector2d>& v) {
  double acc = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    acc += Cross(v[i], v[(i + 1) % v.size()]);
  }
  return 0.5 * acc;
}

double GroundPolygon::Area() const { return std::abs(SignedArea(vertices)); }

bool GroundPolygon::IsConvex() const {
  const size_t n = vertices.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    if (EdgeSide(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) < -1e-12) {
      return false;
    }
  }
  return true;
}

GroundPolygon ClipConvex(const GroundPolygon& subject, const GroundPolygon& clip) {
  std::vector<Eigen::Vector2d> output = subject.vertices;
  const size_t m = clip.vertices.size();
  for (size_t e = 0; e < m && !output.empty(); ++e) {
    const Eigen::Vector2d& a = clip.vertices[e];
    const Eigen::Vector2d& b = clip.vertices[(e + 1) % m];
    std::vector<Eigen::Vector2d> input;
    input.swap(output);
    for (size_t i = 0; i < input.size(); ++i) {
      const Eigen::Vector2d& cur = input[i];
      const Eigen::Vector2d& prev = input[(i + input.size() - 1) % input.size()];
      const bool cur_in = EdgeSide(a, b, cur) >= 0.0;
      const bool prev_in = EdgeSide(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) output.push_back(LineIntersection(prev, cur, a, b));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(LineIntersection(prev, cur, a, b));
      }
    }
  }
  return GroundPolygon{output};
}

double PolygonIou(const GroundPolygon& a, const GroundPolygon& b) {
  const double area_a = a.Area();
  const double area_b = b.Area();
  if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
  const double inter = ClipConvex(a, b).Area();
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

GroundPolygon GroundFootprint(const Pose& cam_to_world, const CameraIntrinsics& cam,
                              double ground_z, double max_range) {
  const Eigen::Vector3d center = cam_to_world.translation();
  const double height = center.z() - ground_z;
  if (!(height > 0.0)) {
    throw InvalidArgumentError("GroundFootprint: camera is not above the ground plane");
  }
  const std::array<Eigen::Vector2d, 4> corners = {
      Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(cam.width, 0.0),
      Eigen::Vector2d(cam.width, cam.height), Eigen::Vector2d(0.0, cam.height)};

  GroundPolygon poly;
  int hits = 0;
  for (const auto& corner : corners) {
    const Eigen::Vector3d ray = cam_to_world.rotation() * Backproject(cam, corner);
    const Eigen::Vector2d horizontal = ray.head<2>();
    const double horizontal_norm = horizontal.norm();
    Eigen::Vector2d point;
    bool clamp = true;
    if (ray.z() < 0.0) {
      ++hits;
      const double s = height / -ray.z();
      if (s * horizontal_norm <= max_range) {
        point = center.head<2>() + s * horizontal;
        clamp = false;
      }
    }
    if (clamp) {
      point = center.head<2>();
      if (horizontal_norm > 0.0) point += max_range * horizontal / horizontal_norm;
    }
    poly.vertices.push_back(point);
  }
  if (hits == 0) {
    throw NoFootprintError("GroundFootprint: no corner ray reaches the ground plane");
  }
  if (SignedArea(poly.vertices) < 0.0) {
    std::reverse(poly.vertices.begin(), poly.vertices.end());
  }
  return poly;
}

}  // namespace roadrecon
