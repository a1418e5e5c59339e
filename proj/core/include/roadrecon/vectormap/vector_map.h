#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roadrecon/surface/bev.h"
#include "roadrecon/surface/elevation.h"

namespace roadrecon {

enum class ElementClass { kLaneDivider, kPedCrossing, kRoadBoundary };

const char* ElementClassName(ElementClass cls);
// Throws ParseError for unknown names.
ElementClass ParseElementClass(const std::string& name);
// lane_marking -> lane_divider, road_teeth -> road_boundary.
std::optional<ElementClass> ElementClassForSemantic(uint8_t semantic_class);

struct MapElement {
  int64_t id = 0;
  ElementClass cls = ElementClass::kLaneDivider;
  std::vector<Eigen::Vector3d> points;  // z is 0 while has_z is false
  bool has_z = false;
};

struct VectorMap {
  std::string frame = "world";
  std::vector<MapElement> elements;

  // Throws InvalidArgumentError on duplicate ids, elements with fewer than
  // two vertices, or repeated consecutive vertices.
  void Validate() const;
};

struct ExtractOptions {
  std::optional<ElementClass> element_class;  // default: mapped from the semantic class
  int64_t first_id = 0;
  // Branches from a junction to a free end shorter than this are pruned.
  double spur_length = 1.0;  // meters
  // Traced paths shorter than this are dropped.
  double min_length = 0.0;  // meters
  // Move free ends outward along the path to the last class cell, undoing
  // the erosion of thinning; at most `max_end_extension` meters.
  bool extend_ends = true;
  double max_end_extension = 0.5;
};

// Class mask -> Zhang-Suen skeleton -> paths split at junction cells ->
// Douglas-Peucker with tolerance `simplify_eps` (meters; <= 0 keeps every
// traced cell). Vertices are skeleton cell centers in world meters, except
// extended free ends.
std::vector<MapElement> ExtractPolylines(const BevRaster<uint8_t>& bev, uint8_t class_id,
                                         double simplify_eps, const ExtractOptions& options = {});

// Ordered pixel paths of a one-pixel-wide skeleton, split at junctions.
// Closed loops repeat their first pixel at the end.
std::vector<std::vector<std::pair<int, int>>> TraceSkeleton(const GrayImage& skeleton);

// Indices of the points kept by Douglas-Peucker; eps <= 0 keeps all.
std::vector<int> DouglasPeucker(const std::vector<Eigen::Vector2d>& points, double eps);

// Densifies every polyline to at most `max_spacing` meters between vertices
// and sets z from the field. Throws OutOfBoundsError naming vertices outside
// the field bounds.
VectorMap LiftTo3d(const std::vector<MapElement>& elements, const ElevationField& field,
                   double max_spacing = 1.0);

std::vector<Eigen::Vector3d> Densify(const std::vector<Eigen::Vector3d>& points,
                                     double max_spacing);

// {frame, elements: [{id, class, points}]}; 2D maps omit z.
void WriteVectorMap(const std::string& path, const VectorMap& map);
VectorMap ReadVectorMap(const std::string& path);
std::string VectorMapToJson(const VectorMap& map);
VectorMap VectorMapFromJson(const std::string& text);

}  // namespace roadrecon
