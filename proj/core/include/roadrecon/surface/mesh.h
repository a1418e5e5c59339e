#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roadrecon/sfm/model.h"
#include "roadrecon/surface/elevation.h"
#include "roadrecon/surface/semantics.h"
#include "roadrecon/util/raster.h"

namespace roadrecon {

using PhotometricImages = std::map<std::string, RgbImage>;

// Regular grid mesh. Vertex (c, r) sits at (origin_x + c * resolution,
// origin_y + r * resolution) and has index r * cols + c. Each grid cell is
// split into two triangles.
struct RoadMesh {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double resolution = 0.1;
  int cols = 0;
  int rows = 0;
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::array<int, kSemanticClassCount>> votes;
  std::vector<Eigen::Vector3d> color_sum;  // summed RGB over colored observations
  std::vector<int> color_count;
  std::vector<int> observations;

  int Index(int col, int row) const { return row * cols + col; }
  size_t size() const { return vertices.size(); }
  // Argmax of the vote histogram; ties go to road_surface, then the lower id.
  // Unobserved vertices are kUnknown.
  uint8_t VertexClass(int index) const;
  std::array<uint8_t, 3> VertexColor(int index) const;
};

// Grid over the field bounds. The origin is snapped to a multiple of
// `resolution` so meshes from different fits share vertex positions.
RoadMesh BuildMesh(const ElevationField& field, double resolution);

// Recomputes vertex heights from the field.
void UpdateMeshHeights(const ElevationField& field, RoadMesh* mesh);

// Projects every vertex into every camera that has a mask. A projection with
// positive depth that lands inside the image counts one observation and one
// vote for the mask class under it; the image color is added when an image
// exists. Throws NoCameraError when no camera has a mask.
void PaintMesh(const std::map<std::string, CameraState>& cameras, const SemanticMasks& masks,
               const PhotometricImages& images, RoadMesh* mesh);

struct MeshConfig {
  double resolution = 0.1;
  // Fine-tuning steps on training points next to observed vertices; 0 skips
  // refinement.
  int refine_iterations = 300;
  double refine_radius = 1.0;  // meters from an observed vertex
};

// Build, paint, and (optionally) refine the field on training points near
// observed vertices, then recompute heights and repaint.
RoadMesh BuildAndPaintMesh(ElevationField* field, const std::map<std::string, CameraState>& cameras,
                           const SemanticMasks& masks, const PhotometricImages& images,
                           const std::vector<Eigen::Vector3d>& training_points,
                           const MeshConfig& config = {}, const ElevationConfig& elevation = {});

}  // namespace roadrecon
