#include "roadrecon/surface/mesh.h"

#include <algorithm>
#include <cmath>

#include "roadrecon/errors.h"
#include "roadrecon/geometry/camera.h"

namespace roadrecon {

uint8_t RoadMesh::VertexClass(int index) const {
  if (observations[index] == 0) return kUnknown;
  const auto& v = votes[index];
  int best = kRoadSurface;
  for (int c = 0; c < kSemanticClassCount; ++c) {
    if (v[c] > v[best]) best = c;
  }
  return static_cast<uint8_t>(best);
}

std::array<uint8_t, 3> RoadMesh::VertexColor(int index) const {
  std::array<uint8_t, 3> rgb{0, 0, 0};
  if (color_count[index] == 0) return rgb;
  for (int k = 0; k < 3; ++k) {
    const double mean = color_sum[index](k) / color_count[index];
    rgb[k] = static_cast<uint8_t>(std::clamp(std::lround(mean), 0L, 255L));
  }
  return rgb;
}

RoadMesh BuildMesh(const ElevationField& field, double resolution) {
  if (!(resolution > 0.0)) throw InvalidArgumentError("mesh resolution must be positive");
  RoadMesh mesh;
  mesh.resolution = resolution;
  const double c0 = std::ceil(field.min_x / resolution - 1e-9);
  const double r0 = std::ceil(field.min_y / resolution - 1e-9);
  mesh.origin_x = c0 * resolution;
  mesh.origin_y = r0 * resolution;
  mesh.cols = static_cast<int>(std::floor(field.max_x / resolution + 1e-9) - c0) + 1;
  mesh.rows = static_cast<int>(std::floor(field.max_y / resolution + 1e-9) - r0) + 1;
  if (mesh.cols < 1 || mesh.rows < 1) throw DegenerateExtentError("field bounds hold no vertex");
  const size_t n = static_cast<size_t>(mesh.cols) * mesh.rows;
  mesh.vertices.resize(n);
  for (int r = 0; r < mesh.rows; ++r) {
    for (int c = 0; c < mesh.cols; ++c) {
      mesh.vertices[mesh.Index(c, r)] =
          Eigen::Vector3d(mesh.origin_x + c * resolution, mesh.origin_y + r * resolution, 0.0);
    }
  }
  for (int r = 0; r + 1 < mesh.rows; ++r) {
    for (int c = 0; c + 1 < mesh.cols; ++c) {
      const int a = mesh.Index(c, r), b = mesh.Index(c + 1, r);
      const int d = mesh.Index(c, r + 1), e = mesh.Index(c + 1, r + 1);
      mesh.faces.push_back({a, b, e});
      mesh.faces.push_back({a, e, d});
    }
  }
  mesh.votes.assign(n, {});
  mesh.color_sum.assign(n, Eigen::Vector3d::Zero());
  mesh.color_count.assign(n, 0);
  mesh.observations.assign(n, 0);
  UpdateMeshHeights(field, &mesh);
  return mesh;
}

void UpdateMeshHeights(const ElevationField& field, RoadMesh* mesh) {
  constexpr size_t kChunk = 4096;
  for (size_t start = 0; start < mesh->size(); start += kChunk) {
    const size_t count = std::min(kChunk, mesh->size() - start);
    Eigen::Matrix2Xd xy(2, count);
    for (size_t i = 0; i < count; ++i) xy.col(i) = mesh->vertices[start + i].head<2>();
    const Eigen::VectorXd z = field.Evaluate(xy);
    for (size_t i = 0; i < count; ++i) mesh->vertices[start + i].z() = z(i);
  }
}

void PaintMesh(const std::map<std::string, CameraState>& cameras, const SemanticMasks& masks,
               const PhotometricImages& images, RoadMesh* mesh) {
  std::fill(mesh->votes.begin(), mesh->votes.end(), std::array<int, kSemanticClassCount>{});
  std::fill(mesh->color_sum.begin(), mesh->color_sum.end(), Eigen::Vector3d::Zero());
  std::fill(mesh->color_count.begin(), mesh->color_count.end(), 0);
  std::fill(mesh->observations.begin(), mesh->observations.end(), 0);
  int painted = 0;
  for (const auto& [id, cam] : cameras) {
    const auto mask_it = masks.find(id);
    if (mask_it == masks.end()) continue;
    ++painted;
    const GrayImage& mask = mask_it->second;
    const auto image_it = images.find(id);
    const RgbImage* image = image_it == images.end() ? nullptr : &image_it->second;
    const Eigen::Matrix3d Rt = cam.pose.RotationMatrix().transpose();
    const Eigen::Vector3d center = cam.pose.translation();
    const CameraIntrinsics& K = cam.intrinsics;
    for (size_t i = 0; i < mesh->size(); ++i) {
      const Eigen::Vector3d p = Rt * (mesh->vertices[i] - center);
      if (!(p.z() > 0.0)) continue;
      int col = 0, row = 0;
      if (!PixelIndex(K, ProjectUnchecked(K, p), &col, &row)) continue;
      ++mesh->observations[i];
      const uint8_t label = mask.get(col, row, kUnknown);
      ++mesh->votes[i][label < kSemanticClassCount ? int{label} : int{kOther}];
      if (image != nullptr && image->Contains(col, row)) {
        const auto& rgb = image->at(col, row);
        mesh->color_sum[i] += Eigen::Vector3d(rgb[0], rgb[1], rgb[2]);
        ++mesh->color_count[i];
      }
    }
  }
  if (painted == 0) throw NoCameraError("no camera has a semantic mask");
}

RoadMesh BuildAndPaintMesh(ElevationField* field, const std::map<std::string, CameraState>& cameras,
                           const SemanticMasks& masks, const PhotometricImages& images,
                           const std::vector<Eigen::Vector3d>& training_points,
                           const MeshConfig& config, const ElevationConfig& elevation) {
  RoadMesh mesh = BuildMesh(*field, config.resolution);
  PaintMesh(cameras, masks, images, &mesh);
  if (config.refine_iterations <= 0 || training_points.empty()) return mesh;

  // Training points within refine_radius of an observed vertex.
  const int reach = static_cast<int>(std::ceil(config.refine_radius / mesh.resolution));
  std::vector<Eigen::Vector3d> near;
  for (const auto& p : training_points) {
    const int c = static_cast<int>(std::lround((p.x() - mesh.origin_x) / mesh.resolution));
    const int r = static_cast<int>(std::lround((p.y() - mesh.origin_y) / mesh.resolution));
    bool hit = false;
    for (int dr = -reach; dr <= reach && !hit; ++dr) {
      for (int dc = -reach; dc <= reach && !hit; ++dc) {
        const int cc = c + dc, rr = r + dr;
        if (cc < 0 || rr < 0 || cc >= mesh.cols || rr >= mesh.rows) continue;
        hit = mesh.observations[mesh.Index(cc, rr)] > 0;
      }
    }
    if (hit) near.push_back(p);
  }
  if (near.size() < 2) return mesh;
  RefineElevation(field, near, config.refine_iterations, elevation);
  UpdateMeshHeights(*field, &mesh);
  PaintMesh(cameras, masks, images, &mesh);
  return mesh;
}

}  // namespace roadrecon
