#include "roadrecon/surface/bev.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "roadrecon/errors.h"

namespace roadrecon {

BevSet ExportBev(const RoadMesh& mesh, double resolution) {
  if (!(resolution > 0.0)) throw InvalidArgumentError("BEV resolution must be positive");
  BevSet bev;
  const double x_last = mesh.origin_x + (mesh.cols - 1) * mesh.resolution;
  const double y_last = mesh.origin_y + (mesh.rows - 1) * mesh.resolution;
  const int width = static_cast<int>(std::floor((x_last - mesh.origin_x) / resolution + 1e-9)) + 1;
  const int height = static_cast<int>(std::floor((y_last - mesh.origin_y) / resolution + 1e-9)) + 1;
  const double ox = mesh.origin_x - 0.5 * resolution;
  const double oy = mesh.origin_y - 0.5 * resolution;
  bev.semantic = {GrayImage(width, height, 0), ox, oy, resolution};
  bev.color = {RgbImage(width, height, {0, 0, 0}), ox, oy, resolution};
  bev.elevation = {Raster<double>(width, height, 0.0), ox, oy, resolution};
  bev.coverage = {GrayImage(width, height, 0), ox, oy, resolution};

  // Observed vertices searched in a window of grid steps around each cell.
  const int reach = static_cast<int>(std::ceil(resolution / mesh.resolution));
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const Eigen::Vector2d center = bev.semantic.CellCenter(c, r);
      const int vc = static_cast<int>(std::lround((center.x() - mesh.origin_x) / mesh.resolution));
      const int vr = static_cast<int>(std::lround((center.y() - mesh.origin_y) / mesh.resolution));
      int best = -1;
      double best_d2 = resolution * resolution * (1.0 + 1e-9);
      for (int dr = -reach; dr <= reach; ++dr) {
        for (int dc = -reach; dc <= reach; ++dc) {
          const int cc = vc + dc, rr = vr + dr;
          if (cc < 0 || rr < 0 || cc >= mesh.cols || rr >= mesh.rows) continue;
          const int idx = mesh.Index(cc, rr);
          if (mesh.observations[idx] == 0) continue;
          const double d2 = (mesh.vertices[idx].head<2>() - center).squaredNorm();
          if (d2 < best_d2) {  // strict: scan order breaks ties
            best_d2 = d2;
            best = idx;
          }
        }
      }
      if (best < 0) continue;
      bev.semantic.cells.at(c, r) = mesh.VertexClass(best);
      bev.color.cells.at(c, r) = mesh.VertexColor(best);
      bev.elevation.cells.at(c, r) = mesh.vertices[best].z();
      bev.coverage.cells.at(c, r) = 1;
    }
  }
  return bev;
}

QuantizedElevation QuantizeElevation(const BevRaster<double>& elevation,
                                     const BevRaster<uint8_t>& occupancy) {
  QuantizedElevation q;
  const auto& z = elevation.cells;
  q.image = GrayImage(z.width(), z.height(), 0);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int r = 0; r < z.height(); ++r) {
    for (int c = 0; c < z.width(); ++c) {
      if (occupancy.cells.at(c, r) == 0) continue;
      lo = std::min(lo, z.at(c, r));
      hi = std::max(hi, z.at(c, r));
    }
  }
  if (!std::isfinite(lo)) return q;
  q.z_min = lo;
  q.z_scale = std::max((hi - lo) / 254.0, 1e-6);
  for (int r = 0; r < z.height(); ++r) {
    for (int c = 0; c < z.width(); ++c) {
      if (occupancy.cells.at(c, r) == 0) continue;
      const long level = 1 + std::lround((z.at(c, r) - lo) / q.z_scale);
      q.image.at(c, r) = static_cast<uint8_t>(std::clamp(level, 1L, 255L));
    }
  }
  return q;
}

namespace {

template <typename T>
void WriteSidecar(const std::string& path, const BevRaster<T>& raster, const double* z = nullptr) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << std::setprecision(17) << raster.origin_x << ' ' << raster.origin_y << ' '
      << raster.resolution;
  if (z != nullptr) out << ' ' << z[0] << ' ' << z[1];
  out << '\n';
  if (!out) throw IoError("cannot write " + path);
}

}  // namespace

void WriteBev(const std::string& prefix, const BevSet& bev) {
  WritePgm(prefix + "_semantic.pgm", bev.semantic.cells);
  WriteSidecar(prefix + "_semantic.txt", bev.semantic);
  WritePpm(prefix + "_color.ppm", bev.color.cells);
  WriteSidecar(prefix + "_color.txt", bev.color);
  const QuantizedElevation q = QuantizeElevation(bev.elevation, bev.coverage);
  WritePgm(prefix + "_elevation.pgm", q.image);
  const double z[2] = {q.z_min, q.z_scale};
  WriteSidecar(prefix + "_elevation.txt", bev.elevation, z);
}

BevRaster<uint8_t> ReadBevSemantic(const std::string& prefix) {
  BevRaster<uint8_t> raster;
  raster.cells = ReadPgm(prefix + "_semantic.pgm");
  const std::string path = prefix + "_semantic.txt";
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  if (!(in >> raster.origin_x >> raster.origin_y >> raster.resolution) ||
      !(raster.resolution > 0.0)) {
    throw ParseError("malformed raster sidecar " + path);
  }
  return raster;
}

}  // namespace roadrecon
