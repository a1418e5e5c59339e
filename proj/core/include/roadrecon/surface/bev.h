#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "roadrecon/surface/mesh.h"
#include "roadrecon/util/raster.h"

namespace roadrecon {

// Top-down raster. Cell (c, r) covers [origin_x + c * res, origin_x + (c+1) * res)
// in x and the same in y; rows increase with world y.
template <typename T>
struct BevRaster {
  Raster<T> cells;
  double origin_x = 0.0;
  double origin_y = 0.0;
  double resolution = 0.1;

  Eigen::Vector2d CellCenter(int col, int row) const {
    return {origin_x + (col + 0.5) * resolution, origin_y + (row + 0.5) * resolution};
  }
  bool CellOf(double x, double y, int* col, int* row) const {
    *col = static_cast<int>(std::floor((x - origin_x) / resolution));
    *row = static_cast<int>(std::floor((y - origin_y) / resolution));
    return cells.Contains(*col, *row);
  }
};

struct BevSet {
  BevRaster<uint8_t> semantic;
  BevRaster<std::array<uint8_t, 3>> color;
  BevRaster<double> elevation;  // meters; 0 in empty cells
  BevRaster<uint8_t> coverage;  // 1 where an observed vertex was rasterized
};

// Nearest-vertex rasterization of observed mesh vertices. Cells whose nearest
// observed vertex is farther than `resolution` keep the background 0. Cell
// centers coincide with vertices when `resolution` equals the mesh's.
BevSet ExportBev(const RoadMesh& mesh, double resolution);

// 8-bit elevation: 0 is background, q >= 1 decodes as z_min + (q - 1) * z_scale.
struct QuantizedElevation {
  GrayImage image;
  double z_min = 0.0;
  double z_scale = 1.0;
};
QuantizedElevation QuantizeElevation(const BevRaster<double>& elevation,
                                     const BevRaster<uint8_t>& occupancy);

// Writes `<prefix>_semantic.pgm`, `<prefix>_color.ppm`, `<prefix>_elevation.pgm`,
// each with a `.txt` sidecar holding `origin_x origin_y resolution` (plus
// `z_min z_scale` for elevation).
void WriteBev(const std::string& prefix, const BevSet& bev);
BevRaster<uint8_t> ReadBevSemantic(const std::string& prefix);

}  // namespace roadrecon
