#pragma once

#include <map>
#include <string>
#include <vector>

#include "roadrecon/sfm/model.h"

namespace roadrecon {

struct TriangulationConfig {
  double max_reprojection_px = 4.0;
  double min_angle_deg = 1.0;
  double min_depth = 1e-6;
  // Gauss-Newton polish of the DLT point on reprojection error.
  int refine_iterations = 5;
};

// Multi-view DLT using every observation of the track whose camera is known.
// The gates are checked in order: parallax (LowParallaxError), cheirality
// (CheiralityError), residual (HighResidualError).
Landmark Triangulate(const Track& track, const std::map<std::string, CameraState>& cameras,
                     const TriangulationConfig& config = {});

// Outlier-tolerant variant: every observation pair proposes a point, the
// hypothesis with the most observations inside the residual gate wins and is
// re-solved on those inliers. Throws the same errors as Triangulate when no
// hypothesis survives; the error reflects the most common failure.
Landmark TriangulateRobust(const Track& track,
                           const std::map<std::string, CameraState>& cameras,
                           const TriangulationConfig& config = {});

// DLT on explicit camera/pixel lists, no gating. Returns false when the
// solution is at infinity or not finite.
bool TriangulateDlt(const std::vector<const CameraState*>& cameras,
                    const std::vector<Eigen::Vector2d>& pixels, Eigen::Vector3d* point);

}  // namespace roadrecon
