#pragma once

#include <map>
#include <string>
#include <vector>

#include "roadrecon/sfm/bundle_adjustment.h"
#include "roadrecon/sfm/model.h"
#include "roadrecon/sfm/rig.h"
#include "roadrecon/sfm/triangulation.h"

namespace roadrecon {

struct IterativeBaConfig {
  int max_iterations = 5;
  double max_refinement_change = 0.001;
  double reprojection_gate_px = 4.0;
  // Gate of the first re-triangulation, while poses are still odometry priors.
  double initial_gate_px = 12.0;
  double min_angle_deg = 1.0;
  double image_error_gate_px = 6.0;
  // Use rigid BA when rig frames are supplied.
  bool rigid = true;
  RigidBundleConfig ba;
};

struct IterationStats {
  size_t observations = 0;  // O_i
  size_t filtered = 0;      // C_i
  double ratio = 0.0;       // R_i = C_i / O_i
  double mean_error_px = 0.0;
  size_t landmarks = 0;
  SolverSummary ba;
};

struct IterativeBaStats {
  std::vector<IterationStats> iterations;
  std::vector<std::string> removed_images;  // image error gate
  std::vector<std::string> flagged_images;  // rigid prior check
};

// Failure counts by error name, e.g. {"LowParallaxError": 3}.
using FailureCounts = std::map<std::string, int>;

// Rebuilds every landmark from its track with outlier-tolerant triangulation.
FailureCounts RetriangulateAll(ReconstructionModel* model, const TriangulationConfig& config);

// Removes observations whose residual exceeds the gate and landmarks that end
// with fewer than two observations or too little parallax. Returns the number
// of observations removed.
size_t FilterLandmarks(ReconstructionModel* model, double gate_px, double min_angle_deg);

// Drops images whose mean residual exceeds the gate; returns their ids.
std::vector<std::string> FilterImagesWithReprojError(ReconstructionModel* model, double gate_px);

// Alternates re-triangulation, BA and filtering until the filtered ratio
// falls to `max_refinement_change` or the iteration cap is reached. With
// `frames` non-null and `config.rigid`, each BA is a rigid BA. Throws
// EmptyModelError when no landmark survives.
IterativeBaStats IterativeBundleAdjust(ReconstructionModel* model, std::vector<RigFrame>* frames,
                                       const IterativeBaConfig& config = {});

}  // namespace roadrecon
