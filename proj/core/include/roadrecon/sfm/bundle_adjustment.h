#pragma once

#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roadrecon/sfm/model.h"
#include "roadrecon/sfm/rig.h"
#include "roadrecon/util/lm_solver.h"

namespace roadrecon {

struct BundleConfig {
  int max_iterations = 50;
  double relative_cost_tolerance = 1e-10;
  double initial_lambda = 1e-4;
  // Hold the first pose block constant (gauge).
  bool fix_gauge = true;
  bool fix_all_poses = false;
  bool fix_landmarks = false;
  std::set<std::string> fixed_images;
};

struct BundleResult {
  SolverSummary summary;
  int pose_blocks = 0;      // optimized 6-DoF blocks
  int landmark_blocks = 0;  // optimized 3-DoF blocks
  int ParameterCount() const { return 6 * pose_blocks + 3 * landmark_blocks; }
};

// Residual pi(T * E, X) - u of one observation, where T is the optimized
// pose block and E the fixed camera-to-block transform (identity for
// ordinary BA). Jacobians are w.r.t. the block's tangent update [dt; dtheta]
// and the landmark position; either pointer may be null.
Eigen::Vector2d ObservationResidual(const Pose& block, const Pose& camera_to_block,
                                    const CameraIntrinsics& intrinsics,
                                    const Eigen::Vector3d& point, const Eigen::Vector2d& pixel,
                                    Eigen::Matrix<double, 2, 6>* jacobian_pose,
                                    Eigen::Matrix<double, 2, 3>* jacobian_point);

// Ordinary BA: every camera is its own pose block. Minimizes the sum of
// squared pixel residuals of the active observations. Throws DivergenceError
// on a non-finite initial cost and InvalidArgumentError on an empty model.
BundleResult BundleAdjust(ReconstructionModel* model, const BundleConfig& config = {});

struct RigidBundleConfig : BundleConfig {
  // A camera is flagged when its independently resected pose differs from
  // the rigid prediction by more than either bound.
  double max_deviation_m = 0.05;
  double max_deviation_deg = 0.5;
  bool remove_flagged = true;
};

struct RigidBundleResult : BundleResult {
  std::vector<std::string> flagged;
};

// Rigid BA: one body pose per rig frame, camera poses derived through the
// fixed member transforms. Updates frame body poses and model cameras.
// Throws MissingRigError when a model camera belongs to no frame.
RigidBundleResult RigidBundleAdjust(std::vector<RigFrame>* frames, ReconstructionModel* model,
                                    const RigidBundleConfig& config = {});

// Pose of one camera re-estimated from its observations with the landmarks
// held fixed. Returns false when it sees fewer than 3 landmarks.
bool ResectCamera(const ReconstructionModel& model, const std::string& image_id, Pose* pose);

}  // namespace roadrecon
