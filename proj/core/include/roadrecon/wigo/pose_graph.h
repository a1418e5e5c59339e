#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "roadrecon/geometry/pose.h"
#include "roadrecon/util/lm_solver.h"

namespace roadrecon {

struct StateNode {
  double timestamp = 0.0;  // seconds
  Pose pose;               // body-to-world
};

// Pre-fused wheel/IMU relative motion between consecutive nodes.
struct OdometryFactor {
  int from_index = 0;
  int to_index = 1;
  Pose relative;        // from -> to motion expressed in the `from` body frame
  double sigma_t = 0.0;  // meters
  double sigma_r = 0.0;  // radians
};

// Absolute position fix (no orientation).
struct GnssFactor {
  int node_index = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // world frame, meters
  double sigma = 0.0;                                  // meters
};

struct FusedTrajectory {
  std::vector<StateNode> nodes;
  double final_cost = 0.0;
  int iterations = 0;
  SolverSummary summary;
};

struct WigoConfig {
  int max_iterations = 100;
  double relative_cost_tolerance = 1e-9;
  double initial_damping = 1e-4;
  // Huber threshold on GNSS residuals, in multiples of each factor's sigma.
  double huber_sigmas = 3.0;
};

// Fuses odometry and GNSS constraints. `nodes` provides the initial estimate.
// Throws GaugeError (< 2 GNSS factors), DivergenceError, InvalidArgumentError.
FusedTrajectory FusePoseGraph(const std::vector<StateNode>& nodes,
                              const std::vector<OdometryFactor>& odometry,
                              const std::vector<GnssFactor>& gnss,
                              const WigoConfig& config = {});

// Total cost of the graph at the given node poses (the solver objective).
double PoseGraphCost(const std::vector<StateNode>& nodes,
                     const std::vector<OdometryFactor>& odometry,
                     const std::vector<GnssFactor>& gnss, const WigoConfig& config = {});

// Chains the odometry factors starting from `start`.
std::vector<Pose> DeadReckon(const Pose& start, const std::vector<OdometryFactor>& odometry);

// Initial node estimate: dead-reckoned odometry aligned to the GNSS fixes by
// a yaw + translation fit. Needs >= 2 GNSS fixes that are not coincident.
std::vector<StateNode> InitializeFromOdometry(const std::vector<double>& timestamps,
                                              const std::vector<OdometryFactor>& odometry,
                                              const std::vector<GnssFactor>& gnss);

// Whitened odometry residual [translation / sigma_t; rotation / sigma_r] and
// its Jacobians w.r.t. the tangent updates [dt; dtheta] of both nodes.
struct OdometryLinearization {
  Eigen::Matrix<double, 6, 1> residual;
  Eigen::Matrix<double, 6, 6> jacobian_from;
  Eigen::Matrix<double, 6, 6> jacobian_to;
};
OdometryLinearization LinearizeOdometry(const Pose& from, const Pose& to,
                                        const OdometryFactor& factor);

// Position interpolation is linear, orientation uses slerp. Throws
// OutOfRangeError when t lies outside the trajectory.
Pose InterpolatePose(const FusedTrajectory& trajectory, double t);
Pose InterpolatePose(const std::vector<StateNode>& nodes, double t);

}  // namespace roadrecon
