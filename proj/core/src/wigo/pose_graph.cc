#include "roadrecon/wigo/pose_graph.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "roadrecon/errors.h"

namespace roadrecon {
namespace {

constexpr int kBlock = 6;

void ValidateGraph(const std::vector<StateNode>& nodes,
                   const std::vector<OdometryFactor>& odometry,
                   const std::vector<GnssFactor>& gnss) {
  if (nodes.size() < 2) {
    throw InvalidArgumentError("FusePoseGraph: need at least 2 nodes");
  }
  for (size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i].timestamp > nodes[i - 1].timestamp)) {
      throw InvalidArgumentError("FusePoseGraph: node timestamps must be strictly increasing");
    }
  }
  std::vector<bool> linked(nodes.size() - 1, false);
  const int n = static_cast<int>(nodes.size());
  for (const auto& f : odometry) {
    if (f.from_index < 0 || f.to_index != f.from_index + 1 || f.to_index >= n) {
      std::ostringstream msg;
      msg << "FusePoseGraph: odometry factor " << f.from_index << "->" << f.to_index
          << " does not link consecutive nodes";
      throw InvalidArgumentError(msg.str());
    }
    if (!(f.sigma_t > 0.0) || !(f.sigma_r > 0.0)) {
      throw InvalidArgumentError("FusePoseGraph: odometry sigmas must be positive");
    }
    linked[f.from_index] = true;
  }
  for (size_t i = 0; i < linked.size(); ++i) {
    if (!linked[i]) {
      std::ostringstream msg;
      msg << "FusePoseGraph: no odometry factor between nodes " << i << " and " << i + 1;
      throw InvalidArgumentError(msg.str());
    }
  }
  if (gnss.size() < 2) {
    std::ostringstream msg;
    msg << "FusePoseGraph: " << gnss.size()
        << " GNSS factor(s); at least 2 are needed to fix the gauge";
    throw GaugeError(msg.str());
  }
  for (const auto& g : gnss) {
    if (g.node_index < 0 || g.node_index >= n) {
      throw InvalidArgumentError("FusePoseGraph: GNSS factor references a missing node");
    }
    if (!(g.sigma > 0.0)) {
      throw InvalidArgumentError("FusePoseGraph: GNSS sigma must be positive");
    }
  }
}

// Huber cost on a squared whitened norm, and its IRLS weight.
double HuberCost(double squared, double delta) {
  if (squared <= delta * delta) return squared;
  return 2.0 * delta * std::sqrt(squared) - delta * delta;
}
double HuberWeight(double squared, double delta) {
  if (squared <= delta * delta) return 1.0;
  return delta / std::sqrt(squared);
}

class PoseGraphProblem : public LeastSquaresProblem {
 public:
  PoseGraphProblem(std::vector<Pose> poses, const std::vector<OdometryFactor>& odometry,
                   const std::vector<GnssFactor>& gnss, const WigoConfig& config)
      : poses_(std::move(poses)), odometry_(odometry), gnss_(gnss), config_(config) {}

  const std::vector<Pose>& poses() const { return poses_; }

  double Cost() override {
    double cost = 0.0;
    for (const auto& f : odometry_) {
      cost += LinearizeOdometry(poses_[f.from_index], poses_[f.to_index], f)
                  .residual.squaredNorm();
    }
    for (const auto& g : gnss_) {
      const double sq =
          ((poses_[g.node_index].translation() - g.position) / g.sigma).squaredNorm();
      cost += HuberCost(sq, config_.huber_sigmas);
    }
    return cost;
  }

  void Linearize() override {
    const int dim = kBlock * static_cast<int>(poses_.size());
    gradient_ = Eigen::VectorXd::Zero(dim);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(odometry_.size() * 4 * 36 + gnss_.size() * 9);

    auto add_block = [&](int row_block, int col_block, const Eigen::MatrixXd& m) {
      for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
          // Explicit zeros keep the sparsity pattern fixed across iterations.
          triplets.emplace_back(kBlock * row_block + r, kBlock * col_block + c, m(r, c));
        }
      }
    };

    for (const auto& f : odometry_) {
      const auto lin = LinearizeOdometry(poses_[f.from_index], poses_[f.to_index], f);
      const int a = f.from_index;
      const int b = f.to_index;
      add_block(a, a, lin.jacobian_from.transpose() * lin.jacobian_from);
      add_block(a, b, lin.jacobian_from.transpose() * lin.jacobian_to);
      add_block(b, a, lin.jacobian_to.transpose() * lin.jacobian_from);
      add_block(b, b, lin.jacobian_to.transpose() * lin.jacobian_to);
      gradient_.segment<kBlock>(kBlock * a) += lin.jacobian_from.transpose() * lin.residual;
      gradient_.segment<kBlock>(kBlock * b) += lin.jacobian_to.transpose() * lin.residual;
    }
    for (const auto& g : gnss_) {
      const Eigen::Vector3d r = (poses_[g.node_index].translation() - g.position) / g.sigma;
      const double w = HuberWeight(r.squaredNorm(), config_.huber_sigmas);
      const double inv_var = w / (g.sigma * g.sigma);
      for (int k = 0; k < 3; ++k) {
        triplets.emplace_back(kBlock * g.node_index + k, kBlock * g.node_index + k, inv_var);
      }
      gradient_.segment<3>(kBlock * g.node_index) += (w / g.sigma) * r;
    }
    hessian_.resize(dim, dim);
    hessian_.setFromTriplets(triplets.begin(), triplets.end());
  }

  bool SolveDamped(double lambda, Eigen::VectorXd* step) override {
    Eigen::SparseMatrix<double> damped = hessian_;
    for (int i = 0; i < damped.rows(); ++i) damped.coeffRef(i, i) += lambda;
    if (!pattern_analyzed_) {
      solver_.analyzePattern(damped);
      pattern_analyzed_ = true;
    }
    solver_.factorize(damped);
    if (solver_.info() != Eigen::Success) return false;
    *step = solver_.solve(-gradient_);
    return solver_.info() == Eigen::Success;
  }

  void ApplyStep(const Eigen::VectorXd& step) override {
    for (size_t i = 0; i < poses_.size(); ++i) {
      const auto block = step.segment<kBlock>(kBlock * static_cast<int>(i));
      poses_[i] = poses_[i].Retract(block.head<3>(), block.tail<3>());
    }
  }

  void SaveState() override { saved_ = poses_; }
  void RestoreState() override { poses_ = saved_; }

 private:
  std::vector<Pose> poses_;
  std::vector<Pose> saved_;
  const std::vector<OdometryFactor>& odometry_;
  const std::vector<GnssFactor>& gnss_;
  WigoConfig config_;
  Eigen::SparseMatrix<double> hessian_;
  Eigen::VectorXd gradient_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  bool pattern_analyzed_ = false;
};

}  // namespace

OdometryLinearization LinearizeOdometry(const Pose& from, const Pose& to,
                                        const OdometryFactor& factor) {
  const Eigen::Matrix3d Ri = from.RotationMatrix();
  const Eigen::Matrix3d Rj = to.RotationMatrix();
  const Eigen::Vector3d v = Ri.transpose() * (to.translation() - from.translation());
  const Eigen::Quaterniond error_q =
      factor.relative.rotation().conjugate() * from.rotation().conjugate() * to.rotation();
  const Eigen::Vector3d e = LogSO3(error_q);
  const Eigen::Matrix3d jr_inv = RightJacobianInverseSO3(e);

  const double wt = 1.0 / factor.sigma_t;
  const double wr = 1.0 / factor.sigma_r;

  OdometryLinearization lin;
  lin.residual.head<3>() = wt * (v - factor.relative.translation());
  lin.residual.tail<3>() = wr * e;

  lin.jacobian_from.setZero();
  lin.jacobian_from.block<3, 3>(0, 0) = -wt * Ri.transpose();
  lin.jacobian_from.block<3, 3>(0, 3) = wt * Skew(v);
  lin.jacobian_from.block<3, 3>(3, 3) = -wr * jr_inv * Rj.transpose() * Ri;

  lin.jacobian_to.setZero();
  lin.jacobian_to.block<3, 3>(0, 0) = wt * Ri.transpose();
  lin.jacobian_to.block<3, 3>(3, 3) = wr * jr_inv;
  return lin;
}

double PoseGraphCost(const std::vector<StateNode>& nodes,
                     const std::vector<OdometryFactor>& odometry,
                     const std::vector<GnssFactor>& gnss, const WigoConfig& config) {
  std::vector<Pose> poses;
  for (const auto& n : nodes) poses.push_back(n.pose);
  PoseGraphProblem problem(std::move(poses), odometry, gnss, config);
  return problem.Cost();
}

FusedTrajectory FusePoseGraph(const std::vector<StateNode>& nodes,
                              const std::vector<OdometryFactor>& odometry,
                              const std::vector<GnssFactor>& gnss,
                              const WigoConfig& config) {
  ValidateGraph(nodes, odometry, gnss);
  std::vector<Pose> poses;
  poses.reserve(nodes.size());
  for (const auto& n : nodes) poses.push_back(n.pose);

  PoseGraphProblem problem(std::move(poses), odometry, gnss, config);
  SolverOptions options;
  options.max_iterations = config.max_iterations;
  options.relative_cost_tolerance = config.relative_cost_tolerance;
  options.initial_lambda = config.initial_damping;

  FusedTrajectory result;
  result.summary = SolveLevenbergMarquardt(problem, options);
  result.final_cost = result.summary.final_cost;
  result.iterations = result.summary.iterations;
  result.nodes = nodes;
  for (size_t i = 0; i < nodes.size(); ++i) {
    result.nodes[i].pose = problem.poses()[i];
  }
  return result;
}

std::vector<Pose> DeadReckon(const Pose& start, const std::vector<OdometryFactor>& odometry) {
  std::vector<OdometryFactor> sorted = odometry;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.from_index < b.from_index; });
  std::vector<Pose> poses = {start};
  for (const auto& f : sorted) {
    if (f.from_index != static_cast<int>(poses.size()) - 1) {
      throw InvalidArgumentError("DeadReckon: odometry chain has a gap");
    }
    poses.push_back(poses.back() * f.relative);
  }
  return poses;
}

std::vector<StateNode> InitializeFromOdometry(const std::vector<double>& timestamps,
                                              const std::vector<OdometryFactor>& odometry,
                                              const std::vector<GnssFactor>& gnss) {
  const std::vector<Pose> reckoned = DeadReckon(Pose::Identity(), odometry);
  if (reckoned.size() != timestamps.size()) {
    throw InvalidArgumentError("InitializeFromOdometry: node count mismatch");
  }
  if (gnss.size() < 2) {
    throw GaugeError("InitializeFromOdometry: need at least 2 GNSS fixes");
  }
  // Yaw + translation fit of dead-reckoned positions onto the fixes.
  Eigen::Vector3d mean_src = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean_dst = Eigen::Vector3d::Zero();
  for (const auto& g : gnss) {
    if (g.node_index < 0 || g.node_index >= static_cast<int>(reckoned.size())) {
      throw InvalidArgumentError("InitializeFromOdometry: GNSS factor references a missing node");
    }
    mean_src += reckoned[g.node_index].translation();
    mean_dst += g.position;
  }
  mean_src /= static_cast<double>(gnss.size());
  mean_dst /= static_cast<double>(gnss.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& g : gnss) {
    const Eigen::Vector2d a = (reckoned[g.node_index].translation() - mean_src).head<2>();
    const Eigen::Vector2d b = (g.position - mean_dst).head<2>();
    sxx += a.dot(b);
    sxy += a.x() * b.y() - a.y() * b.x();
  }
  if (std::hypot(sxx, sxy) < 1e-12) {
    throw GaugeError("InitializeFromOdometry: GNSS fixes do not constrain heading");
  }
  const double yaw = std::atan2(sxy, sxx);
  const Pose rot = Pose::FromYaw(yaw);
  const Pose align(rot.rotation(), mean_dst - rot.rotation() * mean_src);

  std::vector<StateNode> nodes(timestamps.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].timestamp = timestamps[i];
    nodes[i].pose = align * reckoned[i];
  }
  return nodes;
}

Pose InterpolatePose(const std::vector<StateNode>& nodes, double t) {
  if (nodes.empty() || t < nodes.front().timestamp || t > nodes.back().timestamp) {
    std::ostringstream msg;
    msg << "timestamp " << t << " outside trajectory span";
    if (!nodes.empty()) {
      msg << " [" << nodes.front().timestamp << ", " << nodes.back().timestamp << "]";
    }
    throw OutOfRangeError(msg.str());
  }
  auto upper = std::lower_bound(nodes.begin(), nodes.end(), t,
                                [](const StateNode& n, double v) { return n.timestamp < v; });
  if (upper->timestamp == t) return upper->pose;
  const auto lower = upper - 1;
  const double alpha = (t - lower->timestamp) / (upper->timestamp - lower->timestamp);
  return Interpolate(lower->pose, upper->pose, alpha);
}

Pose InterpolatePose(const FusedTrajectory& trajectory, double t) {
  return InterpolatePose(trajectory.nodes, t);
}

}  // namespace roadrecon
