#include "roadrecon/sfm/triangulation.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "roadrecon/errors.h"

namespace roadrecon {
namespace {

Eigen::Matrix<double, 3, 4> WorldToCameraMatrix(const CameraState& cam) {
  const Eigen::Matrix3d Rt = cam.pose.RotationMatrix().transpose();
  Eigen::Matrix<double, 3, 4> P;
  P.leftCols<3>() = Rt;
  P.col(3) = -Rt * cam.pose.translation();
  return P;
}

void Refine(const std::vector<const CameraState*>& cameras,
            const std::vector<Eigen::Vector2d>& pixels, int iterations, Eigen::Vector3d* point) {
  for (int it = 0; it < iterations; ++it) {
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    double cost = 0.0;
    for (size_t i = 0; i < cameras.size(); ++i) {
      const CameraState& cam = *cameras[i];
      const Eigen::Matrix3d Rt = cam.pose.RotationMatrix().transpose();
      const Eigen::Vector3d pc = Rt * (*point - cam.pose.translation());
      if (pc.z() <= 0.0) return;
      const double iz = 1.0 / pc.z();
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << cam.intrinsics.fx * iz, 0, -cam.intrinsics.fx * pc.x() * iz * iz, 0,
          cam.intrinsics.fy * iz, -cam.intrinsics.fy * pc.y() * iz * iz;
      const Eigen::Matrix<double, 2, 3> J = dproj * Rt;
      const Eigen::Vector2d r = ProjectUnchecked(cam.intrinsics, pc) - pixels[i];
      H += J.transpose() * J;
      g += J.transpose() * r;
      cost += r.squaredNorm();
    }
    const Eigen::Vector3d step = H.ldlt().solve(-g);
    if (!step.allFinite()) return;
    const Eigen::Vector3d candidate = *point + step;
    double new_cost = 0.0;
    for (size_t i = 0; i < cameras.size(); ++i) {
      const Eigen::Vector3d pc = WorldToCamera(cameras[i]->pose, candidate);
      if (pc.z() <= 0.0) return;
      new_cost += (ProjectUnchecked(cameras[i]->intrinsics, pc) - pixels[i]).squaredNorm();
    }
    if (!(new_cost < cost)) return;
    *point = candidate;
    if (step.norm() < 1e-12 * (1.0 + point->norm())) return;
  }
}

enum class Failure { kNone, kLowParallax, kCheirality, kHighResidual };

// Applies the gates to a candidate point; returns the first failing gate.
Failure Check(const std::vector<const CameraState*>& cameras,
              const std::vector<Eigen::Vector2d>& pixels, const Eigen::Vector3d& point,
              const TriangulationConfig& config, double* max_error) {
  std::vector<Eigen::Vector3d> centers;
  centers.reserve(cameras.size());
  for (const auto* cam : cameras) centers.push_back(cam->pose.translation());
  if (!point.allFinite() || MaxTriangulationAngleDeg(centers, point) < config.min_angle_deg) {
    return Failure::kLowParallax;
  }
  for (const auto* cam : cameras) {
    if (WorldToCamera(cam->pose, point).z() <= config.min_depth) return Failure::kCheirality;
  }
  double worst = 0.0;
  for (size_t i = 0; i < cameras.size(); ++i) {
    worst = std::max(worst, ReprojectionResidual(*cameras[i], point, pixels[i]).norm());
  }
  if (max_error) *max_error = worst;
  if (!(worst < config.max_reprojection_px)) return Failure::kHighResidual;
  return Failure::kNone;
}

[[noreturn]] void Throw(Failure failure, int64_t track_id) {
  std::ostringstream msg;
  msg << "track " << track_id;
  switch (failure) {
    case Failure::kLowParallax:
      throw LowParallaxError(msg.str() + ": triangulation angle below threshold");
    case Failure::kCheirality:
      throw CheiralityError(msg.str() + ": point behind a camera");
    case Failure::kHighResidual:
      throw HighResidualError(msg.str() + ": reprojection error above gate");
    case Failure::kNone:
      break;
  }
  throw InvalidArgumentError(msg.str());
}

struct Gathered {
  std::vector<const CameraState*> cameras;
  std::vector<Eigen::Vector2d> pixels;
  std::vector<int> indices;
};

Gathered Gather(const Track& track, const std::map<std::string, CameraState>& cameras) {
  Gathered g;
  for (int k = 0; k < static_cast<int>(track.observations.size()); ++k) {
    const Observation& obs = track.observations[k];
    auto it = cameras.find(obs.image_id);
    if (it == cameras.end()) continue;
    g.cameras.push_back(&it->second);
    g.pixels.push_back(obs.pixel);
    g.indices.push_back(k);
  }
  if (g.cameras.size() < 2) {
    throw InvalidArgumentError("track " + std::to_string(track.track_id) +
                               ": fewer than two observations with known cameras");
  }
  return g;
}

}  // namespace

bool TriangulateDlt(const std::vector<const CameraState*>& cameras,
                    const std::vector<Eigen::Vector2d>& pixels, Eigen::Vector3d* point) {
  const int n = static_cast<int>(cameras.size());
  Eigen::MatrixXd A(2 * n, 4);
  for (int i = 0; i < n; ++i) {
    const CameraIntrinsics& K = cameras[i]->intrinsics;
    const double x = (pixels[i].x() - K.cx) / K.fx;
    const double y = (pixels[i].y() - K.cy) / K.fy;
    const Eigen::Matrix<double, 3, 4> P = WorldToCameraMatrix(*cameras[i]);
    A.row(2 * i) = x * P.row(2) - P.row(0);
    A.row(2 * i + 1) = y * P.row(2) - P.row(1);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::Vector4d h = svd.matrixV().col(3);
  if (std::abs(h(3)) < 1e-14 * h.head<3>().norm() || h(3) == 0.0) return false;
  *point = h.head<3>() / h(3);
  return point->allFinite();
}

Landmark Triangulate(const Track& track, const std::map<std::string, CameraState>& cameras,
                     const TriangulationConfig& config) {
  const Gathered g = Gather(track, cameras);
  Eigen::Vector3d point;
  if (!TriangulateDlt(g.cameras, g.pixels, &point)) Throw(Failure::kLowParallax, track.track_id);
  Failure failure = Check(g.cameras, g.pixels, point, config, nullptr);
  if (failure == Failure::kLowParallax || failure == Failure::kCheirality) {
    Throw(failure, track.track_id);
  }
  Refine(g.cameras, g.pixels, config.refine_iterations, &point);
  failure = Check(g.cameras, g.pixels, point, config, nullptr);
  if (failure != Failure::kNone) Throw(failure, track.track_id);
  return {track.track_id, point, g.indices};
}

Landmark TriangulateRobust(const Track& track,
                           const std::map<std::string, CameraState>& cameras,
                           const TriangulationConfig& config) {
  const Gathered g = Gather(track, cameras);
  const int n = static_cast<int>(g.cameras.size());
  // Pair hypotheses are limited to the first observations to bound the cost
  // on very long tracks.
  const int hyp = std::min(n, 12);

  std::vector<int> best_inliers;
  double best_error = 0.0;
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < hyp; ++i) {
    for (int j = i + 1; j < hyp; ++j) {
      Eigen::Vector3d point;
      const std::vector<const CameraState*> cams = {g.cameras[i], g.cameras[j]};
      const std::vector<Eigen::Vector2d> pix = {g.pixels[i], g.pixels[j]};
      if (!TriangulateDlt(cams, pix, &point)) {
        ++counts[static_cast<int>(Failure::kLowParallax)];
        continue;
      }
      const Failure f = Check(cams, pix, point, config, nullptr);
      if (f != Failure::kNone) {
        ++counts[static_cast<int>(f)];
        continue;
      }
      std::vector<int> inliers;
      double total = 0.0;
      for (int k = 0; k < n; ++k) {
        if (WorldToCamera(g.cameras[k]->pose, point).z() <= config.min_depth) continue;
        const double e = ReprojectionResidual(*g.cameras[k], point, g.pixels[k]).norm();
        if (e < config.max_reprojection_px) {
          inliers.push_back(k);
          total += e;
        }
      }
      if (inliers.size() > best_inliers.size() ||
          (inliers.size() == best_inliers.size() && total < best_error)) {
        best_inliers = std::move(inliers);
        best_error = total;
      }
    }
  }
  if (best_inliers.size() < 2) {
    Failure dominant = Failure::kLowParallax;
    for (int f = 1; f < 4; ++f) {
      if (counts[f] > counts[static_cast<int>(dominant)]) dominant = static_cast<Failure>(f);
    }
    Throw(dominant, track.track_id);
  }

  // Re-solve on the consensus set until membership settles.
  auto solve = [&](const std::vector<int>& members, Eigen::Vector3d* point) {
    std::vector<const CameraState*> cams;
    std::vector<Eigen::Vector2d> pix;
    for (int k : members) {
      cams.push_back(g.cameras[k]);
      pix.push_back(g.pixels[k]);
    }
    if (!TriangulateDlt(cams, pix, point)) return Failure::kLowParallax;
    Refine(cams, pix, config.refine_iterations, point);
    return Check(cams, pix, *point, config, nullptr);
  };
  std::vector<int> inliers = best_inliers;
  Eigen::Vector3d point;
  Failure failure = solve(inliers, &point);
  for (int round = 0; round < 3 && failure == Failure::kNone; ++round) {
    std::vector<int> next;
    for (int k = 0; k < n; ++k) {
      if (WorldToCamera(g.cameras[k]->pose, point).z() <= config.min_depth) continue;
      if (ReprojectionResidual(*g.cameras[k], point, g.pixels[k]).norm() <
          config.max_reprojection_px) {
        next.push_back(k);
      }
    }
    if (next == inliers || next.size() < 2) break;
    Eigen::Vector3d candidate;
    if (solve(next, &candidate) != Failure::kNone) break;
    inliers = std::move(next);
    point = candidate;
  }
  if (failure != Failure::kNone) Throw(failure, track.track_id);
  Landmark lm{track.track_id, point, {}};
  for (int k : inliers) lm.inliers.push_back(g.indices[k]);
  return lm;
}

}  // namespace roadrecon
