#include "roadrecon/sfm/bundle_adjustment.h"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "roadrecon/errors.h"

namespace roadrecon {

Eigen::Vector2d ObservationResidual(const Pose& block, const Pose& camera_to_block,
                                    const CameraIntrinsics& intrinsics,
                                    const Eigen::Vector3d& point, const Eigen::Vector2d& pixel,
                                    Eigen::Matrix<double, 2, 6>* jacobian_pose,
                                    Eigen::Matrix<double, 2, 3>* jacobian_point) {
  const Eigen::Matrix3d Rt = block.RotationMatrix().transpose();
  const Eigen::Matrix3d Re_t = camera_to_block.RotationMatrix().transpose();
  const Eigen::Vector3d p_block = Rt * (point - block.translation());
  const Eigen::Vector3d p_cam = Re_t * (p_block - camera_to_block.translation());
  const Eigen::Vector2d residual = ProjectUnchecked(intrinsics, p_cam) - pixel;
  if (jacobian_pose || jacobian_point) {
    const double iz = 1.0 / p_cam.z();
    Eigen::Matrix<double, 2, 3> dproj;
    dproj << intrinsics.fx * iz, 0.0, -intrinsics.fx * p_cam.x() * iz * iz, 0.0,
        intrinsics.fy * iz, -intrinsics.fy * p_cam.y() * iz * iz;
    const Eigen::Matrix<double, 2, 3> d_block = dproj * Re_t;
    if (jacobian_pose) {
      // p_block(T Exp(dtheta), t + dt) ~ p_block - R^T dt + [p_block]x dtheta.
      jacobian_pose->leftCols<3>() = -d_block * Rt;
      jacobian_pose->rightCols<3>() = d_block * Skew(p_block);
    }
    if (jacobian_point) *jacobian_point = d_block * Rt;
  }
  return residual;
}

namespace {

struct CameraBinding {
  int block = 0;
  Pose camera_to_block;
  const CameraIntrinsics* intrinsics = nullptr;
};

struct ResidualTerm {
  int camera = 0;
  int landmark = 0;
  Eigen::Vector2d pixel;
};

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Pose blocks and landmarks with Schur elimination of the landmarks. The
// reduced camera system is sparse; its pattern depends only on which blocks
// share landmarks, so it is analyzed once per problem.
class BundleProblem : public LeastSquaresProblem {
 public:
  BundleProblem(std::vector<Pose> blocks, std::vector<bool> block_fixed,
                std::vector<CameraBinding> cameras, std::vector<Eigen::Vector3d> points,
                bool points_fixed, std::vector<ResidualTerm> terms)
      : blocks_(std::move(blocks)),
        cameras_(std::move(cameras)),
        points_(std::move(points)),
        points_fixed_(points_fixed),
        terms_(std::move(terms)) {
    block_index_.assign(blocks_.size(), -1);
    for (size_t b = 0; b < blocks_.size(); ++b) {
      if (!block_fixed[b]) block_index_[b] = free_blocks_++;
    }
    // Landmark -> distinct free blocks observing it.
    point_blocks_.resize(points_.size());
    for (const auto& t : terms_) {
      const int b = block_index_[cameras_[t.camera].block];
      if (b < 0) continue;
      auto& list = point_blocks_[t.landmark];
      if (std::find(list.begin(), list.end(), b) == list.end()) list.push_back(b);
    }
    for (auto& list : point_blocks_) std::sort(list.begin(), list.end());
  }

  int free_blocks() const { return free_blocks_; }
  int free_points() const { return points_fixed_ ? 0 : static_cast<int>(points_.size()); }
  const std::vector<Pose>& blocks() const { return blocks_; }
  const std::vector<Eigen::Vector3d>& points() const { return points_; }

  double Cost() override {
    double cost = 0.0;
    for (const auto& t : terms_) {
      const CameraBinding& cam = cameras_[t.camera];
      cost += ObservationResidual(blocks_[cam.block], cam.camera_to_block, *cam.intrinsics,
                                  points_[t.landmark], t.pixel, nullptr, nullptr)
                  .squaredNorm();
    }
    return std::isfinite(cost) ? cost : std::numeric_limits<double>::infinity();
  }

  void Linearize() override {
    U_.assign(free_blocks_, Mat6::Zero());
    gc_.assign(free_blocks_, Vec6::Zero());
    V_.assign(points_.size(), Eigen::Matrix3d::Zero());
    gp_.assign(points_.size(), Eigen::Vector3d::Zero());
    W_.assign(points_.size(), std::vector<Mat63>());
    for (size_t j = 0; j < points_.size(); ++j) {
      W_[j].assign(point_blocks_[j].size(), Mat63::Zero());
    }
    Eigen::Matrix<double, 2, 6> Jc;
    Eigen::Matrix<double, 2, 3> Jp;
    for (const auto& t : terms_) {
      const CameraBinding& cam = cameras_[t.camera];
      const Eigen::Vector2d r =
          ObservationResidual(blocks_[cam.block], cam.camera_to_block, *cam.intrinsics,
                              points_[t.landmark], t.pixel, &Jc, &Jp);
      const int b = block_index_[cam.block];
      if (b >= 0) {
        U_[b] += Jc.transpose() * Jc;
        gc_[b] += Jc.transpose() * r;
      }
      V_[t.landmark] += Jp.transpose() * Jp;
      gp_[t.landmark] += Jp.transpose() * r;
      if (b >= 0 && !points_fixed_) {
        const auto& list = point_blocks_[t.landmark];
        const size_t slot = std::lower_bound(list.begin(), list.end(), b) - list.begin();
        W_[t.landmark][slot] += Jc.transpose() * Jp;
      }
    }
  }

  bool SolveDamped(double lambda, Eigen::VectorXd* step) override {
    const int nc = 6 * free_blocks_;
    const int np = free_points() * 3;
    step->setZero(nc + np);

    std::vector<Eigen::Matrix3d> Vinv(points_.size());
    if (!points_fixed_) {
      for (size_t j = 0; j < points_.size(); ++j) {
        const Eigen::Matrix3d damped = V_[j] + lambda * Eigen::Matrix3d::Identity();
        Eigen::LLT<Eigen::Matrix3d> llt(damped);
        if (llt.info() != Eigen::Success) return false;
        Vinv[j] = llt.solve(Eigen::Matrix3d::Identity());
      }
    }

    Eigen::VectorXd dc = Eigen::VectorXd::Zero(nc);
    if (nc > 0) {
      Eigen::VectorXd rhs(nc);
      // Accumulate 6x6 blocks on the fixed block pattern, then emit each
      // block once. Every pattern block is emitted, zero or not, so the
      // sparsity pattern never changes between calls.
      BuildSchurPattern();
      std::vector<Mat6> blocks(pair_blocks_.size(), Mat6::Zero());
      for (int b = 0; b < free_blocks_; ++b) {
        blocks[b] += U_[b] + lambda * Mat6::Identity();
        rhs.segment<6>(6 * b) = -gc_[b];
      }
      if (!points_fixed_) {
        for (size_t j = 0; j < points_.size(); ++j) {
          const auto& list = point_blocks_[j];
          const auto& slots = point_pair_slots_[j];
          for (size_t x = 0; x < list.size(); ++x) {
            const Mat63 WV = W_[j][x] * Vinv[j];
            rhs.segment<6>(6 * list[x]) += WV * gp_[j];
            for (size_t y = 0; y < list.size(); ++y) {
              blocks[slots[x * list.size() + y]].noalias() -= WV * W_[j][y].transpose();
            }
          }
        }
      }
      std::vector<Eigen::Triplet<double>> triplets;
      triplets.reserve(36 * pair_blocks_.size());
      for (size_t k = 0; k < pair_blocks_.size(); ++k) {
        const auto [a, b] = pair_blocks_[k];
        for (int r = 0; r < 6; ++r) {
          for (int c = 0; c < 6; ++c) triplets.emplace_back(6 * a + r, 6 * b + c, blocks[k](r, c));
        }
      }
      Eigen::SparseMatrix<double> S(nc, nc);
      S.setFromTriplets(triplets.begin(), triplets.end());
      if (!pattern_analyzed_) {
        solver_.analyzePattern(S);
        pattern_analyzed_ = true;
      }
      solver_.factorize(S);
      if (solver_.info() != Eigen::Success) return false;
      dc = solver_.solve(rhs);
      if (solver_.info() != Eigen::Success) return false;
      step->head(nc) = dc;
    }
    if (!points_fixed_) {
      for (size_t j = 0; j < points_.size(); ++j) {
        Eigen::Vector3d r = -gp_[j];
        const auto& list = point_blocks_[j];
        for (size_t x = 0; x < list.size(); ++x) {
          r -= W_[j][x].transpose() * dc.segment<6>(6 * list[x]);
        }
        step->segment<3>(nc + 3 * static_cast<int>(j)) = Vinv[j] * r;
      }
    }
    return step->allFinite();
  }

  void ApplyStep(const Eigen::VectorXd& step) override {
    for (size_t b = 0; b < blocks_.size(); ++b) {
      const int i = block_index_[b];
      if (i < 0) continue;
      const Vec6 d = step.segment<6>(6 * i);
      blocks_[b] = blocks_[b].Retract(d.head<3>(), d.tail<3>());
    }
    if (!points_fixed_) {
      const int nc = 6 * free_blocks_;
      for (size_t j = 0; j < points_.size(); ++j) {
        points_[j] += step.segment<3>(nc + 3 * static_cast<int>(j));
      }
    }
  }

  void SaveState() override {
    saved_blocks_ = blocks_;
    saved_points_ = points_;
  }
  void RestoreState() override {
    blocks_ = saved_blocks_;
    points_ = saved_points_;
  }

 private:
  std::vector<Pose> blocks_;
  std::vector<int> block_index_;
  int free_blocks_ = 0;
  std::vector<CameraBinding> cameras_;
  std::vector<Eigen::Vector3d> points_;
  bool points_fixed_;
  std::vector<ResidualTerm> terms_;

 public:
  size_t term_count() const { return terms_.size(); }

 private:
  std::vector<std::vector<int>> point_blocks_;

  std::vector<Mat6> U_;
  std::vector<Vec6> gc_;
  std::vector<Eigen::Matrix3d> V_;
  std::vector<Eigen::Vector3d> gp_;
  std::vector<std::vector<Mat63>> W_;

  std::vector<Pose> saved_blocks_;
  std::vector<Eigen::Vector3d> saved_points_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  bool pattern_analyzed_ = false;
  // Block pairs of the reduced camera system; the first free_blocks_ entries
  // are the diagonal. point_pair_slots_[j][x * m + y] indexes the pair
  // (point_blocks_[j][x], point_blocks_[j][y]).
  std::vector<std::pair<int, int>> pair_blocks_;
  std::vector<std::vector<int>> point_pair_slots_;

  void BuildSchurPattern() {
    if (!pair_blocks_.empty() || free_blocks_ == 0) return;
    std::map<std::pair<int, int>, int> slot;
    for (int b = 0; b < free_blocks_; ++b) {
      slot[{b, b}] = b;
      pair_blocks_.emplace_back(b, b);
    }
    point_pair_slots_.resize(points_.size());
    if (points_fixed_) return;
    for (size_t j = 0; j < points_.size(); ++j) {
      const auto& list = point_blocks_[j];
      auto& slots = point_pair_slots_[j];
      slots.resize(list.size() * list.size());
      for (size_t x = 0; x < list.size(); ++x) {
        for (size_t y = 0; y < list.size(); ++y) {
          auto [it, inserted] =
              slot.try_emplace({list[x], list[y]}, static_cast<int>(pair_blocks_.size()));
          if (inserted) pair_blocks_.emplace_back(list[x], list[y]);
          slots[x * list.size() + y] = it->second;
        }
      }
    }
  }
};

// Landmarks and residual terms of a model, given a camera -> binding index map.
void CollectTerms(const ReconstructionModel& model, const std::map<std::string, int>& camera_slot,
                  std::vector<int64_t>* landmark_ids, std::vector<Eigen::Vector3d>* points,
                  std::vector<ResidualTerm>* terms) {
  for (const auto& [id, lm] : model.landmarks) {
    const int index = static_cast<int>(points->size());
    landmark_ids->push_back(id);
    points->push_back(lm.position);
    const Track& track = model.tracks.at(id);
    for (int k : lm.inliers) {
      const Observation& obs = track.observations[k];
      auto it = camera_slot.find(obs.image_id);
      if (it == camera_slot.end()) {
        throw InvalidArgumentError("observation references missing camera " + obs.image_id);
      }
      terms->push_back({it->second, index, obs.pixel});
    }
  }
}

// The absolute stop is 1e-20 px^2 per observation, about 1e-10 px RMS;
// below that, steps only shuffle rounding error.
SolverOptions MakeOptions(const BundleConfig& config, size_t observations) {
  SolverOptions options;
  options.absolute_cost_tolerance = 1e-20 * static_cast<double>(std::max<size_t>(observations, 1));
  options.max_iterations = config.max_iterations;
  options.relative_cost_tolerance = config.relative_cost_tolerance;
  options.initial_lambda = config.initial_lambda;
  return options;
}

}  // namespace

BundleResult BundleAdjust(ReconstructionModel* model, const BundleConfig& config) {
  if (model->landmarks.empty()) throw InvalidArgumentError("BundleAdjust: model has no landmarks");
  std::vector<Pose> blocks;
  std::vector<bool> fixed;
  std::vector<CameraBinding> bindings;
  std::map<std::string, int> slot;
  std::vector<std::string> order;
  for (const auto& [id, cam] : model->cameras) {
    slot[id] = static_cast<int>(blocks.size());
    order.push_back(id);
    bindings.push_back({static_cast<int>(blocks.size()), Pose::Identity(), &cam.intrinsics});
    blocks.push_back(cam.pose);
    fixed.push_back(config.fix_all_poses || config.fixed_images.count(id) > 0 ||
                    (config.fix_gauge && blocks.size() == 1));
  }
  std::vector<int64_t> landmark_ids;
  std::vector<Eigen::Vector3d> points;
  std::vector<ResidualTerm> terms;
  CollectTerms(*model, slot, &landmark_ids, &points, &terms);

  BundleProblem problem(std::move(blocks), std::move(fixed), std::move(bindings),
                        std::move(points), config.fix_landmarks, std::move(terms));
  BundleResult result;
  result.summary = SolveLevenbergMarquardt(problem, MakeOptions(config, problem.term_count()));
  result.pose_blocks = problem.free_blocks();
  result.landmark_blocks = problem.free_points();
  for (size_t i = 0; i < order.size(); ++i) {
    model->cameras.at(order[i]).pose = problem.blocks()[i];
  }
  for (size_t j = 0; j < landmark_ids.size(); ++j) {
    model->landmarks.at(landmark_ids[j]).position = problem.points()[j];
  }
  return result;
}

bool ResectCamera(const ReconstructionModel& model, const std::string& image_id, Pose* pose) {
  const CameraState& cam = model.cameras.at(image_id);
  std::vector<Eigen::Vector3d> points;
  std::vector<ResidualTerm> terms;
  for (const auto& [id, lm] : model.landmarks) {
    const Track& track = model.tracks.at(id);
    for (int k : lm.inliers) {
      if (track.observations[k].image_id != image_id) continue;
      terms.push_back({0, static_cast<int>(points.size()), track.observations[k].pixel});
      points.push_back(lm.position);
    }
  }
  if (points.size() < 3) return false;
  BundleProblem problem({*pose}, {false}, {{0, Pose::Identity(), &cam.intrinsics}},
                        std::move(points), true, std::move(terms));
  SolverOptions options;
  options.max_iterations = 30;
  SolveLevenbergMarquardt(problem, options);
  *pose = problem.blocks()[0];
  return true;
}

RigidBundleResult RigidBundleAdjust(std::vector<RigFrame>* frames, ReconstructionModel* model,
                                    const RigidBundleConfig& config) {
  if (model->landmarks.empty()) {
    throw InvalidArgumentError("RigidBundleAdjust: model has no landmarks");
  }
  std::map<std::string, std::pair<int, Pose>> membership;
  for (size_t f = 0; f < frames->size(); ++f) {
    for (const auto& m : (*frames)[f].members) {
      membership[m.image_id] = {static_cast<int>(f), m.camera_to_body};
    }
  }
  std::vector<CameraBinding> bindings;
  std::map<std::string, int> slot;
  for (const auto& [id, cam] : model->cameras) {
    auto it = membership.find(id);
    if (it == membership.end()) {
      throw MissingRigError("camera " + id + " is not assigned to a rig frame");
    }
    slot[id] = static_cast<int>(bindings.size());
    bindings.push_back({it->second.first, it->second.second, &cam.intrinsics});
  }
  std::vector<Pose> blocks;
  std::vector<bool> fixed;
  for (size_t f = 0; f < frames->size(); ++f) {
    blocks.push_back((*frames)[f].body);
    bool hold = config.fix_all_poses || (config.fix_gauge && f == 0);
    for (const auto& m : (*frames)[f].members) hold = hold || config.fixed_images.count(m.image_id);
    fixed.push_back(hold);
  }
  std::vector<int64_t> landmark_ids;
  std::vector<Eigen::Vector3d> points;
  std::vector<ResidualTerm> terms;
  CollectTerms(*model, slot, &landmark_ids, &points, &terms);

  BundleProblem problem(std::move(blocks), std::move(fixed), std::move(bindings),
                        std::move(points), config.fix_landmarks, std::move(terms));
  RigidBundleResult result;
  result.summary = SolveLevenbergMarquardt(problem, MakeOptions(config, problem.term_count()));
  result.pose_blocks = problem.free_blocks();
  result.landmark_blocks = problem.free_points();

  for (size_t f = 0; f < frames->size(); ++f) (*frames)[f].body = problem.blocks()[f];
  for (auto& [id, cam] : model->cameras) {
    const auto& [frame, extrinsic] = membership.at(id);
    cam.pose = (*frames)[frame].body * extrinsic;
  }
  for (size_t j = 0; j < landmark_ids.size(); ++j) {
    model->landmarks.at(landmark_ids[j]).position = problem.points()[j];
  }

  for (const auto& [id, cam] : model->cameras) {
    Pose resected = cam.pose;
    if (!ResectCamera(*model, id, &resected)) continue;
    const double dt = (resected.translation() - cam.pose.translation()).norm();
    const double dr = RotationAngle(resected.rotation(), cam.pose.rotation()) * 180.0 / M_PI;
    if (dt > config.max_deviation_m || dr > config.max_deviation_deg) {
      result.flagged.push_back(id);
    }
  }
  if (config.remove_flagged && !result.flagged.empty()) {
    RemoveImages(model, result.flagged);
    const std::set<std::string> drop(result.flagged.begin(), result.flagged.end());
    for (auto& frame : *frames) {
      auto& m = frame.members;
      m.erase(std::remove_if(m.begin(), m.end(),
                             [&](const RigMember& x) { return drop.count(x.image_id) > 0; }),
              m.end());
    }
  }
  return result;
}

}  // namespace roadrecon
