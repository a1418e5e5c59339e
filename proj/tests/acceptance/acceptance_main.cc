// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Tolerances are fixed here and nowhere else.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "roadrecon/evaluation/sre.h"
#include "roadrecon/geometry/camera.h"
#include "roadrecon/io/text_io.h"
#include "roadrecon/pairing/hsp.h"
#include "roadrecon/pipeline/pipeline.h"
#include "roadrecon/sfm/bundle_adjustment.h"
#include "roadrecon/surface/elevation.h"
#include "roadrecon/surface/mesh.h"
#include "roadrecon/synthetic/scene.h"
#include "roadrecon/util/rng.h"
#include "roadrecon/wigo/pose_graph.h"
#include "unit/field_fixture.h"
#include "unit/sfm_fixture.h"

namespace roadrecon {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string Format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("roadrecon_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json ReadJson(const fs::path& path) { return json::parse(io::ReadFile(path.string())); }

// 1. Noiseless default scene through every stage.
Outcome EndToEndClosure() {
  const fs::path out = Scratch("closure");
  RunConfig config;
  config.out_dir = out.string();
  const auto start = std::chrono::steady_clock::now();
  RunCommand("all", config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const json r = ReadJson(out / "evaluate" / "report.json");
  const double sre = r["sre_px"], precision = r["precision"], recall = r["recall"];
  fs::remove_all(out);
  return {sre <= 0.5 && precision == 1.0 && recall == 1.0 && seconds < 120.0,
          Format("sre=%.3f px precision=%.4f recall=%.4f runtime=%.1f s", sre, precision, recall,
                 seconds)};
}

// 2. Pixel noise, drift, GNSS noise and outliers.
Outcome NoiseRobustness() {
  const fs::path out = Scratch("noise");
  RunConfig config;
  config.out_dir = out.string();
  config.scene.pixel_sigma = 0.5;
  config.scene.odometry_drift = 0.01;
  config.scene.gnss_sigma = 0.5;
  config.scene.outlier_fraction = 0.05;
  RunCommand("all", config);
  const double sre = ReadJson(out / "evaluate" / "report.json")["sre_px"];
  int64_t injected = 0, active = 0;
  const json report = ReadJson(out / "reconstruct" / "report.json");
  for (const auto& clip : report["clips"]) {
    injected += clip["outliers"]["injected"].get<int64_t>();
    active += clip["outliers"]["still_active"].get<int64_t>();
  }
  fs::remove_all(out);
  const double removed = injected > 0 ? 1.0 - static_cast<double>(active) / injected : 0.0;
  return {sre <= 3.0 && injected > 0 && removed >= 0.95,
          Format("sre=%.3f px outliers removed %.4f (%lld of %lld)", sre, removed,
                 static_cast<long long>(injected - active), static_cast<long long>(injected))};
}

SceneSpec TrajectoryOnlySpec(uint64_t seed) {
  SceneSpec spec;
  spec.clips = 1;
  spec.ground_landmarks = 20;
  spec.structure_landmarks = 5;
  spec.render_masks = false;
  spec.seed = seed;
  return spec;
}

// 3. Pose-graph fusion against dead reckoning over 20 seeds.
Outcome Wigo() {
  constexpr double kGnssSigma = 0.5;
  int better = 0, bounded = 0;
  double worst_ratio = 0.0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    SceneSpec spec = TrajectoryOnlySpec(seed);
    spec.odometry_drift = 0.01;
    spec.odometry_rot_sigma = 0.002;
    spec.gnss_sigma = kGnssSigma;
    const SyntheticClip clip = GenerateScene(spec).clips[0];
    std::vector<double> times;
    for (const auto& n : clip.truth) times.push_back(n.timestamp);
    const auto init = InitializeFromOdometry(times, clip.odometry, clip.gnss);
    const FusedTrajectory fused = FusePoseGraph(init, clip.odometry, clip.gnss);
    const Eigen::Vector3d end = clip.truth.back().pose.translation();
    const double fused_error = (fused.nodes.back().pose.translation() - end).norm();
    const double dead_error =
        (DeadReckon(clip.truth.front().pose, clip.odometry).back().translation() - end).norm();
    better += fused_error < dead_error;
    bounded += fused_error < 3.0 * kGnssSigma;
    worst_ratio = std::max(worst_ratio, fused_error / dead_error);
  }
  const SyntheticClip exact = GenerateScene(TrajectoryOnlySpec(7)).clips[0];
  std::vector<double> times;
  for (const auto& n : exact.truth) times.push_back(n.timestamp);
  const FusedTrajectory fused =
      FusePoseGraph(InitializeFromOdometry(times, exact.odometry, exact.gnss), exact.odometry,
                    exact.gnss);
  double noiseless = 0.0;
  for (size_t i = 0; i < fused.nodes.size(); ++i) {
    noiseless = std::max(
        noiseless, (fused.nodes[i].pose.translation() - exact.truth[i].pose.translation()).norm());
  }
  return {better == 20 && bounded == 20 && noiseless <= 1e-6,
          Format("fused<dead-reckoned %d/20, fused<3 sigma %d/20, worst fused/dead %.3f, "
                 "noiseless max error %.2e m",
                 better, bounded, worst_ratio, noiseless)};
}

// 4. Reprojection Jacobians, monotone cost and rigid == ordinary.
Outcome BundleAdjustment() {
  Rng rng(2024);
  const double h = 1e-6;
  double worst = 0.0;
  int instances = 0;
  for (int rigid = 0; rigid < 2; ++rigid) {
    for (int instance = 0; instance < 50; ++instance, ++instances) {
      const auto random_pose = [&] {
        return Pose(Eigen::Quaterniond(rng.Normal(), rng.Normal(), rng.Normal(), rng.Normal()),
                    {rng.Normal(), rng.Normal(), rng.Normal()});
      };
      const Pose block = random_pose();
      const Pose extrinsic = rigid ? random_pose() : Pose::Identity();
      const CameraIntrinsics K = testing::FixtureIntrinsics();
      const Eigen::Vector3d X =
          (block * extrinsic).Apply({rng.Uniform(-2, 2), rng.Uniform(-2, 2), rng.Uniform(3, 10)});
      const Eigen::Vector2d u(rng.Uniform(0, 640), rng.Uniform(0, 480));
      Eigen::Matrix<double, 2, 6> Jc;
      Eigen::Matrix<double, 2, 3> Jp;
      ObservationResidual(block, extrinsic, K, X, u, &Jc, &Jp);
      for (int k = 0; k < 6; ++k) {
        Eigen::Matrix<double, 6, 1> d = Eigen::Matrix<double, 6, 1>::Zero();
        d(k) = h;
        const Eigen::Vector2d plus = ObservationResidual(block.Retract(d.head<3>(), d.tail<3>()),
                                                         extrinsic, K, X, u, nullptr, nullptr);
        const Eigen::Vector2d minus = ObservationResidual(
            block.Retract(-d.head<3>(), -d.tail<3>()), extrinsic, K, X, u, nullptr, nullptr);
        worst = std::max(worst, ((plus - minus) / (2 * h) - Jc.col(k)).cwiseAbs().maxCoeff());
      }
      for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d d = h * Eigen::Vector3d::Unit(k);
        const Eigen::Vector2d plus = ObservationResidual(block, extrinsic, K, X + d, u, nullptr, nullptr);
        const Eigen::Vector2d minus = ObservationResidual(block, extrinsic, K, X - d, u, nullptr, nullptr);
        worst = std::max(worst, ((plus - minus) / (2 * h) - Jp.col(k)).cwiseAbs().maxCoeff());
      }
    }
  }

  int runs = 0, monotone = 0;
  double rigid_gap = 0.0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    testing::FixtureOptions o;
    o.pixel_sigma = 0.5;
    o.seed = seed;
    const auto f = testing::MakeFixture(o);
    ReconstructionModel model = testing::Perturbed(f.truth, 0.05, 0.005, 0.05, seed);
    ++runs;
    monotone += BundleAdjust(&model).summary.CostNonIncreasing();

    auto frames = f.frames;
    ReconstructionModel rig_model = testing::Perturbed(f.truth, 0.05, 0.005, 0.05, seed + 100);
    for (auto& frame : frames) {
      const auto& m = frame.members[0];
      frame.body = rig_model.cameras.at(m.image_id).pose * m.camera_to_body.Inverse();
    }
    RigidBundleConfig rc;
    rc.remove_flagged = false;
    ++runs;
    monotone += RigidBundleAdjust(&frames, &rig_model, rc).summary.CostNonIncreasing();

    // One camera per frame: the rigid problem is the ordinary one.
    testing::FixtureOptions single = o;
    single.camera_yaws = {0.2};
    single.frames = 12;
    const auto s = testing::MakeFixture(single);
    const ReconstructionModel start = testing::Perturbed(s.truth, 0.03, 0.003, 0.05, seed + 200);
    auto single_frames = s.frames;
    for (auto& frame : single_frames) {
      const auto& m = frame.members[0];
      frame.body = start.cameras.at(m.image_id).pose * m.camera_to_body.Inverse();
    }
    RigidBundleConfig config;
    config.relative_cost_tolerance = 1e-16;
    config.max_iterations = 200;
    config.remove_flagged = false;
    ReconstructionModel a = start, b = start;
    const SolverSummary ra = RigidBundleAdjust(&single_frames, &a, config).summary;
    const SolverSummary rb = BundleAdjust(&b, config).summary;
    runs += 2;
    monotone += ra.CostNonIncreasing() + rb.CostNonIncreasing();
    rigid_gap = std::max(rigid_gap, std::abs(ra.final_cost - rb.final_cost) /
                                        std::max(1.0, rb.final_cost));
  }
  return {worst <= 1e-4 && monotone == runs && rigid_gap <= 1e-8,
          Format("max |J - FD| %.2e over %d instances, monotone %d/%d runs, "
                 "rigid vs ordinary relative gap %.2e",
                 worst, instances, monotone, runs, rigid_gap)};
}

// 5. Pair selection on a dense 8-clip site.
//
// Site: four 315 m roads forming a grid (two along x at y = +-50, two along y
// at x = +-50), each driven once per direction in its own lane by the default
// six-camera rig, 63 frames 5 m apart: 8 clips, 3024 images.
//
// Co-visibility oracle: ground is sampled on a 1 m grid. A sample is visible
// from a camera when it projects inside the image at a range of at most
// 25 m (the scene's tracking range). A sample is matchable between two
// cameras when their viewing rays differ by at most 45 degrees and their
// ranges by at most a factor 2. A pair is co-visible when at least a quarter
// of the smaller visible set is matchable.
Outcome HspEfficiency() {
  SceneSpec spec = TrajectoryOnlySpec(1);
  const RigCalibration rig = GenerateScene(spec).rig;
  const CameraIntrinsics K = SceneSpec::DefaultIntrinsics();
  std::vector<CameraRecord> records;
  int clip = 0;
  for (int road = 0; road < 4; ++road) {
    for (int dir = 0; dir < 2; ++dir, ++clip) {
      const bool along_x = road < 2;
      const double c = road % 2 == 0 ? -50.0 : 50.0;
      const double lane = dir ? 1.8 : -1.8;
      const double yaw = (along_x ? 0.0 : M_PI / 2) + (dir ? M_PI : 0.0);
      for (int k = 0; k < 63; ++k) {
        double s = -155.0 + 5.0 * k + (dir ? 1.3 : 0.0);
        if (dir) s = -s;
        const Eigen::Vector3d p = along_x ? Eigen::Vector3d(s, c + lane, 0)
                                          : Eigen::Vector3d(c - lane, s, 0);
        const Pose body = Pose::FromYaw(yaw, p);
        for (const auto& cam : rig.cameras) {
          CameraRecord r;
          r.image_id = Format("c%d_%s_%03d", clip, cam.name.c_str(), k);
          r.clip_id = clip;
          r.pose = body * cam.camera_to_body;
          r.intrinsics = K;
          records.push_back(r);
        }
      }
    }
  }
  const int n = static_cast<int>(records.size());
  constexpr int kHalf = 170;
  constexpr double kRange = 25.0;
  std::vector<std::vector<int>> visible(n);
  for (int i = 0; i < n; ++i) {
    const Pose inv = records[i].pose.Inverse();
    const Eigen::Vector3d& t = records[i].pose.translation();
    for (int gx = static_cast<int>(t.x()) - 26; gx <= static_cast<int>(t.x()) + 26; ++gx) {
      for (int gy = static_cast<int>(t.y()) - 26; gy <= static_cast<int>(t.y()) + 26; ++gy) {
        if (gx < -kHalf || gx >= kHalf || gy < -kHalf || gy >= kHalf) continue;
        const Eigen::Vector3d pc = inv.Apply({gx + 0.5, gy + 0.5, 0.0});
        if (pc.z() <= 0.0 || pc.norm() > kRange) continue;
        const double u = K.fx * pc.x() / pc.z() + K.cx, v = K.fy * pc.y() / pc.z() + K.cy;
        if (u < 0 || v < 0 || u > K.width || v > K.height) continue;
        visible[i].push_back((gx + kHalf) * 2 * kHalf + (gy + kHalf));
      }
    }
  }
  const auto sample = [&](int g) {
    return Eigen::Vector3d(g / (2 * kHalf) - kHalf + 0.5, g % (2 * kHalf) - kHalf + 0.5, 0.0);
  };
  std::vector<std::pair<int, int>> truth;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (visible[i].empty() || visible[j].empty()) continue;
      const Eigen::Vector3d ci = records[i].pose.translation(), cj = records[j].pose.translation();
      if ((ci - cj).norm() > 2 * kRange) continue;
      std::vector<int> shared;
      std::set_intersection(visible[i].begin(), visible[i].end(), visible[j].begin(),
                            visible[j].end(), std::back_inserter(shared));
      int matchable = 0;
      for (int g : shared) {
        const Eigen::Vector3d a = sample(g) - ci, b = sample(g) - cj;
        const double cos_angle = a.normalized().dot(b.normalized());
        const double ratio = std::max(a.norm(), b.norm()) / std::min(a.norm(), b.norm());
        matchable += cos_angle >= std::cos(M_PI / 4) && ratio <= 2.0;
      }
      if (4 * matchable >= static_cast<int>(std::min(visible[i].size(), visible[j].size()))) {
        truth.emplace_back(i, j);
      }
    }
  }
  const auto recall_of = [&](const std::vector<ImagePair>& pairs) {
    const std::set<ImagePair> kept(pairs.begin(), pairs.end());
    int hit = 0;
    for (auto [i, j] : truth) {
      const auto key = std::minmax(records[i].image_id, records[j].image_id);
      hit += kept.count({key.first, key.second});
    }
    return static_cast<double>(hit) / truth.size();
  };
  const double exhaustive = 0.5 * n * (n - 1.0);
  // Neighbor count sized to the site: about 12 images per 5 m of road.
  HspConfig config;
  config.k_neighbors = 100;
  const auto pairs = SelectPairs(records, config);
  const double recall = recall_of(pairs), fraction = pairs.size() / exhaustive;
  const double default_recall = recall_of(SelectPairs(records, HspConfig{}));
  return {recall >= 0.95 && fraction <= 0.20,
          Format("%d images, %zu co-visible pairs, k=100: recall %.4f with %.2f%% of exhaustive "
                 "(default k=30: recall %.4f)",
                 n, truth.size(), recall, 100.0 * fraction, default_recall)};
}

std::vector<Eigen::Vector3d> Sample(int n, double x0, double x1, double y0, double y1,
                                    const std::function<double(double, double)>& z,
                                    uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < n; ++i) {
    const double x = rng.Uniform(x0, x1), y = rng.Uniform(y0, y1);
    pts.emplace_back(x, y, z(x, y));
  }
  return pts;
}

// Regular grid strictly inside the sampled area, disjoint from the samples.
double HeldOutRmse(const ElevationField& f, double x0, double x1, double y0, double y1,
                   const std::function<double(double, double)>& z) {
  double sum = 0.0;
  int n = 0;
  for (int i = 0; i <= 60; ++i) {
    for (int j = 0; j <= 12; ++j) {
      const double x = x0 + (x1 - x0) * (0.02 + 0.96 * i / 60.0);
      const double y = y0 + (y1 - y0) * (0.02 + 0.96 * j / 12.0);
      sum += std::pow(f.Evaluate(x, y) - z(x, y), 2);
      ++n;
    }
  }
  return std::sqrt(sum / n);
}

// 6. Height field regression.
Outcome Elevation() {
  const auto sinusoid = [](double x, double) { return 0.5 * std::sin(x / 10.0); };
  const auto flat = [](double, double) { return 0.0; };
  const double sin_rmse =
      HeldOutRmse(FitElevation(Sample(500, 0, 100, -10, 10, sinusoid, 2)), 0, 100, -10, 10, sinusoid);
  const double flat_rmse =
      HeldOutRmse(FitElevation(Sample(300, 0, 50, -5, 5, flat, 1)), 0, 50, -5, 5, flat);
  const auto ripple = [](double x, double) { return 0.05 * std::sin(2.0 * x); };
  const auto pts = Sample(400, 0, 20, -3, 3, ripple, 5);
  ElevationConfig config;
  config.iterations = 1500;
  config.frequencies = 0;
  const double loss0 = FitElevation(pts, config).final_loss;
  config.frequencies = 8;
  const double loss8 = FitElevation(pts, config).final_loss;
  return {sin_rmse < 0.05 && flat_rmse < 1e-3 && loss8 < loss0,
          Format("sinusoid held-out rmse %.4f m, flat %.2e m, ripple loss L=8 %.2e vs L=0 %.2e",
                 sin_rmse, flat_rmse, loss8, loss0)};
}

double BruteForceMin(const Eigen::MatrixXd& cost) {
  const Eigen::MatrixXd a = cost.rows() > cost.cols() ? Eigen::MatrixXd(cost.transpose()) : cost;
  std::vector<int> cols(a.cols());
  std::iota(cols.begin(), cols.end(), 0);
  double best = 1e300;
  do {
    double sum = 0.0;
    for (int r = 0; r < a.rows(); ++r) sum += a(r, cols[r]);
    best = std::min(best, sum);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

// Dense sampling brackets the closest sample on each segment; ternary search
// inside the bracket then resolves the convex distance to 1e-12.
double DenseDistance(const Eigen::Vector2d& p, const Polyline2d& line) {
  double best = 1e300;
  for (size_t i = 0; i + 1 < line.size(); ++i) {
    const auto d = [&](double t) { return (line[i] + (line[i + 1] - line[i]) * t - p).norm(); };
    const int steps = 1000;
    int arg = 0;
    for (int s = 1; s <= steps; ++s) {
      if (d(double(s) / steps) < d(double(arg) / steps)) arg = s;
    }
    double lo = std::max(0, arg - 1) / double(steps), hi = std::min(steps, arg + 1) / double(steps);
    while (hi - lo > 1e-12) {
      const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if (d(m1) < d(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    best = std::min(best, d(0.5 * (lo + hi)));
  }
  return best;
}

// 7. Matching, shift response and point-to-curve distance.
Outcome EvaluationMetric() {
  Rng rng(99);
  int agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int rows = 1 + static_cast<int>(rng.UniformIndex(7));
    const int cols = 1 + static_cast<int>(rng.UniformIndex(7));
    Eigen::MatrixXd cost(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        cost(r, c) = trial % 2 ? rng.Uniform(0, 100) : static_cast<double>(rng.UniformIndex(5));
      }
    }
    agree += std::abs(HungarianMatch(cost, 1e9).total_cost - BruteForceMin(cost)) <= 1e-9;
  }

  // Straight lanes seen by a forward camera, masks shifted 3 px sideways.
  CameraIntrinsics K;
  K.fx = K.fy = 230.0;
  K.cx = 240.0;
  K.cy = 135.0;
  K.width = 480;
  K.height = 270;
  VectorMap lanes;
  lanes.elements.push_back({1, ElementClass::kLaneDivider, {{3, -1.8, 0}, {55, -1.8, 0}}, true});
  lanes.elements.push_back({2, ElementClass::kLaneDivider, {{3, 1.8, 0}, {55, 1.8, 0}}, true});
  lanes.elements.push_back({3, ElementClass::kRoadBoundary, {{3, -5.4, 0}, {55, -5.4, 0}}, true});
  std::vector<EvalFrame> frames;
  for (int k = 0; k < 4; ++k) {
    const Pose pose = LookAtPose({2.5 * k, 0, 1.5}, {1, 0, 0});
    EvalFrame f{"f" + std::to_string(k), pose, K, {}};
    std::map<ElementClass, int> next;
    for (const auto& pe : ProjectMapToFrame(lanes, pose, K, {})) {
      std::vector<Polyline2d> pieces = pe.pieces;
      for (auto& piece : pieces) {
        const Eigen::Vector2d d = (piece.back() - piece.front()).normalized();
        for (auto& p : piece) p += 3.0 * Eigen::Vector2d(-d.y(), d.x());
      }
      auto& mask = f.masks[pe.cls];
      if (mask.empty()) mask = InstanceMask(K.width, K.height, 0);
      DrawPolylines(pieces, 3.0, static_cast<uint8_t>(++next[pe.cls]), &mask);
    }
    frames.push_back(std::move(f));
  }
  const double sre = ComputeSre(lanes, frames).sre_px;

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Polyline2d line;
    const int n = 2 + static_cast<int>(rng.UniformIndex(4));
    for (int k = 0; k < n; ++k) line.emplace_back(rng.Uniform(-5, 5), rng.Uniform(-5, 5));
    const Eigen::Vector2d p(rng.Uniform(-6, 6), rng.Uniform(-6, 6));
    worst = std::max(worst, std::abs(PointToCurveDistance(p, line) - DenseDistance(p, line)));
  }
  return {agree == 1000 && std::abs(sre - 3.0) <= 0.1 && worst <= 1e-6,
          Format("hungarian==brute force %d/1000, 3 px shift sre %.3f, curve distance max "
                 "deviation %.2e",
                 agree, sre, worst)};
}

// 8. Mesh observation counts against per-vertex, per-camera projection.
Outcome MeshCounts() {
  const ElevationField field = testing::PlaneField(0.01, -0.02, 0.0, -10, 30, -5, 5);
  RoadMesh mesh = BuildMesh(field, 0.2);
  SceneSpec spec = TrajectoryOnlySpec(1);
  const RigCalibration rig = GenerateScene(spec).rig;
  std::map<std::string, CameraState> cameras;
  std::vector<CameraState> list;
  SemanticMasks masks;
  const Pose body = Pose::FromYaw(0.1, {10.0, 0.5, 0.0});
  for (size_t c = 0; c < rig.cameras.size(); ++c) {
    CameraState cam;
    cam.image_id = rig.cameras[c].name;
    cam.pose = body * rig.cameras[c].camera_to_body;
    cam.intrinsics = rig.cameras[c].intrinsics;
    cameras[cam.image_id] = cam;
    list.push_back(cam);
    masks[cam.image_id] = GrayImage(cam.intrinsics.width, cam.intrinsics.height, kRoadSurface);
  }
  PaintMesh(cameras, masks, {}, &mesh);
  size_t mismatches = 0, observed = 0;
  for (size_t i = 0; i < mesh.size(); ++i) {
    int count = 0;
    for (const auto& c : list) {
      const Eigen::Matrix3d R = c.pose.rotation().toRotationMatrix();
      Eigen::Matrix<double, 3, 4> P;
      P.leftCols<3>() = R.transpose();
      P.col(3) = -R.transpose() * c.pose.translation();
      const Eigen::Vector3d h = c.intrinsics.K() * P * mesh.vertices[i].homogeneous();
      if (h.z() <= 0) continue;
      const double u = h.x() / h.z(), v = h.y() / h.z();
      count += u >= 0 && v >= 0 && u < c.intrinsics.width && v < c.intrinsics.height;
    }
    mismatches += mesh.observations[i] != count;
    observed += count > 0;
  }
  return {mesh.size() >= 10000 && mismatches == 0,
          Format("%zu vertices, %zu cameras, %zu observed, %zu mismatches", mesh.size(),
                 list.size(), observed, mismatches)};
}

int RunCli(const std::string& args) {
  const std::string command = std::string(ROADRECON_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Manifest lines of every stage directory, keyed by stage.
std::map<std::string, std::string> Manifests(const fs::path& out) {
  std::map<std::string, std::string> manifests;
  for (Stage s : AllStages()) {
    const fs::path path = out / StageName(s) / "manifest.txt";
    manifests[StageName(s)] = fs::exists(path) ? io::ReadFile(path.string()) : "";
  }
  return manifests;
}

// 9. Two CLI runs per subcommand and the golden manifests.
Outcome Determinism() {
  const std::string config = std::string(ROADRECON_GOLDEN_DIR) + "/config.json";
  const fs::path a = Scratch("determinism_a"), b = Scratch("determinism_b");
  int failures = 0;
  for (Stage s : AllStages()) {
    for (const fs::path& out : {a, b}) {
      failures += RunCli(std::string(StageName(s)) + " --config " + config + " --out " +
                         out.string()) != 0;
    }
  }
  const auto first = Manifests(a), second = Manifests(b);
  int identical = 0, golden = 0;
  std::vector<std::string> drift;
  for (Stage s : AllStages()) {
    const std::string name = StageName(s);
    identical += !first.at(name).empty() && first.at(name) == second.at(name);
    const fs::path golden_path = fs::path(ROADRECON_GOLDEN_DIR) / (name + ".manifest.txt");
    if (fs::exists(golden_path) && io::ReadFile(golden_path.string()) == first.at(name)) {
      ++golden;
    } else {
      drift.push_back(name);
    }
  }
  fs::remove_all(a);
  fs::remove_all(b);
  std::string detail = Format("%d/8 subcommands byte-identical across runs, %d/8 match golden "
                              "manifests, %d CLI failures",
                              identical, golden, failures);
  for (const auto& d : drift) detail += " [golden drift: " + d + "]";
  return {failures == 0 && identical == 8 && golden == 8, detail};
}

}  // namespace
}  // namespace roadrecon

int main(int argc, char** argv) {
  using namespace roadrecon;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 end-to-end closure", EndToEndClosure},
      {"2 noise robustness", NoiseRobustness},
      {"3 wigo", Wigo},
      {"4 bundle adjustment", BundleAdjustment},
      {"5 hsp efficiency/recall", HspEfficiency},
      {"6 elevation", Elevation},
      {"7 evaluation metric", EvaluationMetric},
      {"8 mesh observation counts", MeshCounts},
      {"9 determinism", Determinism},
  };
  // Optional filter: criterion numbers to run.
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) only.insert(argv[i]);
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && !only.count(name.substr(0, name.find(' ')))) continue;
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += !outcome.pass;
    std::printf("[%s] %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
