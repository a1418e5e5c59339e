#include "roadrecon/synthetic/scene.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "roadrecon/errors.h"
#include "roadrecon/geometry/camera.h"
#include "roadrecon/util/rng.h"
#include "util/json_fields.h"

namespace roadrecon {

double ElevationSpec::Height(double x, double) const {
  switch (kind) {
    case ElevationKind::kFlat:
      return offset;
    case ElevationKind::kSlope:
      return offset + slope * x;
    case ElevationKind::kSinusoid:
      return offset + amplitude * std::sin(x / wavelength);
  }
  return offset;
}

Eigen::Vector2d ElevationSpec::Gradient(double x, double) const {
  switch (kind) {
    case ElevationKind::kFlat:
      return Eigen::Vector2d::Zero();
    case ElevationKind::kSlope:
      return Eigen::Vector2d(slope, 0.0);
    case ElevationKind::kSinusoid:
      return Eigen::Vector2d(amplitude / wavelength * std::cos(x / wavelength), 0.0);
  }
  return Eigen::Vector2d::Zero();
}

std::vector<RigCameraSpec> SceneSpec::DefaultRig() {
  return {{"front", 0.0, -10.0, {1.5, 0.0, 1.5}},
          {"front_left", 55.0, -10.0, {1.3, 0.5, 1.5}},
          {"front_right", -55.0, -10.0, {1.3, -0.5, 1.5}},
          {"back", 180.0, -10.0, {-0.5, 0.0, 1.5}},
          {"back_left", 110.0, -10.0, {0.0, 0.5, 1.5}},
          {"back_right", -110.0, -10.0, {0.0, -0.5, 1.5}}};
}

CameraIntrinsics SceneSpec::DefaultIntrinsics() {
  CameraIntrinsics k;
  k.fx = k.fy = 192.0;
  k.cx = 200.0;
  k.cy = 112.5;
  k.width = 400;
  k.height = 225;
  return k;
}

void SceneSpec::Validate() const {
  auto fail = [](const std::string& what) { throw InvalidSpecError(what); };
  if (!(road_length > 0.0)) fail("road_length must be positive");
  if (!(road_half_width > 0.0)) fail("road_half_width must be positive");
  if (clips < 1) fail("clips must be at least 1");
  if (lane_offsets.empty()) fail("lane_offsets must not be empty");
  if (!(speed > 0.0) || !(node_rate > 0.0) || !(image_rate > 0.0)) {
    fail("speed, node_rate and image_rate must be positive");
  }
  if (image_time_offset < 0.0) fail("image_time_offset must be non-negative");
  if (approach < 0.0) fail("approach must be non-negative");
  if (rig.empty()) fail("rig must have at least one camera");
  try {
    intrinsics.Validate();
  } catch (const Error& e) {
    fail(std::string("intrinsics: ") + e.what());
  }
  if (ground_landmarks < 0 || structure_landmarks < 0) fail("landmark counts must be >= 0");
  if (!(min_view_depth > 0.0) || !(max_view_depth > min_view_depth)) fail("bad view depth range");
  if (odometry_drift < 0.0 || odometry_rot_sigma < 0.0 || gnss_sigma < 0.0 || pixel_sigma < 0.0) {
    fail("noise sigmas must be >= 0");
  }
  if (!(outlier_fraction >= 0.0 && outlier_fraction <= 1.0)) fail("outlier_fraction must be in [0, 1]");
  if (!(outlier_min_offset > 0.0) || outlier_max_offset < outlier_min_offset) {
    fail("bad outlier offset range");
  }
  if (gnss_every < 1) fail("gnss_every must be >= 1");
  if (!(marking_width > 0.0) || !(mask_stroke_px > 0.0)) fail("widths must be positive");
  if (elevation.kind == ElevationKind::kSinusoid && !(elevation.wavelength > 0.0)) {
    fail("sinusoid wavelength must be positive");
  }
  if (landmark_half_width <= road_half_width) fail("landmark_half_width must exceed the road");
  crop.Validate();
}

size_t SceneBundle::ObservationCount() const {
  size_t n = 0;
  for (const auto& clip : clips) {
    for (const auto& t : clip.tracks) n += t.observations.size();
  }
  return n;
}

size_t SceneBundle::OutlierCount() const {
  size_t n = 0;
  for (const auto& clip : clips) n += clip.outliers.size();
  return n;
}

double ClipDuration(const SceneSpec& spec) {
  return (spec.road_length + 2.0 * spec.approach) / spec.speed;
}

Pose TrueBodyPose(const SceneSpec& spec, int clip, double t) {
  const double dir = clip % 2 == 0 ? 1.0 : -1.0;
  const double y = spec.lane_offsets[clip % spec.lane_offsets.size()];
  const double x0 = dir > 0 ? -spec.approach : spec.road_length + spec.approach;
  const double x = x0 + dir * spec.speed * t;
  const Eigen::Vector2d g = spec.elevation.Gradient(x, y);
  const Eigen::Vector3d forward = Eigen::Vector3d(dir, 0.0, dir * g.x()).normalized();
  const Eigen::Vector3d left = Eigen::Vector3d::UnitZ().cross(forward).normalized();
  const Eigen::Vector3d up = forward.cross(left);
  Eigen::Matrix3d R;
  R << forward, left, up;
  return Pose::FromRotation(R, Eigen::Vector3d(x, y, spec.elevation.Height(x, y)));
}

uint8_t GroundClass(const SceneSpec& spec, double x, double y) {
  const double half = 0.5 * spec.marking_width;
  if (x >= 0.0 && x <= spec.road_length) {
    for (double cx : spec.crossing_positions) {
      if (std::abs(x - cx) <= half && std::abs(y) <= spec.crossing_half_length) return kLaneMarking;
    }
    for (double d : spec.divider_offsets) {
      if (std::abs(y - d) <= half) return kLaneMarking;
    }
    for (double b : spec.boundary_offsets) {
      if (std::abs(y - b) <= half) return kRoadTeeth;
    }
  }
  return std::abs(y) <= spec.road_half_width ? kRoadSurface : kOther;
}

bool IntersectGround(const ElevationSpec& ground, const Eigen::Vector3d& origin,
                     const Eigen::Vector3d& direction, double max_range, Eigen::Vector3d* hit) {
  // The plane z = offset + slope * x is exact for flat and sloped ground and
  // seeds Newton's method for the sinusoid.
  const double slope = ground.kind == ElevationKind::kSlope ? ground.slope : 0.0;
  const double denom = direction.z() - slope * direction.x();
  if (denom >= 0.0) return false;
  double t = (ground.offset + slope * origin.x() - origin.z()) / denom;
  if (ground.kind == ElevationKind::kSinusoid) {
    bool converged = false;
    for (int it = 0; it < 30 && !converged; ++it) {
      const Eigen::Vector3d p = origin + t * direction;
      const double f = p.z() - ground.Height(p.x(), p.y());
      const double df = direction.z() - ground.Gradient(p.x(), p.y()).dot(direction.head<2>());
      if (df == 0.0) return false;
      const double step = f / df;
      t -= step;
      converged = std::abs(step) < 1e-10;
    }
    if (!converged) return false;
  }
  if (!(t > 0.0) || t > max_range) return false;
  *hit = origin + t * direction;
  return true;
}

GrayImage RenderSemanticMask(const SceneSpec& spec, const CameraState& camera) {
  const CameraIntrinsics& K = camera.intrinsics;
  GrayImage mask(K.width, K.height, kUnknown);
  const Eigen::Matrix3d R = camera.pose.RotationMatrix();
  const Eigen::Vector3d origin = camera.pose.translation();
  constexpr double kMaxRange = 100.0;
  for (int r = 0; r < K.height; ++r) {
    for (int c = 0; c < K.width; ++c) {
      const Eigen::Vector3d ray(((c + 0.5) - K.cx) / K.fx, ((r + 0.5) - K.cy) / K.fy, 1.0);
      Eigen::Vector3d hit;
      if (IntersectGround(spec.elevation, origin, R * ray, kMaxRange, &hit)) {
        mask.at(c, r) = GroundClass(spec, hit.x(), hit.y());
      }
    }
  }
  return mask;
}

std::map<ElementClass, InstanceMask> RenderInstanceMasks(const VectorMap& map,
                                                         const CameraState& camera,
                                                         const CropBox& crop, double stroke) {
  std::map<ElementClass, InstanceMask> masks;
  std::map<ElementClass, int> next;
  for (const auto& pe : ProjectMapToFrame(map, camera.pose, camera.intrinsics, crop)) {
    auto& mask = masks[pe.cls];
    if (mask.empty()) mask = InstanceMask(camera.intrinsics.width, camera.intrinsics.height, 0);
    const int id = ++next[pe.cls];
    if (id > 255) throw InvalidSpecError("more than 255 instances of one class in an image");
    DrawPolylines(pe.pieces, stroke, static_cast<uint8_t>(id), &mask);
  }
  // A projection can fall entirely outside the image.
  for (auto it = masks.begin(); it != masks.end();) {
    it = InstanceIds(it->second).empty() ? masks.erase(it) : std::next(it);
  }
  return masks;
}

namespace {

Pose CameraToBody(const RigCameraSpec& cam) {
  const double yaw = cam.yaw_deg * M_PI / 180.0;
  const double pitch = cam.pitch_deg * M_PI / 180.0;
  const Eigen::Vector3d forward(std::cos(yaw) * std::cos(pitch), std::sin(yaw) * std::cos(pitch),
                                std::sin(pitch));
  return LookAtPose(cam.mount, forward);
}

VectorMap TruthMap(const SceneSpec& spec) {
  VectorMap map;
  int64_t id = 0;
  auto line = [&](ElementClass cls, Eigen::Vector2d a, Eigen::Vector2d b) {
    MapElement e;
    e.id = id++;
    e.cls = cls;
    e.has_z = true;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() - 1e-9)));
    for (int k = 0; k <= pieces; ++k) {
      const Eigen::Vector2d p = a + (b - a) * (static_cast<double>(k) / pieces);
      e.points.emplace_back(p.x(), p.y(), spec.elevation.Height(p.x(), p.y()));
    }
    map.elements.push_back(std::move(e));
  };
  for (double d : spec.divider_offsets) {
    line(ElementClass::kLaneDivider, {0.0, d}, {spec.road_length, d});
  }
  for (double b : spec.boundary_offsets) {
    line(ElementClass::kRoadBoundary, {0.0, b}, {spec.road_length, b});
  }
  for (double cx : spec.crossing_positions) {
    line(ElementClass::kPedCrossing, {cx, -spec.crossing_half_length},
         {cx, spec.crossing_half_length});
  }
  return map;
}

std::map<int64_t, Eigen::Vector3d> TruthLandmarks(const SceneSpec& spec) {
  std::map<int64_t, Eigen::Vector3d> out;
  Rng rng(MixSeed(spec.seed, 1));
  const double x0 = -spec.approach - spec.landmark_margin;
  const double x1 = spec.road_length + spec.approach + spec.landmark_margin;
  int64_t id = 0;
  for (int i = 0; i < spec.ground_landmarks; ++i) {
    const double x = rng.Uniform(x0, x1);
    const double y = rng.Uniform(-spec.landmark_half_width, spec.landmark_half_width);
    out[id++] = Eigen::Vector3d(x, y, spec.elevation.Height(x, y));
  }
  // Facades beside the road, at least 3 m outside it.
  const double inner = spec.road_half_width + 3.0;
  for (int i = 0; i < spec.structure_landmarks; ++i) {
    const double x = rng.Uniform(x0, x1);
    const double side = rng.Bernoulli(0.5) ? 1.0 : -1.0;
    const double y = side * rng.Uniform(inner, spec.landmark_half_width);
    out[id++] = Eigen::Vector3d(x, y, spec.elevation.Height(x, y) + rng.Uniform(0.3, 6.0));
  }
  return out;
}

std::string ImageId(int clip, const std::string& camera, int frame) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "c%d_%s_%03d", clip, camera.c_str(), frame);
  return buf;
}

}  // namespace

SceneBundle GenerateScene(const SceneSpec& spec) {
  spec.Validate();
  SceneBundle bundle;
  bundle.spec = spec;
  for (const auto& cam : spec.rig) {
    bundle.rig.cameras.push_back({cam.name, CameraToBody(cam), spec.intrinsics});
  }
  bundle.rig.reference = 0;
  bundle.map = TruthMap(spec);
  bundle.landmarks = TruthLandmarks(spec);

  const double duration = ClipDuration(spec);
  const int nodes = static_cast<int>(std::floor(duration * spec.node_rate + 1e-9)) + 1;
  // Landmark index -> per-clip observation lists, for cross tracks.
  std::map<int64_t, std::vector<Observation>> cross;
  std::map<int64_t, int> cross_clips;

  for (int k = 0; k < spec.clips; ++k) {
    SyntheticClip clip;
    clip.clip_id = k;
    for (int i = 0; i < nodes; ++i) {
      const double t = i / spec.node_rate;
      clip.truth.push_back({t, TrueBodyPose(spec, k, t)});
    }

    Rng odo_rng(MixSeed(spec.seed, 100 + k));
    for (int i = 0; i + 1 < nodes; ++i) {
      const Pose rel = clip.truth[i].pose.Inverse() * clip.truth[i + 1].pose;
      const double step = rel.translation().norm();
      Eigen::Vector3d t = rel.translation() * (1.0 + spec.odometry_drift);
      Eigen::Vector3d w(odo_rng.Normal(), odo_rng.Normal(), odo_rng.Normal());
      const Eigen::Quaterniond q = rel.rotation() * ExpSO3(spec.odometry_rot_sigma * w);
      OdometryFactor f;
      f.from_index = i;
      f.to_index = i + 1;
      f.relative = Pose(q, t);
      f.sigma_t = std::max(spec.odometry_drift * step, 1e-3);
      f.sigma_r = std::max(spec.odometry_rot_sigma, 1e-4);
      clip.odometry.push_back(f);
    }

    Rng gnss_rng(MixSeed(spec.seed, 200 + k));
    for (int i = 0; i < nodes; i += spec.gnss_every) {
      Eigen::Vector3d noise(gnss_rng.Normal(), gnss_rng.Normal(), gnss_rng.Normal());
      clip.gnss.push_back({i, clip.truth[i].pose.translation() + spec.gnss_sigma * noise,
                           std::max(spec.gnss_sigma, 0.01)});
    }

    // Images and their observations.
    Rng obs_rng(MixSeed(spec.seed, 300 + k));
    std::map<int64_t, std::vector<Observation>> per_landmark;
    const double t_last = clip.truth.back().timestamp;
    for (int frame = 0;; ++frame) {
      const double t = spec.image_time_offset + frame / spec.image_rate;
      if (t > t_last + 1e-9) break;
      const Pose body = TrueBodyPose(spec, k, t);
      for (size_t c = 0; c < spec.rig.size(); ++c) {
        ImageRecord rec{ImageId(k, spec.rig[c].name, frame), k, static_cast<int>(c), t};
        clip.images.push_back(rec);
        CameraState cam;
        cam.image_id = rec.image_id;
        cam.pose = body * bundle.rig.cameras[c].camera_to_body;
        cam.intrinsics = spec.intrinsics;
        cam.timestamp = t;
        cam.clip_id = k;
        cam.rig_camera = static_cast<int>(c);
        bundle.cameras[rec.image_id] = cam;

        const CameraIntrinsics& K = spec.intrinsics;
        for (const auto& [lm, X] : bundle.landmarks) {
          const Eigen::Vector3d p = WorldToCamera(cam.pose, X);
          if (p.z() < spec.min_view_depth || p.z() > spec.max_view_depth) continue;
          Eigen::Vector2d uv = ProjectUnchecked(K, p);
          if (uv.x() < 1.0 || uv.y() < 1.0 || uv.x() > K.width - 1.0 || uv.y() > K.height - 1.0) {
            continue;
          }
          if (spec.pixel_sigma > 0.0) {
            uv += spec.pixel_sigma * Eigen::Vector2d(obs_rng.Normal(), obs_rng.Normal());
          }
          const int64_t track_id = k * kClipTrackStride + lm;
          if (spec.outlier_fraction > 0.0 && obs_rng.Bernoulli(spec.outlier_fraction)) {
            for (int attempt = 0; attempt < 16; ++attempt) {
              const double angle = obs_rng.Uniform(0.0, 2.0 * M_PI);
              const double r = obs_rng.Uniform(spec.outlier_min_offset, spec.outlier_max_offset);
              const Eigen::Vector2d moved = uv + r * Eigen::Vector2d(std::cos(angle), std::sin(angle));
              if (moved.x() >= 0 && moved.y() >= 0 && moved.x() < K.width && moved.y() < K.height) {
                uv = moved;
                clip.outliers.insert({track_id, rec.image_id});
                break;
              }
            }
          }
          per_landmark[lm].push_back({rec.image_id, track_id, uv});
        }

        if (spec.render_masks) {
          bundle.semantic_masks[rec.image_id] = RenderSemanticMask(spec, cam);
          auto inst = RenderInstanceMasks(bundle.map, cam, spec.crop, spec.mask_stroke_px);
          if (!inst.empty()) bundle.instance_masks[rec.image_id] = std::move(inst);
        }
      }
    }
    for (auto& [lm, obs] : per_landmark) {
      if (obs.size() < 2) {
        // A single sighting is not a track; drop its outlier label too.
        clip.outliers.erase({obs[0].track_id, obs[0].image_id});
        continue;
      }
      clip.tracks.push_back({k * kClipTrackStride + lm, obs});
      auto& all = cross[lm];
      for (const auto& o : obs) all.push_back({o.image_id, kCrossTrackBase + lm, o.pixel});
      ++cross_clips[lm];
    }
    bundle.clips.push_back(std::move(clip));
  }
  for (const auto& [lm, obs] : cross) {
    if (cross_clips[lm] >= 2) bundle.cross_tracks.push_back({kCrossTrackBase + lm, obs});
  }
  return bundle;
}

namespace {

using nlohmann::ordered_json;

const char* KindName(ElevationKind k) {
  switch (k) {
    case ElevationKind::kFlat:
      return "flat";
    case ElevationKind::kSlope:
      return "slope";
    case ElevationKind::kSinusoid:
      return "sinusoid";
  }
  return "flat";
}

using Reader = internal::JsonFields;

Eigen::Vector3d Vec3(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(where + ": expected [x, y, z]");
  try {
    return Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected numbers");
  }
}

}  // namespace

SceneSpec SceneSpecFromJson(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scene spec is not valid JSON: ") + e.what());
  }
  SceneSpec s;
  Reader r(j, "scene");
  r.Get("road_length", &s.road_length);
  r.Get("road_half_width", &s.road_half_width);
  if (const auto* e = r.Find("elevation")) {
    Reader er(*e, "scene.elevation");
    std::string kind = KindName(s.elevation.kind);
    er.Get("kind", &kind);
    if (kind == "flat") {
      s.elevation.kind = ElevationKind::kFlat;
    } else if (kind == "slope") {
      s.elevation.kind = ElevationKind::kSlope;
    } else if (kind == "sinusoid") {
      s.elevation.kind = ElevationKind::kSinusoid;
    } else {
      throw ConfigError("scene.elevation.kind: unknown kind '" + kind + "'");
    }
    er.Get("offset", &s.elevation.offset);
    er.Get("slope", &s.elevation.slope);
    er.Get("amplitude", &s.elevation.amplitude);
    er.Get("wavelength", &s.elevation.wavelength);
    er.Finish();
  }
  r.Get("divider_offsets", &s.divider_offsets);
  r.Get("boundary_offsets", &s.boundary_offsets);
  r.Get("crossing_positions", &s.crossing_positions);
  r.Get("marking_width", &s.marking_width);
  r.Get("crossing_half_length", &s.crossing_half_length);
  r.Get("clips", &s.clips);
  r.Get("lane_offsets", &s.lane_offsets);
  r.Get("approach", &s.approach);
  r.Get("speed", &s.speed);
  r.Get("node_rate", &s.node_rate);
  r.Get("image_rate", &s.image_rate);
  r.Get("image_time_offset", &s.image_time_offset);
  if (const auto* rig = r.Find("rig")) {
    if (!rig->is_array()) throw ConfigError("scene.rig: expected an array");
    s.rig.clear();
    for (size_t i = 0; i < rig->size(); ++i) {
      const std::string where = "scene.rig[" + std::to_string(i) + "]";
      Reader cr((*rig)[i], where);
      RigCameraSpec cam;
      cr.Get("name", &cam.name);
      cr.Get("yaw_deg", &cam.yaw_deg);
      cr.Get("pitch_deg", &cam.pitch_deg);
      if (const auto* m = cr.Find("mount")) cam.mount = Vec3(*m, where + ".mount");
      cr.Finish();
      if (cam.name.empty()) throw ConfigError(where + ".name: required");
      s.rig.push_back(cam);
    }
  }
  if (const auto* k = r.Find("intrinsics")) {
    Reader kr(*k, "scene.intrinsics");
    kr.Get("fx", &s.intrinsics.fx);
    kr.Get("fy", &s.intrinsics.fy);
    kr.Get("cx", &s.intrinsics.cx);
    kr.Get("cy", &s.intrinsics.cy);
    kr.Get("width", &s.intrinsics.width);
    kr.Get("height", &s.intrinsics.height);
    kr.Finish();
  }
  r.Get("ground_landmarks", &s.ground_landmarks);
  r.Get("structure_landmarks", &s.structure_landmarks);
  r.Get("landmark_margin", &s.landmark_margin);
  r.Get("landmark_half_width", &s.landmark_half_width);
  r.Get("max_view_depth", &s.max_view_depth);
  r.Get("min_view_depth", &s.min_view_depth);
  r.Get("odometry_drift", &s.odometry_drift);
  r.Get("odometry_rot_sigma", &s.odometry_rot_sigma);
  r.Get("gnss_sigma", &s.gnss_sigma);
  r.Get("gnss_every", &s.gnss_every);
  r.Get("pixel_sigma", &s.pixel_sigma);
  r.Get("outlier_fraction", &s.outlier_fraction);
  r.Get("outlier_min_offset", &s.outlier_min_offset);
  r.Get("outlier_max_offset", &s.outlier_max_offset);
  r.Get("render_masks", &s.render_masks);
  r.Get("mask_stroke_px", &s.mask_stroke_px);
  if (const auto* c = r.Find("crop")) {
    Reader cr(*c, "scene.crop");
    cr.Get("x_min", &s.crop.x_min);
    cr.Get("x_max", &s.crop.x_max);
    cr.Get("y_min", &s.crop.y_min);
    cr.Get("y_max", &s.crop.y_max);
    cr.Finish();
  }
  r.Get("seed", &s.seed);
  r.Finish();
  return s;
}

std::string SceneSpecToJson(const SceneSpec& s) {
  ordered_json j;
  j["road_length"] = s.road_length;
  j["road_half_width"] = s.road_half_width;
  j["elevation"] = {{"kind", KindName(s.elevation.kind)},
                    {"offset", s.elevation.offset},
                    {"slope", s.elevation.slope},
                    {"amplitude", s.elevation.amplitude},
                    {"wavelength", s.elevation.wavelength}};
  j["divider_offsets"] = s.divider_offsets;
  j["boundary_offsets"] = s.boundary_offsets;
  j["crossing_positions"] = s.crossing_positions;
  j["marking_width"] = s.marking_width;
  j["crossing_half_length"] = s.crossing_half_length;
  j["clips"] = s.clips;
  j["lane_offsets"] = s.lane_offsets;
  j["approach"] = s.approach;
  j["speed"] = s.speed;
  j["node_rate"] = s.node_rate;
  j["image_rate"] = s.image_rate;
  j["image_time_offset"] = s.image_time_offset;
  ordered_json rig = ordered_json::array();
  for (const auto& cam : s.rig) {
    rig.push_back({{"name", cam.name},
                   {"yaw_deg", cam.yaw_deg},
                   {"pitch_deg", cam.pitch_deg},
                   {"mount", {cam.mount.x(), cam.mount.y(), cam.mount.z()}}});
  }
  j["rig"] = rig;
  j["intrinsics"] = {{"fx", s.intrinsics.fx}, {"fy", s.intrinsics.fy},
                     {"cx", s.intrinsics.cx}, {"cy", s.intrinsics.cy},
                     {"width", s.intrinsics.width}, {"height", s.intrinsics.height}};
  j["ground_landmarks"] = s.ground_landmarks;
  j["structure_landmarks"] = s.structure_landmarks;
  j["landmark_margin"] = s.landmark_margin;
  j["landmark_half_width"] = s.landmark_half_width;
  j["max_view_depth"] = s.max_view_depth;
  j["min_view_depth"] = s.min_view_depth;
  j["odometry_drift"] = s.odometry_drift;
  j["odometry_rot_sigma"] = s.odometry_rot_sigma;
  j["gnss_sigma"] = s.gnss_sigma;
  j["gnss_every"] = s.gnss_every;
  j["pixel_sigma"] = s.pixel_sigma;
  j["outlier_fraction"] = s.outlier_fraction;
  j["outlier_min_offset"] = s.outlier_min_offset;
  j["outlier_max_offset"] = s.outlier_max_offset;
  j["render_masks"] = s.render_masks;
  j["mask_stroke_px"] = s.mask_stroke_px;
  j["crop"] = {{"x_min", s.crop.x_min}, {"x_max", s.crop.x_max},
               {"y_min", s.crop.y_min}, {"y_max", s.crop.y_max}};
  j["seed"] = s.seed;
  return j.dump(1);
}

}  // namespace roadrecon
