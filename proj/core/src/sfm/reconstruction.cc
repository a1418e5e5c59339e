#include "roadrecon/sfm/reconstruction.h"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include <Eigen/Geometry>

#include "roadrecon/errors.h"

namespace roadrecon {

Reconstruction ReconstructClip(const ClipInputs& inputs, const ReconstructConfig& config) {
  Reconstruction out;
  out.model.cameras = InitCamerasFromOdometry(inputs.trajectory, inputs.rig, inputs.images,
                                              config.ogi);
  out.frames = BuildRigFrames(inputs.trajectory, inputs.rig, inputs.images, config.ogi);
  for (const auto& track : inputs.tracks) {
    if (!out.model.tracks.emplace(track.track_id, track).second) {
      throw InvalidArgumentError("duplicate track id " + std::to_string(track.track_id));
    }
  }
  TriangulationConfig tri;
  tri.max_reprojection_px = config.iterative.initial_gate_px;
  tri.min_angle_deg = config.iterative.min_angle_deg;
  out.triangulation_failures = RetriangulateAll(&out.model, tri);

  if (out.model.landmarks.empty()) {
    const int low = out.triangulation_failures.count("LowParallaxError")
                        ? out.triangulation_failures.at("LowParallaxError")
                        : 0;
    int total = 0;
    for (const auto& [name, n] : out.triangulation_failures) total += n;
    if (total > 0 && 2 * low > total) {
      out.warnings.push_back(std::string(kStationaryClipWarning) + ": clip " +
                             std::to_string(inputs.clip_id) +
                             " has no parallax; no landmarks reconstructed");
      return out;
    }
    throw EmptyModelError("clip " + std::to_string(inputs.clip_id) +
                          ": no landmark could be triangulated");
  }
  out.stats = IterativeBundleAdjust(&out.model, &out.frames, config.iterative);
  return out;
}

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  size_t Find(size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void Union(size_t a, size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<size_t> parent_;
};

using FeatureKey = std::tuple<std::string, double, double>;

FeatureKey KeyOf(const Observation& obs) { return {obs.image_id, obs.pixel.x(), obs.pixel.y()}; }

void TransformReconstruction(const Pose& transform, Reconstruction* r) {
  for (auto& [id, cam] : r->model.cameras) cam.pose = transform * cam.pose;
  for (auto& [id, lm] : r->model.landmarks) lm.position = transform.Apply(lm.position);
  for (auto& frame : r->frames) frame.body = transform * frame.body;
}

}  // namespace

Reconstruction MergeModels(const std::vector<Reconstruction>& models,
                           const ImagePairList& cross_pairs, const std::vector<Track>& cross_tracks,
                           const MergeConfig& config) {
  if (config.require_links && cross_tracks.empty()) {
    throw DisjointModelsError("no cross-clip tracks link the models");
  }
  if (models.empty()) throw InvalidArgumentError("MergeModels: no models");

  // Union-find nodes: every per-model track, then every cross track.
  struct Node {
    int model = -1;  // -1 for cross tracks
    const Track* track = nullptr;
  };
  std::vector<Node> nodes;
  for (int m = 0; m < static_cast<int>(models.size()); ++m) {
    for (const auto& [id, track] : models[m].model.tracks) nodes.push_back({m, &track});
  }
  const size_t first_cross = nodes.size();

  // Cross-track observations survive only in images paired with another
  // image of the same cross track.
  std::set<std::pair<std::string, std::string>> pair_set;
  for (const auto& [a, b] : cross_pairs) {
    pair_set.emplace(a, b);
    pair_set.emplace(b, a);
  }
  std::vector<Track> filtered_cross;
  for (const auto& track : cross_tracks) {
    Track kept{track.track_id, {}};
    for (const auto& obs : track.observations) {
      for (const auto& other : track.observations) {
        if (other.image_id != obs.image_id && pair_set.count({obs.image_id, other.image_id})) {
          kept.observations.push_back(obs);
          break;
        }
      }
    }
    filtered_cross.push_back(std::move(kept));
  }
  for (const auto& track : filtered_cross) nodes.push_back({-1, &track});

  DisjointSet sets(nodes.size());
  std::map<FeatureKey, size_t> owner;
  for (size_t n = 0; n < nodes.size(); ++n) {
    for (const auto& obs : nodes[n].track->observations) {
      auto [it, inserted] = owner.emplace(KeyOf(obs), n);
      if (!inserted) sets.Union(it->second, n);
    }
  }

  // Pre-alignment through landmarks whose tracks ended up linked.
  std::vector<Reconstruction> placed = models;
  if (config.prealign) {
    for (int m = 1; m < static_cast<int>(placed.size()); ++m) {
      std::map<size_t, Eigen::Vector3d> reference;  // component -> earlier landmark
      for (size_t n = 0; n < first_cross; ++n) {
        if (nodes[n].model >= m) continue;
        const auto& lms = placed[nodes[n].model].model.landmarks;
        auto it = lms.find(nodes[n].track->track_id);
        if (it != lms.end()) reference.emplace(sets.Find(n), it->second.position);
      }
      std::vector<Eigen::Vector3d> src, dst;
      for (size_t n = 0; n < first_cross; ++n) {
        if (nodes[n].model != m) continue;
        const auto& lms = placed[m].model.landmarks;
        auto it = lms.find(nodes[n].track->track_id);
        auto ref = reference.find(sets.Find(n));
        if (it == lms.end() || ref == reference.end()) continue;
        src.push_back(it->second.position);
        dst.push_back(ref->second);
      }
      if (src.size() < 3) continue;
      Eigen::Matrix3Xd S(3, src.size()), D(3, dst.size());
      for (size_t i = 0; i < src.size(); ++i) {
        S.col(i) = src[i];
        D.col(i) = dst[i];
      }
      const Eigen::Matrix4d T = Eigen::umeyama(S, D, false);
      TransformReconstruction(Pose::FromRotation(T.topLeftCorner<3, 3>(), T.topRightCorner<3, 1>()),
                              &placed[m]);
    }
  }

  Reconstruction out;
  for (const auto& r : placed) {
    for (const auto& [id, cam] : r.model.cameras) {
      if (!out.model.cameras.emplace(id, cam).second) {
        throw InvalidArgumentError("image " + id + " appears in more than one model");
      }
    }
    out.frames.insert(out.frames.end(), r.frames.begin(), r.frames.end());
    out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
  }

  // Merged track per component, id = smallest member track id from a model
  // (cross-only components keep their own id offset past every model id).
  std::map<size_t, std::vector<size_t>> components;
  for (size_t n = 0; n < nodes.size(); ++n) components[sets.Find(n)].push_back(n);
  int64_t max_id = 0;
  for (size_t n = 0; n < first_cross; ++n) max_id = std::max(max_id, nodes[n].track->track_id);
  for (const auto& [root, members] : components) {
    Track merged;
    int64_t model_id = std::numeric_limits<int64_t>::max();
    int64_t cross_id = std::numeric_limits<int64_t>::max();
    std::set<std::string> seen;
    for (size_t n : members) {
      if (n >= first_cross) {
        cross_id = std::min(cross_id, max_id + 1 + nodes[n].track->track_id);
      } else {
        model_id = std::min(model_id, nodes[n].track->track_id);
      }
      for (const auto& obs : nodes[n].track->observations) {
        if (seen.insert(obs.image_id).second) merged.observations.push_back(obs);
      }
    }
    merged.track_id = model_id != std::numeric_limits<int64_t>::max() ? model_id : cross_id;
    if (merged.observations.size() < 2) continue;
    for (auto& obs : merged.observations) obs.track_id = merged.track_id;
    out.model.tracks.emplace(merged.track_id, std::move(merged));
  }

  const bool all_in_frames = [&] {
    std::set<std::string> members;
    for (const auto& f : out.frames) {
      for (const auto& m : f.members) members.insert(m.image_id);
    }
    for (const auto& [id, cam] : out.model.cameras) {
      if (!members.count(id)) return false;
    }
    return true;
  }();
  out.stats = IterativeBundleAdjust(&out.model, all_in_frames ? &out.frames : nullptr,
                                    config.iterative);
  return out;
}

}  // namespace roadrecon
