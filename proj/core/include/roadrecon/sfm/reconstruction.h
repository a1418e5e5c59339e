#pragma once

#include <string>
#include <utility>
#include <vector>

#include "roadrecon/sfm/iterative_ba.h"
#include "roadrecon/sfm/model.h"
#include "roadrecon/sfm/rig.h"
#include "roadrecon/wigo/pose_graph.h"

namespace roadrecon {

struct ClipInputs {
  int clip_id = 0;
  FusedTrajectory trajectory;
  RigCalibration rig;
  std::vector<ImageRecord> images;
  std::vector<Track> tracks;
};

struct ReconstructConfig {
  OgiConfig ogi;
  IterativeBaConfig iterative;
};

inline constexpr char kStationaryClipWarning[] = "StationaryClipWarning";

struct Reconstruction {
  ReconstructionModel model;
  std::vector<RigFrame> frames;
  IterativeBaStats stats;
  FailureCounts triangulation_failures;  // of the initial triangulation
  std::vector<std::string> warnings;
};

// OGI, triangulation of every track, then iterative BA. A clip whose tracks
// all fail for lack of parallax yields an empty model and a
// StationaryClipWarning instead of an error.
Reconstruction ReconstructClip(const ClipInputs& inputs, const ReconstructConfig& config = {});

struct MergeConfig {
  bool require_links = false;
  // Rigidly align each model to the ones before it through linked landmarks
  // before the joint re-triangulation.
  bool prealign = true;
  IterativeBaConfig iterative;
};

using ImagePairList = std::vector<std::pair<std::string, std::string>>;

// Concatenates the models, unifies tracks that share a feature (same image,
// same pixel) directly or through a cross-clip track, re-triangulates and
// runs a global iterative BA. Cross-track observations are only used in
// images that appear in `cross_pairs` together with another image of the
// same cross track. Throws DisjointModelsError when `require_links` is set
// and there are no cross tracks.
Reconstruction MergeModels(const std::vector<Reconstruction>& models,
                           const ImagePairList& cross_pairs, const std::vector<Track>& cross_tracks,
                           const MergeConfig& config = {});

}  // namespace roadrecon
