#pragma once

#include <cstdint>
#include <string>

#include "roadrecon/evaluation/sre.h"
#include "roadrecon/pairing/hsp.h"
#include "roadrecon/sfm/reconstruction.h"
#include "roadrecon/surface/elevation.h"
#include "roadrecon/surface/mesh.h"
#include "roadrecon/surface/semantics.h"
#include "roadrecon/synthetic/scene.h"
#include "roadrecon/wigo/pose_graph.h"

namespace roadrecon {

struct VectorizeConfig {
  double simplify_eps = 0.05;  // meters
  double spur_length = 1.0;    // meters
  double min_length = 0.5;     // meters
  double lift_spacing = 1.0;   // meters between lifted vertices
};

struct EvaluateConfig {
  // Map to score; empty means the vectorize stage output.
  std::string map_path;
  // "reconstructed" (merge stage cameras) or "ground_truth" (the data set's
  // reference cameras).
  std::string cameras = "reconstructed";
  SreConfig sre;
};

// Every stage parameter with its default. All randomness derives from
// `seed`; the scene's own seed field is overwritten by it.
struct RunConfig {
  uint64_t seed = 0;
  int workers = 1;
  std::string out_dir = "run";
  // Input data set; empty means the synth stage output under out_dir.
  std::string data_dir;

  SceneSpec scene;
  WigoConfig wigo;
  HspConfig hsp;
  ReconstructConfig reconstruct;
  MergeConfig merge;
  SurfaceInitConfig surface_init;
  ElevationConfig elevation;
  MeshConfig mesh;
  double bev_resolution = 0.1;
  VectorizeConfig vectorize;
  EvaluateConfig evaluate;

  // Throws ConfigError.
  void Validate() const;
  std::string DataDir() const;
};

// Strict parse: unknown keys and mistyped values throw ConfigError naming
// the field; malformed JSON throws ConfigError with line and column.
RunConfig RunConfigFromJson(const std::string& text);
std::string RunConfigToJson(const RunConfig& config);
// Reads and parses a config file; a missing file is a ConfigError.
RunConfig LoadRunConfig(const std::string& path);

}  // namespace roadrecon
