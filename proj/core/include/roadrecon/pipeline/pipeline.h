#pragma once

#include <map>
#include <string>
#include <vector>

#include "roadrecon/pipeline/config.h"

namespace roadrecon {

// Stages in chain order.
enum class Stage { kSynth, kFuse, kPairs, kReconstruct, kMerge, kSurface, kVectorize, kEvaluate };

const std::vector<Stage>& AllStages();
const char* StageName(Stage stage);
// Throws ConfigError for unknown names.
Stage ParseStage(const std::string& name);

struct StageResult {
  Stage stage = Stage::kSynth;
  std::string directory;                     // <out_dir>/<stage name>
  std::map<std::string, std::string> files;  // relative path -> FNV-1a hash
  double wall_time_s = 0.0;
};

// Runs one stage. Inputs are checked before anything is written; a missing
// input throws ConfigError. Outputs go to `<out_dir>/<stage>.tmp`, which
// replaces `<out_dir>/<stage>` only on success, so a failed stage leaves no
// partial output. Every stage directory holds a manifest.txt of
// `hash path` lines. Wall time and hashes are merged into
// `<out_dir>/summary.json`, the only output that is not byte-reproducible.
StageResult RunStage(Stage stage, const RunConfig& config);

// `all` runs every stage in order; otherwise the named stage.
std::vector<StageResult> RunCommand(const std::string& command, const RunConfig& config);

// Per-stage artifact names inside a stage or data directory.
std::string ClipDirName(int clip_id);            // "clip_<k>"
std::string MaskPath(const std::string& data_dir, const std::string& image_id,
                     const std::string& suffix);  // <data>/masks/<image>_<suffix>.pgm

}  // namespace roadrecon
