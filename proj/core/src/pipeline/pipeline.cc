#include "roadrecon/pipeline/pipeline.h"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "json.hpp"
#include "roadrecon/errors.h"
#include "roadrecon/evaluation/sre.h"
#include "roadrecon/io/text_io.h"
#include "roadrecon/surface/bev.h"
#include "roadrecon/util/hash.h"
#include "roadrecon/util/rng.h"
#include "roadrecon/vectormap/vector_map.h"

namespace roadrecon {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string Join(const std::string& a, const std::string& b) { return (fs::path(a) / b).string(); }

std::string StageDir(const RunConfig& c, Stage s) { return Join(c.out_dir, StageName(s)); }

void Require(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("missing input: " + path);
}

std::vector<int> ReadClipIds(const std::string& data_dir) {
  const std::string path = Join(data_dir, "clips.txt");
  std::istringstream in(io::ReadFile(path));
  std::vector<int> ids;
  std::string tok;
  while (in >> tok) {
    try {
      size_t used = 0;
      ids.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError(path + ": bad clip id '" + tok + "'");
    }
  }
  if (ids.empty()) throw ParseError(path + ": no clips");
  return ids;
}

void WriteJson(const std::string& path, const ordered_json& j) { io::WriteFile(path, j.dump(1) + "\n"); }

std::string FusedPath(const RunConfig& c, int clip) {
  return Join(Join(StageDir(c, Stage::kFuse), ClipDirName(clip)), "trajectory.txt");
}

std::string ClipData(const RunConfig& c, int clip) { return Join(c.DataDir(), ClipDirName(clip)); }

FusedTrajectory LoadFused(const RunConfig& c, int clip) {
  FusedTrajectory t;
  t.nodes = io::ReadTrajectory(FusedPath(c, clip));
  return t;
}

std::vector<ImageRecord> LoadImages(const RunConfig& c, int clip) {
  auto images = io::ReadImages(Join(ClipData(c, clip), "images.txt"));
  for (const auto& im : images) {
    if (im.clip_id != clip) {
      throw ParseError(Join(ClipData(c, clip), "images.txt") + ": image " + im.image_id +
                       " belongs to clip " + std::to_string(im.clip_id));
    }
  }
  return images;
}

ordered_json SolverJson(const SolverSummary& s) {
  return {{"iterations", s.iterations},
          {"accepted_steps", s.accepted_steps},
          {"initial_cost", s.initial_cost},
          {"final_cost", s.final_cost},
          {"termination", s.termination}};
}

ordered_json ReconstructionJson(const Reconstruction& r) {
  ordered_json iters = ordered_json::array();
  for (const auto& it : r.stats.iterations) {
    iters.push_back({{"observations", it.observations},
                     {"filtered", it.filtered},
                     {"ratio", it.ratio},
                     {"mean_error_px", it.mean_error_px},
                     {"landmarks", it.landmarks},
                     {"ba", SolverJson(it.ba)}});
  }
  ordered_json failures = ordered_json::object();
  for (const auto& [name, n] : r.triangulation_failures) failures[name] = n;
  return {{"cameras", r.model.cameras.size()},
          {"landmarks", r.model.landmarks.size()},
          {"observations", r.model.ObservationCount()},
          {"mean_reprojection_error_px",
           r.model.landmarks.empty() ? 0.0 : MeanReprojectionError(r.model)},
          {"iterations", iters},
          {"removed_images", r.stats.removed_images},
          {"flagged_images", r.stats.flagged_images},
          {"warnings", r.warnings},
          {"triangulation_failures", failures}};
}

// Labeled outliers still active in the model, keyed by feature (image, pixel)
// so that merged track ids still match.
ordered_json OutlierJson(const ReconstructionModel& model,
                         const std::set<std::pair<std::string, std::pair<double, double>>>& labeled) {
  size_t active = 0;
  for (const auto& [id, lm] : model.landmarks) {
    const Track& t = model.tracks.at(id);
    for (int k : lm.inliers) {
      const Observation& o = t.observations[k];
      if (labeled.count({o.image_id, {o.pixel.x(), o.pixel.y()}})) ++active;
    }
  }
  return {{"injected", labeled.size()},
          {"still_active", active},
          {"removed_fraction",
           labeled.empty() ? 1.0 : 1.0 - static_cast<double>(active) / labeled.size()}};
}

// Labeled outlier features of the given clips, or an empty set when the data
// set carries no labels.
std::set<std::pair<std::string, std::pair<double, double>>> LabeledOutliers(
    const RunConfig& c, const std::vector<int>& clips) {
  std::set<std::pair<std::string, std::pair<double, double>>> out;
  for (int clip : clips) {
    const std::string path = Join(ClipData(c, clip), "outliers.txt");
    if (!io::FileExists(path)) continue;
    const auto labels = io::ReadOutlierLabels(path);
    for (const auto& t : io::ReadTracks(Join(ClipData(c, clip), "tracks.txt"))) {
      for (const auto& o : t.observations) {
        if (labels.count({t.track_id, o.image_id})) {
          out.insert({o.image_id, {o.pixel.x(), o.pixel.y()}});
        }
      }
    }
  }
  return out;
}

// ---- Stage bodies. Each writes only below `out`.

void CheckSynth(const RunConfig&) {}

void Synth(const RunConfig& c, const std::string& out) {
  SceneSpec spec = c.scene;
  spec.seed = c.seed;
  const SceneBundle b = GenerateScene(spec);
  io::WriteFile(Join(out, "scene.json"), SceneSpecToJson(spec) + "\n");
  io::WriteRig(Join(out, "rig.txt"), b.rig);
  std::ostringstream clips;
  for (const auto& clip : b.clips) {
    clips << clip.clip_id << '\n';
    const std::string dir = Join(out, ClipDirName(clip.clip_id));
    fs::create_directories(dir);
    std::vector<double> ts;
    for (const auto& n : clip.truth) ts.push_back(n.timestamp);
    io::WriteTimestamps(Join(dir, "timestamps.txt"), ts);
    io::WriteTrajectory(Join(dir, "trajectory_gt.txt"), clip.truth);
    io::WriteOdometry(Join(dir, "odometry.txt"), clip.odometry);
    io::WriteGnss(Join(dir, "gnss.txt"), clip.gnss);
    io::WriteImages(Join(dir, "images.txt"), clip.images);
    io::WriteTracks(Join(dir, "tracks.txt"), clip.tracks);
    io::WriteOutlierLabels(Join(dir, "outliers.txt"), clip.outliers);
  }
  io::WriteFile(Join(out, "clips.txt"), clips.str());
  io::WriteTracks(Join(out, "cross_tracks.txt"), b.cross_tracks);
  fs::create_directories(Join(out, "masks"));
  for (const auto& [id, mask] : b.semantic_masks) WritePgm(MaskPath(out, id, "semantic"), mask);
  for (const auto& [id, masks] : b.instance_masks) {
    for (const auto& [cls, mask] : masks) WritePgm(MaskPath(out, id, ElementClassName(cls)), mask);
  }
  const std::string gt = Join(out, "gt");
  fs::create_directories(gt);
  WriteVectorMap(Join(gt, "map.json"), b.map);
  io::WriteLandmarks(Join(gt, "landmarks.txt"), b.landmarks);
  io::WriteCameras(gt, b.cameras);
  WriteJson(Join(out, "report.json"), {{"clips", b.clips.size()},
                                       {"images", b.cameras.size()},
                                       {"landmarks", b.landmarks.size()},
                                       {"observations", b.ObservationCount()},
                                       {"outliers", b.OutlierCount()},
                                       {"cross_tracks", b.cross_tracks.size()},
                                       {"map_elements", b.map.elements.size()}});
}

void CheckFuse(const RunConfig& c) {
  Require(Join(c.DataDir(), "clips.txt"));
  for (int clip : ReadClipIds(c.DataDir())) {
    for (const char* f : {"timestamps.txt", "odometry.txt", "gnss.txt"}) {
      Require(Join(ClipData(c, clip), f));
    }
  }
}

void Fuse(const RunConfig& c, const std::string& out) {
  ordered_json report = ordered_json::array();
  for (int clip : ReadClipIds(c.DataDir())) {
    const std::string in = ClipData(c, clip);
    const auto ts = io::ReadTimestamps(Join(in, "timestamps.txt"));
    const auto odo = io::ReadOdometry(Join(in, "odometry.txt"));
    const auto gnss = io::ReadGnss(Join(in, "gnss.txt"));
    const auto init = InitializeFromOdometry(ts, odo, gnss);
    const FusedTrajectory fused = FusePoseGraph(init, odo, gnss, c.wigo);
    const std::string dir = Join(out, ClipDirName(clip));
    fs::create_directories(dir);
    io::WriteTrajectory(Join(dir, "trajectory.txt"), fused.nodes);
    ordered_json entry = {{"clip", clip},
                          {"nodes", fused.nodes.size()},
                          {"gnss_fixes", gnss.size()},
                          {"solver", SolverJson(fused.summary)}};
    const std::string gt_path = Join(in, "trajectory_gt.txt");
    if (io::FileExists(gt_path)) {
      const auto gt = io::ReadTrajectory(gt_path);
      if (gt.size() == fused.nodes.size()) {
        const auto dead = DeadReckon(gt.front().pose, odo);
        entry["endpoint_error_m"] =
            (fused.nodes.back().pose.translation() - gt.back().pose.translation()).norm();
        entry["dead_reckoned_endpoint_error_m"] =
            (dead.back().translation() - gt.back().pose.translation()).norm();
      }
    }
    report.push_back(entry);
  }
  WriteJson(Join(out, "report.json"), {{"clips", report}});
}

void CheckPairs(const RunConfig& c) {
  Require(Join(c.DataDir(), "clips.txt"));
  Require(Join(c.DataDir(), "rig.txt"));
  for (int clip : ReadClipIds(c.DataDir())) {
    Require(Join(ClipData(c, clip), "images.txt"));
    Require(FusedPath(c, clip));
  }
}

void Pairs(const RunConfig& c, const std::string& out) {
  const RigCalibration rig = io::ReadRig(Join(c.DataDir(), "rig.txt"));
  std::map<std::string, CameraState> cameras;
  for (int clip : ReadClipIds(c.DataDir())) {
    auto cams = InitCamerasFromOdometry(LoadFused(c, clip), rig, LoadImages(c, clip), c.reconstruct.ogi);
    cameras.merge(cams);
  }
  std::vector<CameraRecord> records;
  for (const auto& [id, cam] : cameras) records.push_back({id, cam.clip_id, cam.pose, cam.intrinsics});
  const auto pairs = SelectPairs(records, c.hsp);
  io::WritePairs(Join(out, "pairs.txt"), pairs);
  size_t cross = 0;
  for (const auto& [a, b] : pairs) cross += cameras.at(a).clip_id != cameras.at(b).clip_id;
  const double n = static_cast<double>(records.size());
  const double exhaustive = n * (n - 1.0) / 2.0;
  WriteJson(Join(out, "report.json"),
            {{"images", records.size()},
             {"pairs", pairs.size()},
             {"cross_clip_pairs", cross},
             {"exhaustive_pairs", exhaustive},
             {"pair_fraction", exhaustive > 0 ? pairs.size() / exhaustive : 0.0}});
}

void CheckReconstruct(const RunConfig& c) {
  CheckPairs(c);
  for (int clip : ReadClipIds(c.DataDir())) Require(Join(ClipData(c, clip), "tracks.txt"));
}

void Reconstruct(const RunConfig& c, const std::string& out) {
  const RigCalibration rig = io::ReadRig(Join(c.DataDir(), "rig.txt"));
  const auto clips = ReadClipIds(c.DataDir());
  std::vector<ClipInputs> inputs;
  for (int clip : clips) {
    inputs.push_back({clip, LoadFused(c, clip), rig, LoadImages(c, clip),
                      io::ReadTracks(Join(ClipData(c, clip), "tracks.txt"))});
  }
  // Clips are independent; at most `workers` run at once and results are
  // collected in clip order.
  std::vector<Reconstruction> results(inputs.size());
  for (size_t start = 0; start < inputs.size(); start += c.workers) {
    std::vector<std::future<Reconstruction>> batch;
    const size_t end = std::min(inputs.size(), start + static_cast<size_t>(c.workers));
    for (size_t i = start; i < end; ++i) {
      batch.push_back(std::async(std::launch::async,
                                 [&, i] { return ReconstructClip(inputs[i], c.reconstruct); }));
    }
    for (size_t i = start; i < end; ++i) results[i] = batch[i - start].get();
  }
  ordered_json report = ordered_json::array();
  for (size_t i = 0; i < clips.size(); ++i) {
    const std::string dir = Join(out, ClipDirName(clips[i]));
    io::WriteModel(Join(dir, "model"), results[i].model);
    ordered_json entry = ReconstructionJson(results[i]);
    entry["clip"] = clips[i];
    entry["outliers"] = OutlierJson(results[i].model, LabeledOutliers(c, {clips[i]}));
    report.push_back(entry);
  }
  WriteJson(Join(out, "report.json"), {{"clips", report}});
}

void CheckMerge(const RunConfig& c) {
  Require(Join(c.DataDir(), "clips.txt"));
  Require(Join(c.DataDir(), "rig.txt"));
  Require(Join(c.DataDir(), "cross_tracks.txt"));
  Require(Join(StageDir(c, Stage::kPairs), "pairs.txt"));
  for (int clip : ReadClipIds(c.DataDir())) {
    Require(Join(Join(Join(StageDir(c, Stage::kReconstruct), ClipDirName(clip)), "model"),
                 "cameras.txt"));
  }
}

void Merge(const RunConfig& c, const std::string& out) {
  const RigCalibration rig = io::ReadRig(Join(c.DataDir(), "rig.txt"));
  const auto clips = ReadClipIds(c.DataDir());
  std::vector<Reconstruction> models;
  std::map<std::string, int> clip_of;
  for (int clip : clips) {
    Reconstruction r;
    r.model = io::ReadModel(
        Join(Join(StageDir(c, Stage::kReconstruct), ClipDirName(clip)), "model"));
    if (r.model.landmarks.empty()) continue;  // stationary clip
    r.frames = io::FramesFromCameras(r.model.cameras, rig);
    for (const auto& [id, cam] : r.model.cameras) clip_of[id] = cam.clip_id;
    models.push_back(std::move(r));
  }
  if (models.empty()) throw EmptyModelError("no clip produced a model to merge");
  ImagePairList cross_pairs;
  for (const auto& [a, b] : io::ReadPairs(Join(StageDir(c, Stage::kPairs), "pairs.txt"))) {
    auto ia = clip_of.find(a), ib = clip_of.find(b);
    if (ia != clip_of.end() && ib != clip_of.end() && ia->second != ib->second) {
      cross_pairs.emplace_back(a, b);
    }
  }
  const auto cross_tracks = io::ReadTracks(Join(c.DataDir(), "cross_tracks.txt"));
  const Reconstruction merged = MergeModels(models, cross_pairs, cross_tracks, c.merge);
  io::WriteModel(Join(out, "model"), merged.model);
  ordered_json report = ReconstructionJson(merged);
  report["input_models"] = models.size();
  report["cross_pairs"] = cross_pairs.size();
  report["cross_tracks"] = cross_tracks.size();
  report["outliers"] = OutlierJson(merged.model, LabeledOutliers(c, clips));
  WriteJson(Join(out, "report.json"), report);
}

void CheckSurface(const RunConfig& c) {
  Require(Join(Join(StageDir(c, Stage::kMerge), "model"), "cameras.txt"));
  Require(Join(c.DataDir(), "masks"));
  Require(Join(c.DataDir(), "clips.txt"));
  for (int clip : ReadClipIds(c.DataDir())) Require(FusedPath(c, clip));
}

void Surface(const RunConfig& c, const std::string& out) {
  const ReconstructionModel model = io::ReadModel(Join(StageDir(c, Stage::kMerge), "model"));
  SemanticMasks masks;
  for (const auto& [id, cam] : model.cameras) {
    const std::string path = MaskPath(c.DataDir(), id, "semantic");
    if (io::FileExists(path)) masks.emplace(id, ReadPgm(path));
  }
  std::vector<Pose> ground;
  for (int clip : ReadClipIds(c.DataDir())) {
    for (const auto& n : io::ReadTrajectory(FusedPath(c, clip))) ground.push_back(n.pose);
  }
  const SurfaceInit init = InitSurfacePoints(model, masks, ground, c.surface_init);
  ElevationConfig ecfg = c.elevation;
  ecfg.seed = MixSeed(c.seed, 0x5u);
  ElevationField field = FitElevation(init.points, ecfg);
  std::vector<Eigen::Vector3d> xyz;
  for (const auto& p : init.points) xyz.push_back(p.position);
  const RoadMesh mesh = BuildAndPaintMesh(&field, model.cameras, masks, {}, xyz, c.mesh, ecfg);
  const BevSet bev = ExportBev(mesh, c.bev_resolution);
  WriteBev(Join(out, "bev"), bev);
  io::WriteFile(Join(out, "field.json"), ElevationFieldToJson(field) + "\n");

  std::array<size_t, kSemanticClassCount> counts{};
  size_t observed = 0;
  for (int i = 0; i < static_cast<int>(mesh.vertices.size()); ++i) {
    if (mesh.observations[i] > 0) ++observed;
    ++counts[mesh.VertexClass(i)];
  }
  ordered_json classes = ordered_json::object();
  for (int k = 0; k < kSemanticClassCount; ++k) classes[SemanticClassName(k)] = counts[k];
  WriteJson(Join(out, "report.json"), {{"points", init.points.size()},
                                       {"augmented", init.augmented},
                                       {"corridor_density", init.corridor_density},
                                       {"masks", masks.size()},
                                       {"initial_loss_m2", field.initial_loss},
                                       {"final_loss_m2", field.final_loss},
                                       {"vertices", mesh.vertices.size()},
                                       {"observed_vertices", observed},
                                       {"vertex_classes", classes}});
}

void CheckVectorize(const RunConfig& c) {
  Require(Join(StageDir(c, Stage::kSurface), "bev_semantic.pgm"));
  Require(Join(StageDir(c, Stage::kSurface), "field.json"));
}

void Vectorize(const RunConfig& c, const std::string& out) {
  const auto bev = ReadBevSemantic(Join(StageDir(c, Stage::kSurface), "bev"));
  const ElevationField field =
      ElevationFieldFromJson(io::ReadFile(Join(StageDir(c, Stage::kSurface), "field.json")));
  std::vector<MapElement> elements;
  ordered_json counts = ordered_json::object();
  for (uint8_t cls : {uint8_t{kLaneMarking}, uint8_t{kRoadTeeth}}) {
    ExtractOptions opts;
    opts.first_id = static_cast<int64_t>(elements.size());
    opts.spur_length = c.vectorize.spur_length;
    opts.min_length = c.vectorize.min_length;
    auto found = ExtractPolylines(bev, cls, c.vectorize.simplify_eps, opts);
    counts[ElementClassName(*ElementClassForSemantic(cls))] = found.size();
    elements.insert(elements.end(), found.begin(), found.end());
  }
  const VectorMap map = LiftTo3d(elements, field, c.vectorize.lift_spacing);
  WriteVectorMap(Join(out, "map.json"), map);
  WriteJson(Join(out, "report.json"), {{"elements", map.elements.size()}, {"by_class", counts}});
}

std::string EvalMapPath(const RunConfig& c) {
  return c.evaluate.map_path.empty() ? Join(StageDir(c, Stage::kVectorize), "map.json")
                                     : c.evaluate.map_path;
}

std::string EvalCamerasDir(const RunConfig& c) {
  return c.evaluate.cameras == "ground_truth" ? Join(c.DataDir(), "gt")
                                              : Join(StageDir(c, Stage::kMerge), "model");
}

void CheckEvaluate(const RunConfig& c) {
  Require(EvalMapPath(c));
  Require(Join(EvalCamerasDir(c), "cameras.txt"));
  Require(Join(c.DataDir(), "masks"));
}

void Evaluate(const RunConfig& c, const std::string& out) {
  const VectorMap map = ReadVectorMap(EvalMapPath(c));
  const auto cameras = io::ReadCameras(EvalCamerasDir(c));
  std::vector<EvalFrame> frames;
  for (const auto& [id, cam] : cameras) {
    EvalFrame f{id, cam.pose, cam.intrinsics, {}};
    for (ElementClass cls :
         {ElementClass::kLaneDivider, ElementClass::kPedCrossing, ElementClass::kRoadBoundary}) {
      const std::string path = MaskPath(c.DataDir(), id, ElementClassName(cls));
      if (io::FileExists(path)) f.masks.emplace(cls, ReadPgm(path));
    }
    frames.push_back(std::move(f));
  }
  const SreReport report = ComputeSre(map, frames, c.evaluate.sre);
  io::WriteFile(Join(out, "report.json"), report.ToJson() + "\n");
}

struct StageDef {
  Stage stage;
  const char* name;
  void (*check)(const RunConfig&);
  void (*run)(const RunConfig&, const std::string&);
};

const StageDef kStages[] = {
    {Stage::kSynth, "synth", CheckSynth, Synth},
    {Stage::kFuse, "fuse", CheckFuse, Fuse},
    {Stage::kPairs, "pairs", CheckPairs, Pairs},
    {Stage::kReconstruct, "reconstruct", CheckReconstruct, Reconstruct},
    {Stage::kMerge, "merge", CheckMerge, Merge},
    {Stage::kSurface, "surface", CheckSurface, Surface},
    {Stage::kVectorize, "vectorize", CheckVectorize, Vectorize},
    {Stage::kEvaluate, "evaluate", CheckEvaluate, Evaluate},
};

const StageDef& Def(Stage s) {
  for (const auto& d : kStages) {
    if (d.stage == s) return d;
  }
  throw InvalidArgumentError("unknown stage");
}

std::map<std::string, std::string> HashTree(const std::string& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    files[fs::relative(entry.path(), root).generic_string()] = HashFile(entry.path().string());
  }
  return files;
}

void UpdateSummary(const RunConfig& c, const StageResult& r) {
  const std::string path = Join(c.out_dir, "summary.json");
  ordered_json old;
  if (io::FileExists(path)) {
    try {
      old = ordered_json::parse(io::ReadFile(path));
    } catch (const std::exception&) {
      old = ordered_json();
    }
  }
  ordered_json stages = ordered_json::object();
  for (const auto& d : kStages) {
    if (d.stage == r.stage) {
      stages[d.name] = {{"wall_time_s", r.wall_time_s}, {"outputs", r.files}};
    } else if (old.is_object() && old.contains("stages") && old["stages"].contains(d.name)) {
      stages[d.name] = old["stages"][d.name];
    }
  }
  double total = 0.0;
  for (const auto& [name, s] : stages.items()) total += s.value("wall_time_s", 0.0);
  WriteJson(path, {{"seed", c.seed}, {"total_wall_time_s", total}, {"stages", stages}});
}

}  // namespace

const std::vector<Stage>& AllStages() {
  static const std::vector<Stage> stages = [] {
    std::vector<Stage> s;
    for (const auto& d : kStages) s.push_back(d.stage);
    return s;
  }();
  return stages;
}

const char* StageName(Stage stage) { return Def(stage).name; }

Stage ParseStage(const std::string& name) {
  for (const auto& d : kStages) {
    if (name == d.name) return d.stage;
  }
  throw ConfigError("unknown stage '" + name + "'");
}

std::string ClipDirName(int clip_id) { return "clip_" + std::to_string(clip_id); }

std::string MaskPath(const std::string& data_dir, const std::string& image_id,
                     const std::string& suffix) {
  return Join(Join(data_dir, "masks"), image_id + "_" + suffix + ".pgm");
}

StageResult RunStage(Stage stage, const RunConfig& config) {
  const StageDef& def = Def(stage);
  def.check(config);
  const auto start = std::chrono::steady_clock::now();
  const std::string final_dir = StageDir(config, stage);
  const std::string tmp = final_dir + ".tmp";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  StageResult result;
  result.stage = stage;
  result.directory = final_dir;
  try {
    def.run(config, tmp);
    result.files = HashTree(tmp);
    std::ostringstream manifest;
    for (const auto& [path, hash] : result.files) manifest << hash << ' ' << path << '\n';
    io::WriteFile(Join(tmp, "manifest.txt"), manifest.str());
    fs::remove_all(final_dir);
    fs::rename(tmp, final_dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  UpdateSummary(config, result);
  return result;
}

std::vector<StageResult> RunCommand(const std::string& command, const RunConfig& config) {
  std::vector<StageResult> results;
  if (command == "all") {
    for (Stage s : AllStages()) results.push_back(RunStage(s, config));
  } else {
    results.push_back(RunStage(ParseStage(command), config));
  }
  return results;
}

}  // namespace roadrecon
