#include "roadrecon/pipeline/config.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "roadrecon/errors.h"
#include "util/json_fields.h"

namespace roadrecon {
namespace {

using nlohmann::ordered_json;
using internal::JsonFields;

void ReadIterative(JsonFields& f, IterativeBaConfig* c) {
  f.Get("max_iterations", &c->max_iterations);
  f.Get("max_refinement_change", &c->max_refinement_change);
  f.Get("reprojection_gate_px", &c->reprojection_gate_px);
  f.Get("initial_gate_px", &c->initial_gate_px);
  f.Get("min_angle_deg", &c->min_angle_deg);
  f.Get("image_error_gate_px", &c->image_error_gate_px);
  f.Get("rigid", &c->rigid);
  f.Get("ba_max_iterations", &c->ba.max_iterations);
  f.Get("max_deviation_m", &c->ba.max_deviation_m);
  f.Get("max_deviation_deg", &c->ba.max_deviation_deg);
  f.Get("remove_flagged", &c->ba.remove_flagged);
}

ordered_json IterativeJson(const IterativeBaConfig& c) {
  return {{"max_iterations", c.max_iterations},
          {"max_refinement_change", c.max_refinement_change},
          {"reprojection_gate_px", c.reprojection_gate_px},
          {"initial_gate_px", c.initial_gate_px},
          {"min_angle_deg", c.min_angle_deg},
          {"image_error_gate_px", c.image_error_gate_px},
          {"rigid", c.rigid},
          {"ba_max_iterations", c.ba.max_iterations},
          {"max_deviation_m", c.ba.max_deviation_m},
          {"max_deviation_deg", c.ba.max_deviation_deg},
          {"remove_flagged", c.ba.remove_flagged}};
}

// Runs `read` on the object at `key` when present.
template <typename F>
void Section(JsonFields& parent, const char* key, F read) {
  if (const auto* j = parent.Find(key)) {
    JsonFields f(*j, parent.Path(key));
    read(f);
    f.Finish();
  }
}

}  // namespace

std::string RunConfig::DataDir() const {
  return data_dir.empty() ? (std::filesystem::path(out_dir) / "synth").string() : data_dir;
}

void RunConfig::Validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (workers < 1) fail("workers: must be >= 1");
  if (out_dir.empty()) fail("out_dir: must not be empty");
  try {
    scene.Validate();
  } catch (const InvalidSpecError& e) {
    fail(std::string("scene: ") + e.what() + " (" + e.name() + ")");
  }
  try {
    hsp.Validate();
  } catch (const Error& e) {
    fail(std::string("hsp: ") + e.what());
  }
  if (wigo.max_iterations < 1) fail("wigo.max_iterations: must be >= 1");
  if (!(wigo.huber_sigmas > 0.0)) fail("wigo.huber_sigmas: must be positive");
  for (const auto* it : {&reconstruct.iterative, &merge.iterative}) {
    if (it->max_iterations < 1) fail("max_iterations: must be >= 1");
    if (!(it->reprojection_gate_px > 0.0) || !(it->initial_gate_px > 0.0) ||
        !(it->image_error_gate_px > 0.0)) {
      fail("reprojection gates must be positive");
    }
    if (it->ba.max_iterations < 1) fail("ba_max_iterations: must be >= 1");
  }
  if (reconstruct.ogi.max_time_offset < 0.0) fail("reconstruct.max_time_offset: must be >= 0");
  if (!(surface_init.corridor_half_width > 0.0) || !(surface_init.augment_spacing > 0.0) ||
      surface_init.min_density < 0.0) {
    fail("surface: corridor parameters must be positive");
  }
  if (elevation.frequencies < 0 || elevation.hidden < 1 || elevation.iterations < 0 ||
      elevation.batch_size < 1 || !(elevation.learning_rate > 0.0) ||
      !(elevation.final_learning_rate > 0.0) || elevation.min_points < 3) {
    fail("surface: invalid elevation network parameters");
  }
  if (!(mesh.resolution > 0.0) || mesh.refine_iterations < 0 || mesh.refine_radius < 0.0) {
    fail("surface: invalid mesh parameters");
  }
  if (!(bev_resolution > 0.0)) fail("surface.bev_resolution: must be positive");
  if (vectorize.spur_length < 0.0 || vectorize.min_length < 0.0 ||
      !(vectorize.lift_spacing > 0.0)) {
    fail("vectorize: lengths must be non-negative and lift_spacing positive");
  }
  if (evaluate.cameras != "reconstructed" && evaluate.cameras != "ground_truth") {
    fail("evaluate.cameras: expected \"reconstructed\" or \"ground_truth\"");
  }
  if (!(evaluate.sre.gate_px > 0.0)) fail("evaluate.gate_px: must be positive");
  try {
    evaluate.sre.crop.Validate();
  } catch (const Error& e) {
    fail(std::string("evaluate.crop: ") + e.what());
  }
}

RunConfig RunConfigFromJson(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  JsonFields root(j, "config");
  root.Get("seed", &c.seed);
  root.Get("workers", &c.workers);
  root.Get("out_dir", &c.out_dir);
  root.Get("data_dir", &c.data_dir);
  if (const auto* s = root.Find("scene")) {
    if (s->is_object() && s->contains("seed")) {
      throw ConfigError("config.scene.seed: set the top-level seed instead");
    }
    c.scene = SceneSpecFromJson(s->dump());
  }
  Section(root, "wigo", [&](JsonFields& f) {
    f.Get("max_iterations", &c.wigo.max_iterations);
    f.Get("relative_cost_tolerance", &c.wigo.relative_cost_tolerance);
    f.Get("initial_damping", &c.wigo.initial_damping);
    f.Get("huber_sigmas", &c.wigo.huber_sigmas);
  });
  Section(root, "hsp", [&](JsonFields& f) {
    f.Get("k_neighbors", &c.hsp.k_neighbors);
    f.Get("delta_z", &c.hsp.delta_z);
    f.Get("face_to_face_distance", &c.hsp.face_to_face_distance);
    f.Get("face_to_face_angle_deg", &c.hsp.face_to_face_angle_deg);
    f.Get("min_footprint_iou", &c.hsp.min_footprint_iou);
    f.Get("ground_z", &c.hsp.ground_z);
    f.Get("max_range", &c.hsp.max_range);
  });
  Section(root, "reconstruct", [&](JsonFields& f) {
    f.Get("max_time_offset", &c.reconstruct.ogi.max_time_offset);
    ReadIterative(f, &c.reconstruct.iterative);
  });
  Section(root, "merge", [&](JsonFields& f) {
    f.Get("require_links", &c.merge.require_links);
    f.Get("prealign", &c.merge.prealign);
    ReadIterative(f, &c.merge.iterative);
  });
  Section(root, "surface", [&](JsonFields& f) {
    f.Get("corridor_half_width", &c.surface_init.corridor_half_width);
    f.Get("min_density", &c.surface_init.min_density);
    f.Get("augment_spacing", &c.surface_init.augment_spacing);
    f.Get("frequencies", &c.elevation.frequencies);
    f.Get("hidden", &c.elevation.hidden);
    f.Get("iterations", &c.elevation.iterations);
    f.Get("batch_size", &c.elevation.batch_size);
    f.Get("learning_rate", &c.elevation.learning_rate);
    f.Get("final_learning_rate", &c.elevation.final_learning_rate);
    f.Get("bounds_margin", &c.elevation.bounds_margin);
    f.Get("fit_plane", &c.elevation.fit_plane);
    f.Get("min_points", &c.elevation.min_points);
    f.Get("mesh_resolution", &c.mesh.resolution);
    f.Get("refine_iterations", &c.mesh.refine_iterations);
    f.Get("refine_radius", &c.mesh.refine_radius);
    f.Get("bev_resolution", &c.bev_resolution);
  });
  Section(root, "vectorize", [&](JsonFields& f) {
    f.Get("simplify_eps", &c.vectorize.simplify_eps);
    f.Get("spur_length", &c.vectorize.spur_length);
    f.Get("min_length", &c.vectorize.min_length);
    f.Get("lift_spacing", &c.vectorize.lift_spacing);
  });
  Section(root, "evaluate", [&](JsonFields& f) {
    f.Get("map_path", &c.evaluate.map_path);
    f.Get("cameras", &c.evaluate.cameras);
    f.Get("gate_px", &c.evaluate.sre.gate_px);
    f.Get("densify_spacing", &c.evaluate.sre.projection.densify_spacing);
    f.Get("near_plane", &c.evaluate.sre.projection.near_plane);
    Section(f, "crop", [&](JsonFields& g) {
      g.Get("x_min", &c.evaluate.sre.crop.x_min);
      g.Get("x_max", &c.evaluate.sre.crop.x_max);
      g.Get("y_min", &c.evaluate.sre.crop.y_min);
      g.Get("y_max", &c.evaluate.sre.crop.y_max);
    });
  });
  root.Finish();
  c.scene.seed = c.seed;
  c.Validate();
  return c;
}

std::string RunConfigToJson(const RunConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["out_dir"] = c.out_dir;
  j["data_dir"] = c.data_dir;
  ordered_json scene = ordered_json::parse(SceneSpecToJson(c.scene));
  scene.erase("seed");
  j["scene"] = scene;
  j["wigo"] = {{"max_iterations", c.wigo.max_iterations},
               {"relative_cost_tolerance", c.wigo.relative_cost_tolerance},
               {"initial_damping", c.wigo.initial_damping},
               {"huber_sigmas", c.wigo.huber_sigmas}};
  j["hsp"] = {{"k_neighbors", c.hsp.k_neighbors},
              {"delta_z", c.hsp.delta_z},
              {"face_to_face_distance", c.hsp.face_to_face_distance},
              {"face_to_face_angle_deg", c.hsp.face_to_face_angle_deg},
              {"min_footprint_iou", c.hsp.min_footprint_iou},
              {"ground_z", c.hsp.ground_z},
              {"max_range", c.hsp.max_range}};
  ordered_json rec = {{"max_time_offset", c.reconstruct.ogi.max_time_offset}};
  rec.update(IterativeJson(c.reconstruct.iterative));
  j["reconstruct"] = rec;
  ordered_json merge = {{"require_links", c.merge.require_links}, {"prealign", c.merge.prealign}};
  merge.update(IterativeJson(c.merge.iterative));
  j["merge"] = merge;
  j["surface"] = {{"corridor_half_width", c.surface_init.corridor_half_width},
                  {"min_density", c.surface_init.min_density},
                  {"augment_spacing", c.surface_init.augment_spacing},
                  {"frequencies", c.elevation.frequencies},
                  {"hidden", c.elevation.hidden},
                  {"iterations", c.elevation.iterations},
                  {"batch_size", c.elevation.batch_size},
                  {"learning_rate", c.elevation.learning_rate},
                  {"final_learning_rate", c.elevation.final_learning_rate},
                  {"bounds_margin", c.elevation.bounds_margin},
                  {"fit_plane", c.elevation.fit_plane},
                  {"min_points", c.elevation.min_points},
                  {"mesh_resolution", c.mesh.resolution},
                  {"refine_iterations", c.mesh.refine_iterations},
                  {"refine_radius", c.mesh.refine_radius},
                  {"bev_resolution", c.bev_resolution}};
  j["vectorize"] = {{"simplify_eps", c.vectorize.simplify_eps},
                    {"spur_length", c.vectorize.spur_length},
                    {"min_length", c.vectorize.min_length},
                    {"lift_spacing", c.vectorize.lift_spacing}};
  const CropBox& crop = c.evaluate.sre.crop;
  j["evaluate"] = {{"map_path", c.evaluate.map_path},
                   {"cameras", c.evaluate.cameras},
                   {"gate_px", c.evaluate.sre.gate_px},
                   {"densify_spacing", c.evaluate.sre.projection.densify_spacing},
                   {"near_plane", c.evaluate.sre.projection.near_plane},
                   {"crop",
                    {{"x_min", crop.x_min},
                     {"x_max", crop.x_max},
                     {"y_min", crop.y_min},
                     {"y_max", crop.y_max}}}};
  return j.dump(1);
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return RunConfigFromJson(os.str());
}

}  // namespace roadrecon
