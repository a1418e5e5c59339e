#include "roadrecon/evaluation/sre.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"
#include "roadrecon/errors.h"

namespace roadrecon {

void CropBox::Validate() const {
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw InvalidArgumentError("crop box needs min < max on both axes");
  }
}

namespace {

// Liang-Barsky clip of segment a->b against lo <= coord <= hi planes on the
// camera x and z axes. Returns false when nothing remains.
bool ClipSegment(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double x_lo, double x_hi,
                 double z_lo, double z_hi, double* t0, double* t1) {
  *t0 = 0.0;
  *t1 = 1.0;
  const Eigen::Vector3d d = b - a;
  const double p[4] = {-d.x(), d.x(), -d.z(), d.z()};
  const double q[4] = {a.x() - x_lo, x_hi - a.x(), a.z() - z_lo, z_hi - a.z()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      *t0 = std::max(*t0, r);
    } else {
      *t1 = std::min(*t1, r);
    }
  }
  return *t0 <= *t1;
}

// Clips image-plane polylines to [0, w] x [0, h]. Segments in front of the
// camera stay straight under projection, so this is exact.
std::vector<Polyline2d> ClipToImage(const std::vector<Polyline2d>& pieces, int w, int h) {
  std::vector<Polyline2d> out;
  for (const auto& in : pieces) {
    Polyline2d piece;
    auto flush = [&] {
      if (piece.size() >= 2) out.push_back(piece);
      piece.clear();
    };
    for (size_t i = 1; i < in.size(); ++i) {
      const Eigen::Vector2d a = in[i - 1], d = in[i] - in[i - 1];
      double t0 = 0.0, t1 = 1.0;
      const double p[4] = {-d.x(), d.x(), -d.y(), d.y()};
      const double q[4] = {a.x(), w - a.x(), a.y(), h - a.y()};
      bool inside = true;
      for (int k = 0; k < 4 && inside; ++k) {
        if (p[k] == 0.0) {
          inside = q[k] >= 0.0;
        } else if (p[k] < 0.0) {
          t0 = std::max(t0, q[k] / p[k]);
        } else {
          t1 = std::min(t1, q[k] / p[k]);
        }
      }
      if (!inside || t0 > t1) {
        flush();
        continue;
      }
      if (t0 > 0.0) flush();
      if (piece.empty()) piece.push_back(a + t0 * d);
      const Eigen::Vector2d b = a + t1 * d;
      if (b != piece.back()) piece.push_back(b);
      if (t1 < 1.0) flush();
    }
    flush();
  }
  return out;
}

std::vector<Eigen::Vector3d> Densify3d(const std::vector<Eigen::Vector3d>& pts, double spacing) {
  std::vector<Eigen::Vector3d> out;
  if (pts.empty()) return out;
  out.push_back(pts.front());
  for (size_t i = 1; i < pts.size(); ++i) {
    const double len = (pts[i] - pts[i - 1]).norm();
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-9)));
    for (int k = 1; k <= pieces; ++k) {
      out.push_back(pts[i - 1] + (pts[i] - pts[i - 1]) * (static_cast<double>(k) / pieces));
    }
  }
  return out;
}

double SegmentDistance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                       const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

}  // namespace

std::vector<ProjectedElement> ProjectMapToFrame(const VectorMap& map, const Pose& camera_to_world,
                                                const CameraIntrinsics& intrinsics,
                                                const CropBox& crop,
                                                const ProjectionOptions& options) {
  crop.Validate();
  const double z_lo = std::max(crop.y_min, options.near_plane);
  const double z_hi = crop.y_max;
  std::vector<ProjectedElement> out;
  if (!(z_lo < z_hi)) return out;
  for (const auto& e : map.elements) {
    std::vector<Eigen::Vector3d> cam;
    for (const auto& p : Densify3d(e.points, options.densify_spacing)) {
      cam.push_back(WorldToCamera(camera_to_world, p));
    }
    ProjectedElement pe{e.id, e.cls, {}};
    Polyline2d piece;
    auto flush = [&] {
      if (piece.size() >= 2) pe.pieces.push_back(piece);
      piece.clear();
    };
    for (size_t i = 1; i < cam.size(); ++i) {
      double t0 = 0.0, t1 = 0.0;
      if (!ClipSegment(cam[i - 1], cam[i], crop.x_min, crop.x_max, z_lo, z_hi, &t0, &t1)) {
        flush();
        continue;
      }
      const Eigen::Vector3d a = cam[i - 1] + t0 * (cam[i] - cam[i - 1]);
      const Eigen::Vector3d b = cam[i - 1] + t1 * (cam[i] - cam[i - 1]);
      // A clipped start breaks continuity with the previous piece.
      if (t0 > 0.0) flush();
      if (piece.empty()) piece.push_back(ProjectUnchecked(intrinsics, a));
      const Eigen::Vector2d pb = ProjectUnchecked(intrinsics, b);
      if (pb != piece.back()) piece.push_back(pb);
      if (t1 < 1.0) flush();
    }
    flush();
    pe.pieces = ClipToImage(pe.pieces, intrinsics.width, intrinsics.height);
    if (!pe.pieces.empty()) out.push_back(std::move(pe));
  }
  return out;
}

std::vector<int> InstanceIds(const InstanceMask& mask) {
  std::array<bool, 256> seen{};
  for (uint8_t v : mask.data()) seen[v] = true;
  std::vector<int> ids;
  for (int i = 1; i < 256; ++i) {
    if (seen[i]) ids.push_back(i);
  }
  return ids;
}

PixelSet Skeletonize(const InstanceMask& mask, int instance_id) {
  GrayImage binary(mask.width(), mask.height(), 0);
  bool any = false;
  for (size_t i = 0; i < mask.data().size(); ++i) {
    if (mask.data()[i] == instance_id && instance_id != 0) {
      binary.data()[i] = 1;
      any = true;
    }
  }
  if (!any) throw MissingInstanceError("instance " + std::to_string(instance_id) + " not in mask");
  return ForegroundPixels(ZhangSuenThin(binary));
}

double PointToCurveDistance(const Eigen::Vector2d& p, const Polyline2d& polyline) {
  if (polyline.size() < 2) throw InvalidArgumentError("polyline needs at least 2 vertices");
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < polyline.size(); ++i) {
    best = std::min(best, SegmentDistance(p, polyline[i - 1], polyline[i]));
  }
  return best;
}

double PointToPiecesDistance(const Eigen::Vector2d& p, const std::vector<Polyline2d>& pieces) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& piece : pieces) best = std::min(best, PointToCurveDistance(p, piece));
  return best;
}

MatchResult HungarianMatch(const Eigen::MatrixXd& cost, double gate) {
  MatchResult result;
  const int rows = static_cast<int>(cost.rows()), cols = static_cast<int>(cost.cols());
  std::vector<int> row_to_col(rows, -1);
  if (rows > 0 && cols > 0) {
    // Shortest augmenting paths with potentials; requires n <= m.
    const bool transposed = rows > cols;
    const Eigen::MatrixXd a = transposed ? Eigen::MatrixXd(cost.transpose()) : cost;
    const int n = static_cast<int>(a.rows()), m = static_cast<int>(a.cols());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
      p[0] = i;
      int j0 = 0;
      std::vector<double> minv(m + 1, inf);
      std::vector<char> used(m + 1, 0);
      do {
        used[j0] = 1;
        const int i0 = p[j0];
        double delta = inf;
        int j1 = 0;
        for (int j = 1; j <= m; ++j) {
          if (used[j]) continue;
          const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
        for (int j = 0; j <= m; ++j) {
          if (used[j]) {
            u[p[j]] += delta;
            v[j] -= delta;
          } else {
            minv[j] -= delta;
          }
        }
        j0 = j1;
      } while (p[j0] != 0);
      do {
        const int j1 = way[j0];
        p[j0] = p[j1];
        j0 = j1;
      } while (j0 != 0);
    }
    for (int j = 1; j <= m; ++j) {
      if (p[j] == 0) continue;
      if (transposed) {
        row_to_col[j - 1] = p[j] - 1;
      } else {
        row_to_col[p[j] - 1] = j - 1;
      }
    }
  }
  std::vector<char> col_used(cols, 0);
  for (int r = 0; r < rows; ++r) {
    const int c = row_to_col[r];
    if (c >= 0 && cost(r, c) <= gate) {
      result.pairs.push_back({r, c, cost(r, c)});
      result.total_cost += cost(r, c);
      col_used[c] = 1;
    } else {
      result.unmatched_rows.push_back(r);
    }
  }
  for (int c = 0; c < cols; ++c) {
    if (!col_used[c]) result.unmatched_cols.push_back(c);
  }
  return result;
}

void DrawPolylines(const std::vector<Polyline2d>& pieces, double stroke, uint8_t value,
                   GrayImage* image) {
  const double half = 0.5 * stroke;
  for (const auto& piece : pieces) {
    for (size_t i = 1; i < piece.size(); ++i) {
      const Eigen::Vector2d& a = piece[i - 1];
      const Eigen::Vector2d& b = piece[i];
      const int c0 = std::max(0, static_cast<int>(std::floor(std::min(a.x(), b.x()) - half)));
      const int c1 = std::min(image->width() - 1,
                              static_cast<int>(std::floor(std::max(a.x(), b.x()) + half)));
      const int r0 = std::max(0, static_cast<int>(std::floor(std::min(a.y(), b.y()) - half)));
      const int r1 = std::min(image->height() - 1,
                              static_cast<int>(std::floor(std::max(a.y(), b.y()) + half)));
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
          if (SegmentDistance(PixelCenter(c, r), a, b) <= half) image->at(c, r) = value;
        }
      }
    }
  }
}

SreReport ComputeSre(const VectorMap& map, const std::vector<EvalFrame>& frames,
                     const SreConfig& config) {
  if (frames.empty()) throw NoFramesError("SRE needs at least one frame");
  // Entries beyond the gate become a sentinel so the assignment first
  // maximizes the number of pairs inside the gate.
  const double sentinel = 1e6 + 1e3 * config.gate_px;
  SreReport report;
  int64_t total_projected = 0, total_instances = 0, matched = 0;
  double error_sum = 0.0;
  for (const auto& frame : frames) {
    FrameReport fr;
    fr.image_id = frame.image_id;
    const auto projected =
        ProjectMapToFrame(map, frame.pose, frame.intrinsics, config.crop, config.projection);
    double pair_sum = 0.0;
    std::set<ElementClass> classes;
    for (const auto& pe : projected) classes.insert(pe.cls);
    for (const auto& [cls, mask] : frame.masks) classes.insert(cls);
    for (ElementClass cls : classes) {
      std::vector<const ProjectedElement*> rows;
      for (const auto& pe : projected) {
        if (pe.cls == cls) rows.push_back(&pe);
      }
      std::vector<PixelSet> skeletons;
      const auto mask_it = frame.masks.find(cls);
      if (mask_it != frame.masks.end()) {
        for (int id : InstanceIds(mask_it->second)) skeletons.push_back(Skeletonize(mask_it->second, id));
      }
      fr.projected += static_cast<int>(rows.size());
      fr.instances += static_cast<int>(skeletons.size());
      if (rows.empty() || skeletons.empty()) continue;
      Eigen::MatrixXd cost(rows.size(), skeletons.size());
      for (size_t r = 0; r < rows.size(); ++r) {
        for (size_t c = 0; c < skeletons.size(); ++c) {
          double sum = 0.0;
          for (const auto& [col, row] : skeletons[c]) {
            sum += PointToPiecesDistance(PixelCenter(col, row), rows[r]->pieces);
          }
          const double mean = sum / static_cast<double>(skeletons[c].size());
          cost(r, c) = mean <= config.gate_px ? mean : sentinel;
        }
      }
      const MatchResult match = HungarianMatch(cost, config.gate_px);
      for (const auto& pair : match.pairs) pair_sum += pair.cost;
      fr.pairs += static_cast<int>(match.pairs.size());
    }
    if (fr.pairs > 0) {
      fr.error_px = pair_sum / fr.pairs;
      error_sum += fr.error_px;
      ++report.frames_with_pairs;
    }
    total_projected += fr.projected;
    total_instances += fr.instances;
    matched += fr.pairs;
    report.frames.push_back(std::move(fr));
  }
  report.sre_px = report.frames_with_pairs > 0 ? error_sum / report.frames_with_pairs : 0.0;
  report.precision = total_projected > 0 ? static_cast<double>(matched) / total_projected : 1.0;
  report.recall = total_instances > 0 ? static_cast<double>(matched) / total_instances : 1.0;
  const double pr = report.precision + report.recall;
  report.f1 = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
  return report;
}

std::string SreReport::ToJson() const {
  nlohmann::ordered_json root;
  root["sre_px"] = sre_px;
  root["precision"] = precision;
  root["recall"] = recall;
  root["f1"] = f1;
  root["frames_with_pairs"] = frames_with_pairs;
  root["frames"] = nlohmann::ordered_json::array();
  for (const auto& f : frames) {
    root["frames"].push_back({{"image_id", f.image_id},
                              {"error_px", f.error_px},
                              {"pairs", f.pairs},
                              {"projected", f.projected},
                              {"instances", f.instances}});
  }
  return root.dump(1) + "\n";
}

}  // namespace roadrecon
