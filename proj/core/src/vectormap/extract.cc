#include <algorithm>
#include <cmath>
#include <set>

#include "roadrecon/errors.h"
#include "roadrecon/vectormap/vector_map.h"

namespace roadrecon {

namespace {

constexpr int kDc[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDr[8] = {0, 1, 1, 1, 0, -1, -1, -1};

bool On(const GrayImage& img, int c, int r) { return img.get(c, r, 0) != 0; }

// m-adjacency: a diagonal neighbor only counts when no shared 4-neighbor is
// set, so staircases do not form triangles that look like junctions.
std::vector<std::pair<int, int>> Neighbors(const GrayImage& img, int c, int r) {
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < 8; ++k) {
    const int cc = c + kDc[k], rr = r + kDr[k];
    if (!On(img, cc, rr)) continue;
    if (kDc[k] != 0 && kDr[k] != 0 && (On(img, cc, r) || On(img, c, rr))) continue;
    out.emplace_back(cc, rr);
  }
  return out;
}

double PathLength(const std::vector<std::pair<int, int>>& path) {
  double len = 0.0;
  for (size_t i = 1; i < path.size(); ++i) {
    len += std::hypot(path[i].first - path[i - 1].first, path[i].second - path[i - 1].second);
  }
  return len;
}

double SegmentDistance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                       const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

void DouglasPeuckerRec(const std::vector<Eigen::Vector2d>& pts, int lo, int hi, double eps,
                       std::vector<char>* keep) {
  if (hi <= lo + 1) return;
  double worst = -1.0;
  int index = -1;
  for (int i = lo + 1; i < hi; ++i) {
    const double d = SegmentDistance(pts[i], pts[lo], pts[hi]);
    if (d > worst) {
      worst = d;
      index = i;
    }
  }
  if (worst > eps) {
    (*keep)[index] = 1;
    DouglasPeuckerRec(pts, lo, index, eps, keep);
    DouglasPeuckerRec(pts, index, hi, eps, keep);
  }
}

}  // namespace

std::vector<std::vector<std::pair<int, int>>> TraceSkeleton(const GrayImage& skeleton) {
  const int w = skeleton.width();
  auto key = [w](int c, int r) { return static_cast<int64_t>(r) * w + c; };
  std::set<std::pair<int64_t, int64_t>> used;
  auto edge = [&](std::pair<int, int> a, std::pair<int, int> b) {
    const int64_t ka = key(a.first, a.second), kb = key(b.first, b.second);
    return std::make_pair(std::min(ka, kb), std::max(ka, kb));
  };
  auto degree = [&](int c, int r) { return Neighbors(skeleton, c, r).size(); };

  std::vector<std::vector<std::pair<int, int>>> paths;
  auto walk = [&](std::pair<int, int> start, std::pair<int, int> next) {
    std::vector<std::pair<int, int>> path = {start, next};
    used.insert(edge(start, next));
    std::pair<int, int> prev = start, cur = next;
    while (cur != start && degree(cur.first, cur.second) == 2) {
      std::pair<int, int> step{-1, -1};
      for (const auto& n : Neighbors(skeleton, cur.first, cur.second)) {
        if (n != prev && !used.count(edge(cur, n))) step = n;
      }
      if (step.first < 0) break;
      used.insert(edge(cur, step));
      path.push_back(step);
      prev = cur;
      cur = step;
    }
    paths.push_back(std::move(path));
  };

  // Open paths start at ends and junctions; what remains are closed loops.
  for (int pass = 0; pass < 2; ++pass) {
    for (int r = 0; r < skeleton.height(); ++r) {
      for (int c = 0; c < w; ++c) {
        if (!On(skeleton, c, r)) continue;
        if (pass == 0 && degree(c, r) == 2) continue;
        for (const auto& n : Neighbors(skeleton, c, r)) {
          if (!used.count(edge({c, r}, n))) walk({c, r}, n);
        }
      }
    }
  }
  return paths;
}

std::vector<int> DouglasPeucker(const std::vector<Eigen::Vector2d>& points, double eps) {
  const int n = static_cast<int>(points.size());
  std::vector<int> out;
  if (eps <= 0.0 || n <= 2) {
    for (int i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  std::vector<char> keep(n, 0);
  keep[0] = keep[n - 1] = 1;
  DouglasPeuckerRec(points, 0, n - 1, eps, &keep);
  for (int i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(i);
  }
  return out;
}

// Thinning eats about half the stroke width off each free end. March from
// the end along the path's tangent through class cells and move the end to
// the foot of the last one, at most `max_cells` away.
void ExtendEnd(const GrayImage& mask, std::vector<Eigen::Vector2d>* pts, bool at_back,
               double max_cells) {
  if (!at_back) std::reverse(pts->begin(), pts->end());
  const int n = static_cast<int>(pts->size());
  // Thinning hooks the last cell or two toward a strip corner, so the
  // direction comes from cells further back and hooked cells are dropped.
  const int near = std::min(n - 1, 4);
  const int far = std::min(n - 1, 16);
  Eigen::Vector2d dir = (*pts)[n - 1 - near] - (*pts)[n - 1 - far];
  if (near == far || dir.norm() == 0.0) dir = pts->back() - pts->front();
  if (dir.norm() > 0.0) {
    dir.normalize();
    const Eigen::Vector2d anchor = (*pts)[n - 1 - near];
    const auto off_line = [&](const Eigen::Vector2d& q) {
      const Eigen::Vector2d d = q - anchor;
      return std::abs(d.x() * dir.y() - d.y() * dir.x());
    };
    while (static_cast<int>(pts->size()) > n - near && off_line(pts->back()) > 0.75) pts->pop_back();
    const Eigen::Vector2d end = anchor + (pts->back() - anchor).dot(dir) * dir;
    // The strip ends somewhere between the last in-class cell center and the
    // next one, so the end goes half a cell past that center.
    Eigen::Vector2d last = end;
    for (double s = 0.25; s <= max_cells + 0.5; s += 0.25) {
      const Eigen::Vector2d p = end + s * dir;
      const int c = static_cast<int>(std::floor(p.x() + 0.5));
      const int r = static_cast<int>(std::floor(p.y() + 0.5));
      if (!mask.Contains(c, r) || mask.at(c, r) == 0) break;
      last = Eigen::Vector2d(c, r);
    }
    const double t = std::min((last - end).dot(dir) + 0.5, max_cells);
    if (t > 0.0) pts->push_back(end + t * dir);
  }
  if (!at_back) std::reverse(pts->begin(), pts->end());
}

std::vector<MapElement> ExtractPolylines(const BevRaster<uint8_t>& bev, uint8_t class_id,
                                         double simplify_eps, const ExtractOptions& options) {
  std::optional<ElementClass> cls = options.element_class;
  if (!cls) cls = ElementClassForSemantic(class_id);
  if (!cls) throw InvalidArgumentError("semantic class has no map element class");

  GrayImage mask(bev.cells.width(), bev.cells.height(), 0);
  for (size_t i = 0; i < mask.data().size(); ++i) {
    mask.data()[i] = bev.cells.data()[i] == class_id ? 1 : 0;
  }
  GrayImage skeleton = ZhangSuenThin(mask);

  // Prune short spurs pixel by pixel, then trace again so the branches they
  // split merge back into one path.
  const double spur_cells = options.spur_length / bev.resolution;
  std::vector<std::vector<std::pair<int, int>>> paths;
  for (int round = 0; round < 16; ++round) {
    paths = TraceSkeleton(skeleton);
    bool pruned = false;
    for (const auto& path : paths) {
      if (path.front() == path.back()) continue;
      const size_t d0 = Neighbors(skeleton, path.front().first, path.front().second).size();
      const size_t d1 = Neighbors(skeleton, path.back().first, path.back().second).size();
      const bool spur = (d0 == 1 && d1 >= 3) || (d1 == 1 && d0 >= 3);
      if (!spur || PathLength(path) >= spur_cells) continue;
      // Keep the junction pixel itself.
      const size_t first = d0 == 1 ? 0 : 1;
      const size_t last = d0 == 1 ? path.size() - 1 : path.size();
      for (size_t i = first; i < last; ++i) skeleton.at(path[i].first, path[i].second) = 0;
      pruned = true;
    }
    if (!pruned) break;
  }

  std::vector<MapElement> out;
  int64_t id = options.first_id;
  for (const auto& path : paths) {
    if (path.size() < 2 || PathLength(path) * bev.resolution < options.min_length) continue;
    // Cell coordinates first so that end extension works on the grid.
    std::vector<Eigen::Vector2d> cells;
    for (const auto& [c, r] : path) cells.emplace_back(c, r);
    if (options.extend_ends && path.front() != path.back()) {
      const double max_cells = options.max_end_extension / bev.resolution;
      if (Neighbors(skeleton, path.back().first, path.back().second).size() == 1) {
        ExtendEnd(mask, &cells, true, max_cells);
      }
      if (Neighbors(skeleton, path.front().first, path.front().second).size() == 1) {
        ExtendEnd(mask, &cells, false, max_cells);
      }
    }
    std::vector<Eigen::Vector2d> pts;
    for (const auto& q : cells) {
      pts.emplace_back(bev.origin_x + (q.x() + 0.5) * bev.resolution,
                       bev.origin_y + (q.y() + 0.5) * bev.resolution);
    }
    MapElement e;
    e.id = id++;
    e.cls = *cls;
    for (int k : DouglasPeucker(pts, simplify_eps)) e.points.emplace_back(pts[k].x(), pts[k].y(), 0.0);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace roadrecon
