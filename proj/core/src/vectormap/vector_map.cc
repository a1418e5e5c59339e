#include "roadrecon/vectormap/vector_map.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "roadrecon/errors.h"

namespace roadrecon {

const char* ElementClassName(ElementClass cls) {
  switch (cls) {
    case ElementClass::kLaneDivider:
      return "lane_divider";
    case ElementClass::kPedCrossing:
      return "ped_crossing";
    case ElementClass::kRoadBoundary:
      return "road_boundary";
  }
  return "lane_divider";
}

ElementClass ParseElementClass(const std::string& name) {
  if (name == "lane_divider") return ElementClass::kLaneDivider;
  if (name == "ped_crossing") return ElementClass::kPedCrossing;
  if (name == "road_boundary") return ElementClass::kRoadBoundary;
  throw ParseError("unknown map element class '" + name + "'");
}

std::optional<ElementClass> ElementClassForSemantic(uint8_t semantic_class) {
  if (semantic_class == kLaneMarking) return ElementClass::kLaneDivider;
  if (semantic_class == kRoadTeeth) return ElementClass::kRoadBoundary;
  return std::nullopt;
}

void VectorMap::Validate() const {
  std::set<int64_t> ids;
  for (const auto& e : elements) {
    if (!ids.insert(e.id).second) {
      throw InvalidArgumentError("duplicate map element id " + std::to_string(e.id));
    }
    if (e.points.size() < 2) {
      throw InvalidArgumentError("map element " + std::to_string(e.id) + " has fewer than 2 vertices");
    }
    for (size_t i = 1; i < e.points.size(); ++i) {
      if (e.points[i] == e.points[i - 1]) {
        throw InvalidArgumentError("map element " + std::to_string(e.id) +
                                   " repeats a consecutive vertex");
      }
    }
  }
}

std::vector<Eigen::Vector3d> Densify(const std::vector<Eigen::Vector3d>& points,
                                     double max_spacing) {
  if (points.empty()) return {};
  std::vector<Eigen::Vector3d> out = {points.front()};
  for (size_t i = 1; i < points.size(); ++i) {
    const Eigen::Vector3d& a = points[i - 1];
    const Eigen::Vector3d& b = points[i];
    const double len = (b - a).head<2>().norm();
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / max_spacing - 1e-9)));
    for (int k = 1; k < pieces; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
    out.push_back(b);
  }
  return out;
}

VectorMap LiftTo3d(const std::vector<MapElement>& elements, const ElevationField& field,
                   double max_spacing) {
  std::ostringstream bad;
  int bad_count = 0;
  for (const auto& e : elements) {
    for (const auto& p : e.points) {
      if (!field.Contains(p.x(), p.y())) {
        if (bad_count++ < 10) bad << " element " << e.id << " (" << p.x() << ", " << p.y() << ")";
      }
    }
  }
  if (bad_count > 0) {
    throw OutOfBoundsError(std::to_string(bad_count) + " vertices outside the elevation bounds:" +
                           bad.str());
  }
  VectorMap map;
  for (const auto& e : elements) {
    MapElement lifted = e;
    lifted.points = Densify(e.points, max_spacing);
    Eigen::Matrix2Xd xy(2, lifted.points.size());
    for (size_t i = 0; i < lifted.points.size(); ++i) xy.col(i) = lifted.points[i].head<2>();
    const Eigen::VectorXd z = field.Evaluate(xy);
    for (size_t i = 0; i < lifted.points.size(); ++i) lifted.points[i].z() = z(i);
    lifted.has_z = true;
    map.elements.push_back(std::move(lifted));
  }
  return map;
}

std::string VectorMapToJson(const VectorMap& map) {
  nlohmann::ordered_json root;
  root["frame"] = map.frame;
  root["elements"] = nlohmann::ordered_json::array();
  for (const auto& e : map.elements) {
    nlohmann::ordered_json el;
    el["id"] = e.id;
    el["class"] = ElementClassName(e.cls);
    el["points"] = nlohmann::ordered_json::array();
    for (const auto& p : e.points) {
      if (e.has_z) {
        el["points"].push_back({p.x(), p.y(), p.z()});
      } else {
        el["points"].push_back({p.x(), p.y()});
      }
    }
    root["elements"].push_back(std::move(el));
  }
  return root.dump(1) + "\n";
}

VectorMap VectorMapFromJson(const std::string& text) {
  VectorMap map;
  try {
    const auto root = nlohmann::json::parse(text);
    map.frame = root.value("frame", std::string("world"));
    for (const auto& el : root.at("elements")) {
      MapElement e;
      e.id = el.at("id").get<int64_t>();
      e.cls = ParseElementClass(el.at("class").get<std::string>());
      bool first = true;
      for (const auto& p : el.at("points")) {
        if (p.size() != 2 && p.size() != 3) throw ParseError("map point needs 2 or 3 coordinates");
        const bool has_z = p.size() == 3;
        if (!first && has_z != e.has_z) throw ParseError("mixed 2D and 3D points in one element");
        e.has_z = has_z;
        first = false;
        e.points.emplace_back(p[0].get<double>(), p[1].get<double>(),
                              has_z ? p[2].get<double>() : 0.0);
      }
      map.elements.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& err) {
    throw ParseError(std::string("vector map: ") + err.what());
  }
  map.Validate();
  return map;
}

void WriteVectorMap(const std::string& path, const VectorMap& map) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << VectorMapToJson(map);
  if (!out) throw IoError("failed writing " + path);
}

VectorMap ReadVectorMap(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return VectorMapFromJson(buf.str());
}

}  // namespace roadrecon
