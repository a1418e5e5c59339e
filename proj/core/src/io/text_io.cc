#include "roadrecon/io/text_io.h"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "roadrecon/errors.h"

namespace roadrecon::io {
namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void AppendPose(std::ostringstream& os, const Pose& p) {
  const Eigen::Vector3d& t = p.translation();
  const Eigen::Quaterniond& q = p.rotation();
  os << Num(t.x()) << ' ' << Num(t.y()) << ' ' << Num(t.z()) << ' ' << Num(q.x()) << ' '
     << Num(q.y()) << ' ' << Num(q.z()) << ' ' << Num(q.w());
}

// Tokenized records of a text file with their line numbers.
class RecordReader {
 public:
  explicit RecordReader(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      std::istringstream ls(line);
      std::vector<std::string> tokens;
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (tokens.empty() || tokens[0][0] == '#') continue;
      records_.push_back({number, std::move(tokens)});
    }
  }

  size_t size() const { return records_.size(); }

  // Tokens of record i, which must have exactly `fields` entries.
  const std::vector<std::string>& Fields(size_t i, size_t fields) {
    current_ = i;
    const auto& r = records_[i];
    if (r.second.size() != fields) {
      Fail("expected " + std::to_string(fields) + " fields, got " +
           std::to_string(r.second.size()));
    }
    return r.second;
  }

  double Double(const std::string& s) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) Fail("bad number '" + s + "'");
    return v;
  }

  int64_t Int(const std::string& s) {
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) Fail("bad integer '" + s + "'");
    return v;
  }

  Pose ReadPose(const std::vector<std::string>& f, size_t at) {
    const Eigen::Vector3d t(Double(f[at]), Double(f[at + 1]), Double(f[at + 2]));
    const Eigen::Quaterniond q(Double(f[at + 6]), Double(f[at + 3]), Double(f[at + 4]),
                               Double(f[at + 5]));
    try {
      return Pose(q, t);
    } catch (const Error& e) {
      Fail(e.what());
    }
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ParseError(path_ + ":" + std::to_string(records_[current_].first) + ": " + what);
  }

 private:
  std::string path_;
  std::vector<std::pair<int, std::vector<std::string>>> records_;
  size_t current_ = 0;
};

std::string JoinPath(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out.flush()) throw IoError("write failed for " + path);
}

bool FileExists(const std::string& path) {
  std::error_code ec;
  return std::filesystem::is_regular_file(path, ec);
}

void WriteTrajectory(const std::string& path, const std::vector<StateNode>& nodes) {
  std::ostringstream os;
  for (size_t i = 0; i < nodes.size(); ++i) {
    os << Num(nodes[i].timestamp) << ' ' << i << ' ';
    AppendPose(os, nodes[i].pose);
    os << '\n';
  }
  WriteFile(path, os.str());
}

std::vector<StateNode> ReadTrajectory(const std::string& path) {
  RecordReader r(path);
  std::vector<StateNode> nodes;
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& f = r.Fields(i, 9);
    if (r.Int(f[1]) != static_cast<int64_t>(i)) r.Fail("frame ids must count up from 0");
    nodes.push_back({r.Double(f[0]), r.ReadPose(f, 2)});
    if (i > 0 && !(nodes[i].timestamp > nodes[i - 1].timestamp)) {
      r.Fail("timestamps must increase");
    }
  }
  return nodes;
}

void WriteTimestamps(const std::string& path, const std::vector<double>& timestamps) {
  std::ostringstream os;
  for (size_t i = 0; i < timestamps.size(); ++i) os << i << ' ' << Num(timestamps[i]) << '\n';
  WriteFile(path, os.str());
}

std::vector<double> ReadTimestamps(const std::string& path) {
  RecordReader r(path);
  std::vector<double> out;
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& f = r.Fields(i, 2);
    if (r.Int(f[0]) != static_cast<int64_t>(i)) r.Fail("frame ids must count up from 0");
    out.push_back(r.Double(f[1]));
    if (i > 0 && !(out[i] > out[i - 1])) r.Fail("timestamps must increase");
  }
  return out;
}

void WriteOdometry(const std::string& path, const std::vector<OdometryFactor>& factors) {
  std::ostringstream os;
  for (const auto& f : factors) {
    os << f.from_index << ' ' << f.to_index << ' ';
    AppendPose(os, f.relative);
    os << ' ' << Num(f.sigma_t) << ' ' << Num(f.sigma_r) << '\n';
  }
  WriteFile(path, os.str());
}

std::vector<OdometryFactor> ReadOdometry(const std::string& path) {
  RecordReader r(path);
  std::vector<OdometryFactor> out;
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& f = r.Fields(i, 11);
    OdometryFactor o;
    o.from_index = static_cast<int>(r.Int(f[0]));
    o.to_index = static_cast<int>(r.Int(f[1]));
    o.relative = r.ReadPose(f, 2);
    o.sigma_t = r.Double(f[9]);
    o.sigma_r = r.Double(f[10]);
    out.push_back(o);
  }
  return out;
}

void WriteGnss(const std::string& path, const std::vector<GnssFactor>& factors) {
  std::ostringstream os;
  for (const auto& g : factors) {
    os << g.node_index << ' ' << Num(g.position.x()) << ' ' << Num(g.position.y()) << ' '
       << Num(g.position.z()) << ' ' << Num(g.sigma) << '\n';
  }
  WriteFile(path, os.str());
}

std::vector<GnssFactor> ReadGnss(const std::string& path) {
  RecordReader r(path);
  std::vector<GnssFactor> out;
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& f = r.Fields(i, 5);
    out.push_back({static_cast<int>(r.Int(f[0])),
                   Eigen::Vector3d(r.Double(f[1]), r.Double(f[2]), r.Double(f[3])),
                   r.Double(f[4])});
  }
  return out;
}

void WriteImages(const std::string& path, const std::vector<ImageRecord>& images) {
  std::ostringstream os;
  for (const auto& im : images) {
    os << im.image_id << ' ' << im.clip_id << ' ' << im.rig_camera << ' ' << Num(im.timestamp)
       << '\n';
  }
  WriteFile(path, os.str());
}

std::vector<ImageRecord> ReadImages(const std::string& path) {
  RecordReader r(path);
  std::vector<ImageRecord> out;
  std::set<std::string> seen;
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& f = r.Fields(i, 4);
    if (!seen.insert(f[0]).second) r.Fail("duplicate image id " + f[0]);
    out.push_back({f[0], static_cast<int>(r.Int(f[1])), static_cast<int>(r.Int(f[2])),
                   r.Double(f[3])});
  }
  return out;
}

void WriteRig(const std::string& path, const RigCalibration& rig) {
  std::ostringstream os;
  // The reference camera goes first.
  std::vector<int> order{rig.reference};
  for (int i = 0; i < static_cast<int>(rig.cameras.size()); ++i) {
    if (i != rig.reference) order.push_back(i);
  }
  for (int i : order) {
    const RigCamera& c = rig.cameras.at(i);
    const CameraIntrinsics& k = c.intrinsics;
    os << c.name << ' ';
    AppendPose(os, c.camera_to_body);
    os << ' ' << Num(k.fx) << ' ' << Num(k.fy) << ' ' << Num(k.cx) << ' ' << Num(k.cy) << ' '
       << k.width << ' ' << k.height << '\n';
  }
  WriteFile(path, os.str());
}

RigCalibration ReadRig(const std::string& path) {
  RecordReader r(path);
  RigCalibration rig;
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& f = r.Fields(i, 14);
    RigCamera c;
    c.name = f[0];
    c.camera_to_body = r.ReadPose(f, 1);
    c.intrinsics.fx = r.Double(f[8]);
    c.intrinsics.fy = r.Double(f[9]);
    c.intrinsics.cx = r.Double(f[10]);
    c.intrinsics.cy = r.Double(f[11]);
    c.intrinsics.width = static_cast<int>(r.Int(f[12]));
    c.intrinsics.height = static_cast<int>(r.Int(f[13]));
    try {
      c.intrinsics.Validate();
    } catch (const Error& e) {
      r.Fail(e.what());
    }
    rig.cameras.push_back(c);
  }
  if (rig.cameras.empty()) throw ParseError(path + ": rig has no cameras");
  rig.reference = 0;
  return rig;
}

void WriteTracks(const std::string& path, const std::vector<Track>& tracks) {
  std::ostringstream os;
  for (const auto& t : tracks) {
    for (const auto& o : t.observations) {
      os << t.track_id << ' ' << o.image_id << ' ' << Num(o.pixel.x()) << ' ' << Num(o.pixel.y())
         << '\n';
    }
  }
  WriteFile(path, os.str());
}

std::vector<Track> ReadTracks(const std::string& path) {
  RecordReader r(path);
  std::vector<Track> tracks;
  std::unordered_map<int64_t, size_t> index;
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& f = r.Fields(i, 4);
    const int64_t id = r.Int(f[0]);
    auto [it, inserted] = index.emplace(id, tracks.size());
    if (inserted) tracks.push_back({id, {}});
    Track& t = tracks[it->second];
    for (const auto& o : t.observations) {
      if (o.image_id == f[1]) r.Fail("track " + f[0] + " observes " + f[1] + " twice");
    }
    t.observations.push_back({f[1], id, Eigen::Vector2d(r.Double(f[2]), r.Double(f[3]))});
  }
  return tracks;
}

void WriteOutlierLabels(const std::string& path,
                        const std::set<std::pair<int64_t, std::string>>& labels) {
  std::ostringstream os;
  for (const auto& [track, image] : labels) os << track << ' ' << image << '\n';
  WriteFile(path, os.str());
}

std::set<std::pair<int64_t, std::string>> ReadOutlierLabels(const std::string& path) {
  RecordReader r(path);
  std::set<std::pair<int64_t, std::string>> out;
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& f = r.Fields(i, 2);
    out.insert({r.Int(f[0]), f[1]});
  }
  return out;
}

void WritePairs(const std::string& path, const std::vector<ImagePair>& pairs) {
  std::ostringstream os;
  for (const auto& [a, b] : pairs) os << a << ' ' << b << '\n';
  WriteFile(path, os.str());
}

std::vector<ImagePair> ReadPairs(const std::string& path) {
  RecordReader r(path);
  std::vector<ImagePair> out;
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& f = r.Fields(i, 2);
    out.emplace_back(f[0], f[1]);
  }
  return out;
}

void WriteCameras(const std::string& dir, const std::map<std::string, CameraState>& cameras) {
  std::ostringstream poses, info;
  for (const auto& [id, c] : cameras) {
    const CameraIntrinsics& k = c.intrinsics;
    poses << Num(c.timestamp) << ' ' << id << ' ';
    AppendPose(poses, c.pose);
    poses << '\n';
    info << id << ' ' << c.clip_id << ' ' << c.rig_camera << ' ' << Num(k.fx) << ' ' << Num(k.fy)
         << ' ' << Num(k.cx) << ' ' << Num(k.cy) << ' ' << k.width << ' ' << k.height << '\n';
  }
  WriteFile(JoinPath(dir, "cameras.txt"), poses.str());
  WriteFile(JoinPath(dir, "camera_info.txt"), info.str());
}

std::map<std::string, CameraState> ReadCameras(const std::string& dir) {
  std::map<std::string, CameraState> cameras;
  RecordReader poses(JoinPath(dir, "cameras.txt"));
  for (size_t i = 0; i < poses.size(); ++i) {
    const auto& f = poses.Fields(i, 9);
    CameraState c;
    c.image_id = f[1];
    c.timestamp = poses.Double(f[0]);
    c.pose = poses.ReadPose(f, 2);
    if (!cameras.emplace(c.image_id, c).second) poses.Fail("duplicate camera " + c.image_id);
  }
  RecordReader info(JoinPath(dir, "camera_info.txt"));
  std::set<std::string> described;
  for (size_t i = 0; i < info.size(); ++i) {
    const auto& f = info.Fields(i, 9);
    auto it = cameras.find(f[0]);
    if (it == cameras.end()) info.Fail("no pose for camera " + f[0]);
    if (!described.insert(f[0]).second) info.Fail("duplicate camera " + f[0]);
    CameraState& c = it->second;
    c.clip_id = static_cast<int>(info.Int(f[1]));
    c.rig_camera = static_cast<int>(info.Int(f[2]));
    c.intrinsics.fx = info.Double(f[3]);
    c.intrinsics.fy = info.Double(f[4]);
    c.intrinsics.cx = info.Double(f[5]);
    c.intrinsics.cy = info.Double(f[6]);
    c.intrinsics.width = static_cast<int>(info.Int(f[7]));
    c.intrinsics.height = static_cast<int>(info.Int(f[8]));
  }
  if (described.size() != cameras.size()) {
    throw ParseError(JoinPath(dir, "camera_info.txt") + ": cameras without intrinsics");
  }
  return cameras;
}

void WriteLandmarks(const std::string& path, const std::map<int64_t, Eigen::Vector3d>& points) {
  std::ostringstream os;
  for (const auto& [id, p] : points) {
    os << id << ' ' << Num(p.x()) << ' ' << Num(p.y()) << ' ' << Num(p.z()) << '\n';
  }
  WriteFile(path, os.str());
}

std::map<int64_t, Eigen::Vector3d> ReadLandmarks(const std::string& path) {
  RecordReader r(path);
  std::map<int64_t, Eigen::Vector3d> out;
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& f = r.Fields(i, 4);
    const int64_t id = r.Int(f[0]);
    if (!out.emplace(id, Eigen::Vector3d(r.Double(f[1]), r.Double(f[2]), r.Double(f[3]))).second) {
      r.Fail("duplicate landmark " + f[0]);
    }
  }
  return out;
}

void WriteModel(const std::string& dir, const ReconstructionModel& model) {
  std::filesystem::create_directories(dir);
  WriteCameras(dir, model.cameras);
  std::map<int64_t, Eigen::Vector3d> points;
  std::ostringstream inliers;
  for (const auto& [id, lm] : model.landmarks) {
    points[id] = lm.position;
    const Track& t = model.tracks.at(id);
    for (int k : lm.inliers) inliers << id << ' ' << t.observations.at(k).image_id << '\n';
  }
  WriteLandmarks(JoinPath(dir, "landmarks.txt"), points);
  std::vector<Track> tracks;
  for (const auto& [id, t] : model.tracks) tracks.push_back(t);
  WriteTracks(JoinPath(dir, "tracks.txt"), tracks);
  WriteFile(JoinPath(dir, "inliers.txt"), inliers.str());
}

ReconstructionModel ReadModel(const std::string& dir) {
  ReconstructionModel model;
  model.cameras = ReadCameras(dir);
  for (auto& t : ReadTracks(JoinPath(dir, "tracks.txt"))) {
    const int64_t id = t.track_id;
    model.tracks.emplace(id, std::move(t));
  }
  const std::string landmarks_path = JoinPath(dir, "landmarks.txt");
  for (const auto& [id, p] : ReadLandmarks(landmarks_path)) {
    if (!model.tracks.count(id)) {
      throw ParseError(landmarks_path + ": landmark " + std::to_string(id) + " has no track");
    }
    model.landmarks[id] = Landmark{id, p, {}};
  }
  RecordReader r(JoinPath(dir, "inliers.txt"));
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& f = r.Fields(i, 2);
    const int64_t id = r.Int(f[0]);
    auto lm = model.landmarks.find(id);
    if (lm == model.landmarks.end()) r.Fail("no landmark " + f[0]);
    const auto& obs = model.tracks.at(id).observations;
    int index = -1;
    for (size_t k = 0; k < obs.size(); ++k) {
      if (obs[k].image_id == f[1]) index = static_cast<int>(k);
    }
    if (index < 0) r.Fail("track " + f[0] + " has no observation in " + f[1]);
    lm->second.inliers.push_back(index);
  }
  try {
    model.Validate();
  } catch (const Error& e) {
    throw ParseError(dir + ": " + e.what());
  }
  return model;
}

std::vector<RigFrame> FramesFromCameras(const std::map<std::string, CameraState>& cameras,
                                        const RigCalibration& rig) {
  std::map<std::pair<int, double>, RigFrame> frames;
  for (const auto& [id, c] : cameras) {
    if (c.rig_camera < 0 || c.rig_camera >= static_cast<int>(rig.cameras.size())) continue;
    const Pose& extrinsic = rig.cameras[c.rig_camera].camera_to_body;
    auto [it, inserted] = frames.try_emplace({c.clip_id, c.timestamp});
    RigFrame& f = it->second;
    if (inserted) {
      f.timestamp = c.timestamp;
      f.clip_id = c.clip_id;
      f.body = c.pose * extrinsic.Inverse();
    }
    f.members.push_back({id, extrinsic});
  }
  std::vector<RigFrame> out;
  for (auto& [key, f] : frames) out.push_back(std::move(f));
  return out;
}

}  // namespace roadrecon::io
