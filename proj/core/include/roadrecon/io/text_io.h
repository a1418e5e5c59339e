#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "roadrecon/pairing/hsp.h"
#include "roadrecon/sfm/model.h"
#include "roadrecon/sfm/rig.h"
#include "roadrecon/wigo/pose_graph.h"

// Whitespace-separated text records, one per line. Blank lines and lines
// starting with '#' are ignored on read. Doubles are written with 17
// significant digits so every file round-trips exactly. Writers throw
// IoError, readers IoError for missing files and ParseError (naming
// path:line) for malformed records.
namespace roadrecon::io {

// `timestamp_s frame_id tx ty tz qx qy qz qw`, frame_id = node index.
void WriteTrajectory(const std::string& path, const std::vector<StateNode>& nodes);
std::vector<StateNode> ReadTrajectory(const std::string& path);

// `frame_id timestamp_s`: node times of an odometry chain.
void WriteTimestamps(const std::string& path, const std::vector<double>& timestamps);
std::vector<double> ReadTimestamps(const std::string& path);

// `from to tx ty tz qx qy qz qw sigma_t sigma_r`
void WriteOdometry(const std::string& path, const std::vector<OdometryFactor>& factors);
std::vector<OdometryFactor> ReadOdometry(const std::string& path);

// `node x y z sigma`
void WriteGnss(const std::string& path, const std::vector<GnssFactor>& factors);
std::vector<GnssFactor> ReadGnss(const std::string& path);

// `image_id clip_id rig_camera timestamp_s`
void WriteImages(const std::string& path, const std::vector<ImageRecord>& images);
std::vector<ImageRecord> ReadImages(const std::string& path);

// `name tx ty tz qx qy qz qw fx fy cx cy width height`, camera-to-body.
// The first camera is the reference.
void WriteRig(const std::string& path, const RigCalibration& rig);
RigCalibration ReadRig(const std::string& path);

// `track_id image_id px py`; observations of a track keep file order and
// tracks are returned in order of first appearance.
void WriteTracks(const std::string& path, const std::vector<Track>& tracks);
std::vector<Track> ReadTracks(const std::string& path);

// `track_id image_id` of labeled outlier observations.
void WriteOutlierLabels(const std::string& path,
                        const std::set<std::pair<int64_t, std::string>>& labels);
std::set<std::pair<int64_t, std::string>> ReadOutlierLabels(const std::string& path);

// `image_id_a image_id_b`
void WritePairs(const std::string& path, const std::vector<ImagePair>& pairs);
std::vector<ImagePair> ReadPairs(const std::string& path);

// Camera poses in the trajectory format with the image id as frame id.
// `cameras.txt` plus `camera_info.txt` (`image_id clip_id rig_camera fx fy cx
// cy width height`) carry CameraState.
void WriteCameras(const std::string& dir, const std::map<std::string, CameraState>& cameras);
std::map<std::string, CameraState> ReadCameras(const std::string& dir);

// `track_id X Y Z`
void WriteLandmarks(const std::string& path, const std::map<int64_t, Eigen::Vector3d>& points);
std::map<int64_t, Eigen::Vector3d> ReadLandmarks(const std::string& path);

// A model directory: cameras.txt, camera_info.txt, landmarks.txt, tracks.txt
// (raw observations) and inliers.txt (`track_id image_id` of every active
// observation). Throws ParseError when the files disagree.
void WriteModel(const std::string& dir, const ReconstructionModel& model);
ReconstructionModel ReadModel(const std::string& dir);

// Rig frames rebuilt from camera poses: cameras sharing (clip, timestamp)
// form one frame whose body pose comes from its first member. Cameras
// without a rig slot are skipped.
std::vector<RigFrame> FramesFromCameras(const std::map<std::string, CameraState>& cameras,
                                        const RigCalibration& rig);

// Whole-file helpers.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);
bool FileExists(const std::string& path);

}  // namespace roadrecon::io
