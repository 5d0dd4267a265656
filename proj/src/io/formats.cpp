#include "ergopipe/io/formats.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ergopipe/error.hpp"
#include "ergopipe/log.hpp"

namespace ergopipe::io {

using nlohmann::json;

namespace {

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  out << j.dump(2) << "\n";
  if (!out) {
    throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
  }
}

[[noreturn]] void parse_fail(const std::string& context,
                             const std::string& what) {
  throw Error(ErrorCode::ParseError, context + ": " + what);
}

double as_double(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key) || !j[key].is_number()) {
    parse_fail(context, std::string("missing or non-numeric '") + key + "'");
  }
  return j[key].get<double>();
}

std::string as_string(const json& j, const char* key,
                      const std::string& context) {
  if (!j.contains(key) || !j[key].is_string()) {
    parse_fail(context, std::string("missing or non-string '") + key + "'");
  }
  return j[key].get<std::string>();
}

const json& as_array(const json& j, const char* key,
                     const std::string& context) {
  if (!j.contains(key) || !j[key].is_array()) {
    parse_fail(context, std::string("missing or non-array '") + key + "'");
  }
  return j[key];
}

void warn_unknown_fields(const json& j, std::initializer_list<const char*> known,
                         const std::string& context) {
  for (const auto& [key, _] : j.items()) {
    bool found = false;
    for (const char* k : known) {
      if (key == k) {
        found = true;
        break;
      }
    }
    if (!found) {
      log::warn(context + ": ignoring unknown field '" + key + "'");
    }
  }
}

}  // namespace

void check_schema_version(const std::string& version,
                          const std::string& context) {
  const auto dot = version.find('.');
  const std::string major = dot == std::string::npos ? version
                                                     : version.substr(0, dot);
  const std::string expected(kSchemaVersion);
  if (major != expected.substr(0, expected.find('.'))) {
    throw Error(ErrorCode::SchemaVersionMismatch,
                context + ": schema_version " + version +
                    " is incompatible with " + kSchemaVersion);
  }
}

GroundTruthPose Detection::to_ground_truth() const {
  GroundTruthPose gt;
  gt.camera_id = pose.camera_id;
  gt.frame_id = pose.frame_id;
  gt.keypoints.reserve(pose.keypoints.size());
  for (std::size_t i = 0; i < pose.keypoints.size(); ++i) {
    const int v = visibility && i < visibility->size() ? (*visibility)[i] : 2;
    gt.keypoints.push_back({pose.keypoints[i].x, pose.keypoints[i].y, v});
  }
  gt.segment_area = segment_area.value_or(0.0);
  return gt;
}

KeypointsFile read_keypoints_file(const std::filesystem::path& path) {
  const json root = load_json(path);
  const std::string context = path.string();
  check_schema_version(as_string(root, "schema_version", context), context);
  warn_unknown_fields(root, {"schema_version", "keypoint_format", "frames"},
                      context);

  KeypointsFile file;
  file.keypoint_format = as_string(root, "keypoint_format", context);
  file.keypoint_count = file.keypoint_format == "coco17"
                            ? coco::kKeypointCount
                            : -1;  // free-form layouts carry their own K

  int frame_index = 0;
  for (const json& jf : as_array(root, "frames", context)) {
    const std::string fctx =
        context + " frame[" + std::to_string(frame_index) + "]";
    KeypointFrame frame;
    frame.frame_id = as_string(jf, "frame_id", fctx);
    for (const json& jc : as_array(jf, "cameras", fctx)) {
      const std::string cctx = fctx + " camera[" +
                               std::to_string(frame.cameras.size()) + "]";
      CameraDetections cam;
      cam.camera_id = as_string(jc, "camera_id", cctx);
      int det_index = 0;
      for (const json& jd : as_array(jc, "detections", cctx)) {
        const std::string dctx =
            cctx + " detection[" + std::to_string(det_index) + "]";
        warn_unknown_fields(jd,
                            {"score", "keypoints", "bbox_area", "visibility",
                             "segment_area"},
                            dctx);
        Detection det;
        det.pose.camera_id = cam.camera_id;
        det.pose.frame_id = frame.frame_id;
        det.pose.detection_score = as_double(jd, "score", dctx);
        for (const json& jk : as_array(jd, "keypoints", dctx)) {
          if (!jk.is_array() || jk.size() != 3) {
            parse_fail(dctx, "keypoint entries must be [x, y, conf] triples");
          }
          det.pose.keypoints.push_back({jk[0].get<double>(),
                                        jk[1].get<double>(),
                                        jk[2].get<double>()});
        }
        if (file.keypoint_count > 0 &&
            static_cast<int>(det.pose.keypoints.size()) !=
                file.keypoint_count) {
          parse_fail(dctx, "expected " + std::to_string(file.keypoint_count) +
                               " keypoints, got " +
                               std::to_string(det.pose.keypoints.size()));
        }
        if (jd.contains("bbox_area")) {
          det.pose.bbox_area = as_double(jd, "bbox_area", dctx);
        }
        if (jd.contains("visibility")) {
          std::vector<int> vis;
          for (const json& v : as_array(jd, "visibility", dctx)) {
            vis.push_back(v.get<int>());
          }
          if (vis.size() != det.pose.keypoints.size()) {
            parse_fail(dctx, "visibility length must match keypoints");
          }
          det.visibility = std::move(vis);
        }
        if (jd.contains("segment_area")) {
          det.segment_area = as_double(jd, "segment_area", dctx);
        }
        cam.detections.push_back(std::move(det));
        ++det_index;
      }
      frame.cameras.push_back(std::move(cam));
    }
    file.frames.push_back(std::move(frame));
    ++frame_index;
  }
  return file;
}

void write_keypoints_file(const std::filesystem::path& path,
                          const KeypointsFile& file) {
  json root;
  root["schema_version"] = kSchemaVersion;
  root["keypoint_format"] = file.keypoint_format;
  json frames = json::array();
  for (const auto& frame : file.frames) {
    json jf;
    jf["frame_id"] = frame.frame_id;
    json cameras = json::array();
    for (const auto& cam : frame.cameras) {
      json jc;
      jc["camera_id"] = cam.camera_id;
      json dets = json::array();
      for (const auto& det : cam.detections) {
        json jd;
        jd["score"] = det.pose.detection_score;
        json kps = json::array();
        for (const auto& kp : det.pose.keypoints) {
          kps.push_back(json::array({kp.x, kp.y, kp.conf}));
        }
        jd["keypoints"] = std::move(kps);
        if (det.pose.bbox_area) jd["bbox_area"] = *det.pose.bbox_area;
        if (det.visibility) jd["visibility"] = *det.visibility;
        if (det.segment_area) jd["segment_area"] = *det.segment_area;
        dets.push_back(std::move(jd));
      }
      jc["detections"] = std::move(dets);
      cameras.push_back(std::move(jc));
    }
    jf["cameras"] = std::move(cameras);
    frames.push_back(std::move(jf));
  }
  root["frames"] = std::move(frames);
  save_json(path, root);
}

CalibrationFile read_calibration_file(const std::filesystem::path& path) {
  const json root = load_json(path);
  const std::string context = path.string();
  check_schema_version(as_string(root, "schema_version", context), context);
  warn_unknown_fields(root, {"schema_version", "up_axis", "cameras"}, context);

  CalibrationFile file;
  const json& up = as_array(root, "up_axis", context);
  if (up.size() != 3) parse_fail(context, "up_axis must have 3 entries");
  file.world.up_axis = Eigen::Vector3d(up[0].get<double>(), up[1].get<double>(),
                                       up[2].get<double>());

  for (const json& jc : as_array(root, "cameras", context)) {
    const std::string cctx = context + " camera[" +
                             std::to_string(file.cameras.size()) + "]";
    warn_unknown_fields(
        jc, {"camera_id", "K", "R", "t", "dist", "image_size"}, cctx);
    CameraParams cam;
    cam.camera_id = as_string(jc, "camera_id", cctx);
    const json& k = as_array(jc, "K", cctx);
    const json& r = as_array(jc, "R", cctx);
    const json& t = as_array(jc, "t", cctx);
    if (k.size() != 9 || r.size() != 9 || t.size() != 3) {
      parse_fail(cctx, "K/R must have 9 entries, t must have 3");
    }
    for (int i = 0; i < 9; ++i) {
      cam.K(i / 3, i % 3) = k[i].get<double>();
      cam.R(i / 3, i % 3) = r[i].get<double>();
    }
    for (int i = 0; i < 3; ++i) cam.t(i) = t[i].get<double>();
    if (jc.contains("dist")) {
      const json& d = as_array(jc, "dist", cctx);
      if (d.size() != 5) parse_fail(cctx, "dist must have 5 entries");
      for (int i = 0; i < 5; ++i) cam.dist(i) = d[i].get<double>();
    }
    const json& size = as_array(jc, "image_size", cctx);
    if (size.size() != 2) parse_fail(cctx, "image_size must be [w, h]");
    cam.width = size[0].get<int>();
    cam.height = size[1].get<int>();
    file.cameras.push_back(std::move(cam));
  }
  return file;
}

void write_calibration_file(const std::filesystem::path& path,
                            const CalibrationFile& file) {
  json root;
  root["schema_version"] = kSchemaVersion;
  root["up_axis"] = {file.world.up_axis.x(), file.world.up_axis.y(),
                     file.world.up_axis.z()};
  json cameras = json::array();
  for (const auto& cam : file.cameras) {
    json jc;
    jc["camera_id"] = cam.camera_id;
    json k = json::array(), r = json::array(), t = json::array(),
         d = json::array();
    for (int i = 0; i < 9; ++i) {
      k.push_back(cam.K(i / 3, i % 3));
      r.push_back(cam.R(i / 3, i % 3));
    }
    for (int i = 0; i < 3; ++i) t.push_back(cam.t(i));
    for (int i = 0; i < 5; ++i) d.push_back(cam.dist(i));
    jc["K"] = std::move(k);
    jc["R"] = std::move(r);
    jc["t"] = std::move(t);
    jc["dist"] = std::move(d);
    jc["image_size"] = {cam.width, cam.height};
    cameras.push_back(std::move(jc));
  }
  root["cameras"] = std::move(cameras);
  save_json(path, root);
}

SkeletonFile read_skeleton_file(const std::filesystem::path& path) {
  const json root = load_json(path);
  const std::string context = path.string();
  check_schema_version(as_string(root, "schema_version", context), context);
  warn_unknown_fields(root, {"schema_version", "frames", "stats"}, context);

  SkeletonFile file;
  for (const json& jf : as_array(root, "frames", context)) {
    const std::string fctx = context + " frame[" +
                             std::to_string(file.frames.size()) + "]";
    SkeletonFrame frame;
    frame.frame_id = as_string(jf, "frame_id", fctx);
    for (const json& jp : as_array(jf, "people", fctx)) {
      const std::string pctx = fctx + " person[" +
                               std::to_string(frame.people.size()) + "]";
      Skeleton3D skel;
      skel.frame_id = frame.frame_id;
      skel.person_id = as_string(jp, "person_id", pctx);
      for (const json& jj : as_array(jp, "joints", pctx)) {
        Joint3D joint;
        const json& xyz = as_array(jj, "xyz", pctx);
        if (xyz.size() != 3) parse_fail(pctx, "xyz must have 3 entries");
        joint.position = Eigen::Vector3d(
            xyz[0].get<double>(), xyz[1].get<double>(), xyz[2].get<double>());
        joint.valid = jj.value("valid", false);
        joint.reproj_rms = jj.value("reproj_rms", 0.0);
        joint.n_views = jj.value("n_views", 0);
        skel.joints.push_back(joint);
      }
      frame.people.push_back(std::move(skel));
    }
    file.frames.push_back(std::move(frame));
  }
  if (root.contains("stats") && root["stats"].contains("unmatched_fraction")) {
    file.unmatched_fraction = root["stats"]["unmatched_fraction"].get<double>();
  }
  return file;
}

void write_skeleton_file(const std::filesystem::path& path,
                         const SkeletonFile& file) {
  json root;
  root["schema_version"] = kSchemaVersion;
  json frames = json::array();
  for (const auto& frame : file.frames) {
    json jf;
    jf["frame_id"] = frame.frame_id;
    json people = json::array();
    for (const auto& skel : frame.people) {
      json jp;
      jp["person_id"] = skel.person_id;
      json joints = json::array();
      for (const auto& joint : skel.joints) {
        json jj;
        jj["xyz"] = {joint.position.x(), joint.position.y(),
                     joint.position.z()};
        jj["valid"] = joint.valid;
        // JSON has no inf; unreprojectable joints are invalid anyway.
        jj["reproj_rms"] =
            std::isfinite(joint.reproj_rms) ? joint.reproj_rms : -1.0;
        jj["n_views"] = joint.n_views;
        joints.push_back(std::move(jj));
      }
      jp["joints"] = std::move(joints);
      people.push_back(std::move(jp));
    }
    jf["people"] = std::move(people);
    frames.push_back(std::move(jf));
  }
  root["frames"] = std::move(frames);
  if (file.unmatched_fraction) {
    root["stats"]["unmatched_fraction"] = *file.unmatched_fraction;
  }
  save_json(path, root);
}

}  // namespace ergopipe::io
