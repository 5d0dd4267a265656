#include "ergopipe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "ergopipe/error.hpp"

namespace ergopipe::geom {

namespace {

// Radial-tangential model in normalized coordinates.
Eigen::Vector2d apply_distortion(const Eigen::Vector2d& n,
                                 const Eigen::Matrix<double, 5, 1>& d) {
  const double x = n.x();
  const double y = n.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + r2 * (d(0) + r2 * (d(1) + r2 * d(4)));
  const double xd = x * radial + 2.0 * d(2) * x * y + d(3) * (r2 + 2.0 * x * x);
  const double yd = y * radial + d(2) * (r2 + 2.0 * y * y) + 2.0 * d(3) * x * y;
  return {xd, yd};
}

Eigen::Vector2d pixel_of_normalized(const Eigen::Vector2d& n,
                                    const Eigen::Matrix3d& k) {
  return {k(0, 0) * n.x() + k(0, 1) * n.y() + k(0, 2),
          k(1, 1) * n.y() + k(1, 2)};
}

Eigen::Vector2d normalized_of_pixel(const Eigen::Vector2d& p,
                                    const Eigen::Matrix3d& k) {
  const double y = (p.y() - k(1, 2)) / k(1, 1);
  const double x = (p.x() - k(0, 2) - k(0, 1) * y) / k(0, 0);
  return {x, y};
}

}  // namespace

PixelPoint project(const Eigen::Vector3d& point, const CameraParams& cam) {
  const Eigen::Vector3d pc = cam.R * point + cam.t;
  if (pc.z() <= 0.0) {
    throw Error(ErrorCode::BehindCamera,
                "point has non-positive depth in camera " + cam.camera_id);
  }
  const Eigen::Vector2d n(pc.x() / pc.z(), pc.y() / pc.z());
  const Eigen::Vector2d px =
      pixel_of_normalized(apply_distortion(n, cam.dist), cam.K);
  return {px.x(), px.y(), pc.z()};
}

Eigen::Vector2d distort_to_pixel(const Eigen::Vector2d& normalized,
                                 const CameraParams& cam) {
  return pixel_of_normalized(apply_distortion(normalized, cam.dist), cam.K);
}

Eigen::Vector2d undistort_point(const Eigen::Vector2d& pixel,
                                const CameraParams& cam) {
  const Eigen::Vector2d distorted = normalized_of_pixel(pixel, cam.K);
  if (!cam.has_distortion()) {
    return distorted;
  }
  // Fixed-point iteration on x = (x_d - tangential(x)) / radial(x).
  Eigen::Vector2d n = distorted;
  for (int iter = 0; iter < 20; ++iter) {
    const double x = n.x();
    const double y = n.y();
    const double r2 = x * x + y * y;
    const double radial =
        1.0 + r2 * (cam.dist(0) + r2 * (cam.dist(1) + r2 * cam.dist(4)));
    const double tx = 2.0 * cam.dist(2) * x * y + cam.dist(3) * (r2 + 2.0 * x * x);
    const double ty = cam.dist(2) * (r2 + 2.0 * y * y) + 2.0 * cam.dist(3) * x * y;
    n.x() = (distorted.x() - tx) / radial;
    n.y() = (distorted.y() - ty) / radial;
  }
  const Eigen::Vector2d back = distort_to_pixel(n, cam);
  if ((back - pixel).norm() >= 1e-6) {
    throw Error(ErrorCode::NoConvergence,
                "undistortion did not converge for camera " + cam.camera_id);
  }
  return n;
}

Eigen::Vector2d ideal_pixel(const Eigen::Vector2d& pixel,
                            const CameraParams& cam) {
  if (!cam.has_distortion()) {
    return pixel;
  }
  return pixel_of_normalized(undistort_point(pixel, cam), cam.K);
}

FundamentalMatrix fundamental_from_cameras(const CameraParams& cam_a,
                                           const CameraParams& cam_b) {
  const Eigen::Vector3d baseline = cam_b.center() - cam_a.center();
  if (baseline.norm() < 1e-12) {
    throw Error(ErrorCode::CoincidentCenters,
                "cameras " + cam_a.camera_id + " and " + cam_b.camera_id +
                    " share a center");
  }
  const Eigen::Matrix3d r_rel = cam_b.R * cam_a.R.transpose();
  const Eigen::Vector3d t_rel = cam_b.t - r_rel * cam_a.t;
  Eigen::Matrix3d t_cross;
  t_cross << 0.0, -t_rel.z(), t_rel.y(),
             t_rel.z(), 0.0, -t_rel.x(),
             -t_rel.y(), t_rel.x(), 0.0;
  const Eigen::Matrix3d essential = t_cross * r_rel;
  Eigen::Matrix3d f = cam_b.K.transpose().inverse() * essential *
                      cam_a.K.inverse();
  // Unit Frobenius norm, sign fixed by the largest-magnitude entry.
  f /= f.norm();
  double pivot = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (std::abs(f(r, c)) > std::abs(pivot)) pivot = f(r, c);
  if (pivot < 0.0) f = -f;
  return {f, cam_a.camera_id, cam_b.camera_id};
}

double symmetric_epipolar_distance(const Eigen::Vector2d& point_a,
                                   const Eigen::Vector2d& point_b,
                                   const Eigen::Matrix3d& f) {
  const Eigen::Vector3d xa(point_a.x(), point_a.y(), 1.0);
  const Eigen::Vector3d xb(point_b.x(), point_b.y(), 1.0);
  const Eigen::Vector3d line_b = f * xa;       // epipolar line of a in image b
  const Eigen::Vector3d line_a = f.transpose() * xb;
  const double num = std::abs(xb.dot(line_b));
  const double norm_b = std::hypot(line_b.x(), line_b.y());
  const double norm_a = std::hypot(line_a.x(), line_a.y());
  if (norm_a < 1e-15 || norm_b < 1e-15) {
    return 0.0;  // point coincides with an epipole; no usable line
  }
  return 0.5 * (num / norm_b + num / norm_a);
}

std::optional<double> pose_affinity(const Pose2D& pose_a, const Pose2D& pose_b,
                                    const CameraParams& cam_a,
                                    const CameraParams& cam_b,
                                    const Eigen::Matrix3d& f, double c_min,
                                    int n_min) {
  const std::size_t k = std::min(pose_a.keypoints.size(),
                                 pose_b.keypoints.size());
  double weighted_sum = 0.0;
  double weight_total = 0.0;
  int shared = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& ka = pose_a.keypoints[i];
    const auto& kb = pose_b.keypoints[i];
    if (ka.conf < c_min || kb.conf < c_min) continue;
    const Eigen::Vector2d pa = ideal_pixel({ka.x, ka.y}, cam_a);
    const Eigen::Vector2d pb = ideal_pixel({kb.x, kb.y}, cam_b);
    const double w = std::min(ka.conf, kb.conf);
    weighted_sum += w * symmetric_epipolar_distance(pa, pb, f);
    weight_total += w;
    ++shared;
  }
  if (shared < n_min || weight_total <= 0.0) {
    return std::nullopt;
  }
  return weighted_sum / weight_total;
}

namespace {

struct PairCandidate {
  double affinity;
  int cam_a, idx_a;
  int cam_b, idx_b;
};

struct Cluster {
  std::map<std::string, int> members;  // camera_id -> detection index
  std::vector<double> link_affinities;
  bool alive = true;
};

}  // namespace

MatchResult match_across_views(
    const std::vector<std::vector<Pose2D>>& detections_per_camera,
    const std::vector<CameraParams>& cams, double tau_epi, double c_min,
    int n_min) {
  if (cams.size() < 2 || detections_per_camera.size() != cams.size()) {
    throw Error(ErrorCode::FewerThanTwoCameras,
                "matching needs detections for at least two cameras");
  }
  const int n_cams = static_cast<int>(cams.size());

  // Order camera columns by id so results do not depend on input order.
  std::vector<int> cam_order(n_cams);
  for (int i = 0; i < n_cams; ++i) cam_order[i] = i;
  std::sort(cam_order.begin(), cam_order.end(), [&](int a, int b) {
    return cams[a].camera_id < cams[b].camera_id;
  });

  std::vector<PairCandidate> candidates;
  for (int oa = 0; oa < n_cams; ++oa) {
    for (int ob = oa + 1; ob < n_cams; ++ob) {
      const int a = cam_order[oa];
      const int b = cam_order[ob];
      const FundamentalMatrix fab = fundamental_from_cameras(cams[a], cams[b]);
      for (std::size_t i = 0; i < detections_per_camera[a].size(); ++i) {
        for (std::size_t j = 0; j < detections_per_camera[b].size(); ++j) {
          const auto affinity = pose_affinity(
              detections_per_camera[a][i], detections_per_camera[b][j],
              cams[a], cams[b], fab.F, c_min, n_min);
          if (affinity && *affinity <= tau_epi) {
            candidates.push_back({*affinity, a, static_cast<int>(i), b,
                                  static_cast<int>(j)});
          }
        }
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](const PairCandidate& l, const PairCandidate& r) {
              if (l.affinity != r.affinity) return l.affinity < r.affinity;
              const auto key = [&](const PairCandidate& p) {
                return std::tie(cams[p.cam_a].camera_id, p.idx_a,
                                cams[p.cam_b].camera_id, p.idx_b);
              };
              return key(l) < key(r);
            });

  // Seed one cluster per detection, then merge greedily.
  std::vector<Cluster> clusters;
  std::map<std::pair<int, int>, int> cluster_of;  // (cam, idx) -> cluster
  int n_detections = 0;
  for (int c = 0; c < n_cams; ++c) {
    for (std::size_t i = 0; i < detections_per_camera[c].size(); ++i) {
      Cluster cl;
      cl.members[cams[c].camera_id] = static_cast<int>(i);
      cluster_of[{c, static_cast<int>(i)}] = static_cast<int>(clusters.size());
      clusters.push_back(std::move(cl));
      ++n_detections;
    }
  }

  const auto find_root = [&](int cam, int idx) {
    return cluster_of.at({cam, idx});
  };
  for (const auto& cand : candidates) {
    const int ca = find_root(cand.cam_a, cand.idx_a);
    const int cb = find_root(cand.cam_b, cand.idx_b);
    if (ca == cb) continue;
    // One detection per camera within a group.
    bool compatible = true;
    for (const auto& [cam_id, _] : clusters[cb].members) {
      if (clusters[ca].members.count(cam_id)) {
        compatible = false;
        break;
      }
    }
    if (!compatible) continue;
    for (const auto& [cam_id, idx] : clusters[cb].members) {
      clusters[ca].members[cam_id] = idx;
    }
    for (double aff : clusters[cb].link_affinities) {
      clusters[ca].link_affinities.push_back(aff);
    }
    clusters[ca].link_affinities.push_back(cand.affinity);
    clusters[cb].alive = false;
    // Repoint all members of cb.
    for (auto& [key, value] : cluster_of) {
      if (value == cb) value = ca;
    }
  }

  MatchResult result;
  result.n_detections = n_detections;
  for (const auto& cl : clusters) {
    if (!cl.alive) continue;
    MatchGroup group;
    group.members = cl.members;
    if (!cl.link_affinities.empty()) {
      double sum = 0.0;
      for (double a : cl.link_affinities) sum += a;
      group.mean_epi_dist = sum / static_cast<double>(cl.link_affinities.size());
    }
    if (group.size() < 2) ++result.n_unmatched;
    result.groups.push_back(std::move(group));
  }
  std::sort(result.groups.begin(), result.groups.end(),
            [](const MatchGroup& a, const MatchGroup& b) {
              return *a.members.begin() < *b.members.begin();
            });
  return result;
}

TriangulatedPoint triangulate_point(std::span<const Observation> observations,
                                    const std::vector<CameraParams>& cams,
                                    double c_min) {
  std::vector<const Observation*> used;
  for (const auto& obs : observations) {
    if (obs.conf >= c_min) used.push_back(&obs);
  }
  if (used.size() < 2) {
    throw Error(ErrorCode::InsufficientViews,
                "triangulation needs >= 2 confident observations, got " +
                    std::to_string(used.size()));
  }
  const int n = static_cast<int>(used.size());

  std::vector<Eigen::Vector2d> normalized(n);
  for (int i = 0; i < n; ++i) {
    normalized[i] =
        undistort_point(used[i]->pixel, cams[used[i]->camera_index]);
  }

  // Hartley conditioning over the per-view normalized points.
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : normalized) centroid += p;
  centroid /= n;
  double mean_dist = 0.0;
  for (const auto& p : normalized) mean_dist += (p - centroid).norm();
  mean_dist /= n;
  const double scale = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;
  Eigen::Matrix3d cond = Eigen::Matrix3d::Identity();
  cond(0, 0) = scale;
  cond(1, 1) = scale;
  cond(0, 2) = -scale * centroid.x();
  cond(1, 2) = -scale * centroid.y();

  Eigen::MatrixXd design(2 * n, 4);
  for (int i = 0; i < n; ++i) {
    const CameraParams& cam = cams[used[i]->camera_index];
    Eigen::Matrix<double, 3, 4> p;
    p.leftCols<3>() = cam.R;
    p.col(3) = cam.t;
    const Eigen::Matrix<double, 3, 4> pc = cond * p;
    const Eigen::Vector3d x = cond * Eigen::Vector3d(normalized[i].x(),
                                                     normalized[i].y(), 1.0);
    design.row(2 * i) = x.x() * pc.row(2) - pc.row(0);
    design.row(2 * i + 1) = x.y() * pc.row(2) - pc.row(1);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // Solution uniqueness: the null direction must be isolated, so compare
  // against the third singular value rather than the smallest.
  if (!(sv(2) > sv(0) / 1e12)) {
    throw Error(ErrorCode::DegenerateGeometry,
                "near-parallel rays: DLT system condition exceeds 1e12");
  }
  const Eigen::Vector4d h = svd.matrixV().col(3);
  if (std::abs(h(3)) < 1e-12 * h.head<3>().norm()) {
    throw Error(ErrorCode::DegenerateGeometry, "point at infinity");
  }

  TriangulatedPoint out;
  out.position = h.head<3>() / h(3);
  out.n_views = n;
  double sq_sum = 0.0;
  bool behind = false;
  for (int i = 0; i < n; ++i) {
    const CameraParams& cam = cams[used[i]->camera_index];
    try {
      const PixelPoint px = project(out.position, cam);
      const double dx = px.x - used[i]->pixel.x();
      const double dy = px.y - used[i]->pixel.y();
      sq_sum += dx * dx + dy * dy;
    } catch (const Error&) {
      behind = true;
    }
  }
  out.reproj_rms = behind ? std::numeric_limits<double>::infinity()
                          : std::sqrt(sq_sum / n);
  return out;
}

Skeleton3D triangulate_skeleton(
    const MatchGroup& group,
    const std::vector<std::vector<Pose2D>>& detections_per_camera,
    const std::vector<CameraParams>& cams, double tau_reproj, double c_min) {
  if (group.size() < 2) {
    throw Error(ErrorCode::GroupTooSmall,
                "group has " + std::to_string(group.size()) + " member(s)");
  }
  std::map<std::string, int> cam_index;
  for (std::size_t c = 0; c < cams.size(); ++c) {
    cam_index[cams[c].camera_id] = static_cast<int>(c);
  }

  std::size_t n_keypoints = 0;
  std::string frame_id;
  for (const auto& [cam_id, det_idx] : group.members) {
    const auto& pose = detections_per_camera[cam_index.at(cam_id)][det_idx];
    n_keypoints = std::max(n_keypoints, pose.keypoints.size());
    if (frame_id.empty()) frame_id = pose.frame_id;
  }

  Skeleton3D skel;
  skel.frame_id = frame_id;
  skel.joints.resize(n_keypoints);
  for (std::size_t k = 0; k < n_keypoints; ++k) {
    std::vector<Observation> obs;
    for (const auto& [cam_id, det_idx] : group.members) {
      const int ci = cam_index.at(cam_id);
      const auto& pose = detections_per_camera[ci][det_idx];
      if (k < pose.keypoints.size() && pose.keypoints[k].conf >= c_min) {
        obs.push_back({ci,
                       {pose.keypoints[k].x, pose.keypoints[k].y},
                       pose.keypoints[k].conf});
      }
    }
    Joint3D& joint = skel.joints[k];
    if (obs.size() < 2) {
      joint.n_views = static_cast<int>(obs.size());
      continue;
    }
    try {
      const TriangulatedPoint tp = triangulate_point(obs, cams, c_min);
      joint.position = tp.position;
      joint.reproj_rms = tp.reproj_rms;
      joint.n_views = tp.n_views;
      joint.valid = std::isfinite(tp.reproj_rms) &&
                    tp.reproj_rms <= tau_reproj && tp.position.allFinite();
    } catch (const Error&) {
      joint.n_views = static_cast<int>(obs.size());
      joint.valid = false;
    }
  }
  return skel;
}

}  // namespace ergopipe::geom
