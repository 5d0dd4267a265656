#include "ergopipe/gap/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "ergopipe/gap/rng.hpp"

namespace ergopipe::gap {

namespace {

struct Vec2 {
  double x, y;
};

double segment_distance(double px, double py, Vec2 a, Vec2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((px - a.x) * vx + (py - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (a.x + t * vx);
  const double dy = py - (a.y + t * vy);
  return std::hypot(dx, dy);
}

struct IdentityStyle {
  double background;
  double tone_a;
  double tone_b;
  int corner;       // 0..3
  int orientation;  // 0 horizontal, 1 vertical, 2 diagonal
  int period;
};

IdentityStyle identity_style(int identity_id) {
  Rng rng = rng_for(0x1D1D1D1DULL, static_cast<std::uint64_t>(identity_id));
  IdentityStyle s;
  s.background = 0.08 + 0.22 * rng.uniform();
  s.tone_a = 0.70 + 0.28 * rng.uniform();
  s.tone_b = 0.02 + 0.18 * rng.uniform();
  s.corner = rng.uniform_int(4);
  s.orientation = rng.uniform_int(3);
  s.period = 2 + rng.uniform_int(2);
  return s;
}

constexpr int kPatchSize = 12;
constexpr double kFigureTone = 0.95;
constexpr double kHeadRadius = 2.2;

}  // namespace

std::vector<SyntheticScene> generate_dataset(int n, int n_identities,
                                             std::uint64_t seed) {
  std::vector<SyntheticScene> scenes;
  scenes.reserve(std::max(n, 0));
  for (int index = 0; index < n; ++index) {
    Rng rng = rng_for(seed, static_cast<std::uint64_t>(index));
    SyntheticScene scene;
    scene.identity_id = n_identities > 0 ? index % n_identities : 0;
    const IdentityStyle style = identity_style(scene.identity_id);

    // Pose in pixel coordinates; +y is down.
    const double hip_x = 24.0 + rng.uniform(-3.0, 3.0);
    const double hip_y = 29.0 + rng.uniform(-2.0, 2.0);
    const double hip_hw = 3.2 + rng.uniform(-0.4, 0.4);
    const double torso_len = 11.5 + rng.uniform(-1.2, 1.2);
    const double torso_angle = rng.uniform(-0.45, 0.45);  // radians off vertical
    const double shoulder_hw = 3.8 + rng.uniform(-0.4, 0.4);

    const Vec2 mid_hip{hip_x, hip_y};
    const Vec2 torso_dir{std::sin(torso_angle), -std::cos(torso_angle)};
    const Vec2 mid_shoulder{mid_hip.x + torso_len * torso_dir.x,
                            mid_hip.y + torso_len * torso_dir.y};
    const double head_angle = torso_angle + rng.uniform(-0.25, 0.25);
    const double head_off = 4.8 + rng.uniform(-0.4, 0.4);
    const Vec2 head{mid_shoulder.x + head_off * std::sin(head_angle),
                    mid_shoulder.y - head_off * std::cos(head_angle)};

    std::array<Vec2, kSceneKeypoints> joints{};
    joints[kHead] = head;
    joints[kShoulderL] = {mid_shoulder.x - shoulder_hw, mid_shoulder.y};
    joints[kShoulderR] = {mid_shoulder.x + shoulder_hw, mid_shoulder.y};
    joints[kHipL] = {mid_hip.x - hip_hw, mid_hip.y};
    joints[kHipR] = {mid_hip.x + hip_hw, mid_hip.y};

    const auto place_limb = [&](Vec2 root, double upper_len, double lower_len,
                                double root_angle, double bend, Vec2* mid,
                                Vec2* end) {
      // Angles measured from straight down.
      mid->x = root.x + upper_len * std::sin(root_angle);
      mid->y = root.y + upper_len * std::cos(root_angle);
      const double lower_angle = root_angle + bend;
      end->x = mid->x + lower_len * std::sin(lower_angle);
      end->y = mid->y + lower_len * std::cos(lower_angle);
    };

    for (int side = 0; side < 2; ++side) {
      const int shoulder = side == 0 ? kShoulderL : kShoulderR;
      const int elbow = side == 0 ? kElbowL : kElbowR;
      const int wrist = side == 0 ? kWristL : kWristR;
      const double arm_angle = rng.uniform(-1.2, 1.2);
      const double elbow_bend = rng.uniform(-1.8, 1.8);
      place_limb(joints[shoulder], 5.8 + rng.uniform(-0.6, 0.6),
                 5.2 + rng.uniform(-0.6, 0.6), arm_angle, elbow_bend,
                 &joints[elbow], &joints[wrist]);

      const int hip = side == 0 ? kHipL : kHipR;
      const int knee = side == 0 ? kKneeL : kKneeR;
      const int ankle = side == 0 ? kAnkleL : kAnkleR;
      const double leg_angle = rng.uniform(-0.35, 0.35);
      const double knee_bend = rng.uniform(-0.9, 0.9);
      place_limb(joints[hip], 7.0 + rng.uniform(-0.7, 0.7),
                 6.3 + rng.uniform(-0.7, 0.7), leg_angle, knee_bend,
                 &joints[knee], &joints[ankle]);
    }
    for (Vec2& j : joints) {
      j.x = std::clamp(j.x, 2.0, kSceneSize - 3.0);
      j.y = std::clamp(j.y, 2.0, kSceneSize - 3.0);
    }

    const std::array<std::pair<int, int>, 11> bones = {{
        {kShoulderL, kShoulderR},
        {kHipL, kHipR},
        {kShoulderL, kElbowL},
        {kElbowL, kWristL},
        {kShoulderR, kElbowR},
        {kElbowR, kWristR},
        {kHipL, kKneeL},
        {kKneeL, kAnkleL},
        {kHipR, kKneeR},
        {kKneeR, kAnkleR},
        {-1, -1},  // torso drawn explicitly below
    }};
    const Vec2 torso_a = {0.5 * (joints[kShoulderL].x + joints[kShoulderR].x),
                          0.5 * (joints[kShoulderL].y + joints[kShoulderR].y)};
    const Vec2 torso_b = {0.5 * (joints[kHipL].x + joints[kHipR].x),
                          0.5 * (joints[kHipL].y + joints[kHipR].y)};
    const Vec2 neck_b = joints[kHead];

    scene.image = ImageBuffer::make(kSceneSize, kSceneSize, 1);
    const int corner_x = (style.corner % 2) ? kSceneSize - kPatchSize - 2 : 2;
    const int corner_y = (style.corner / 2) ? kSceneSize - kPatchSize - 2 : 2;
    scene.patch = {corner_x, corner_y, kPatchSize, kPatchSize};

    for (int y = 0; y < kSceneSize; ++y) {
      for (int x = 0; x < kSceneSize; ++x) {
        double value = style.background;
        // Identity patch: striped texture keyed to the identity.
        if (x >= corner_x && x < corner_x + kPatchSize && y >= corner_y &&
            y < corner_y + kPatchSize) {
          int phase = 0;
          if (style.orientation == 0) phase = y / style.period;
          else if (style.orientation == 1) phase = x / style.period;
          else phase = (x + y) / style.period;
          value = (phase % 2 == 0) ? style.tone_a : style.tone_b;
        }
        double dist = segment_distance(x, y, torso_a, torso_b);
        dist = std::min(dist, segment_distance(x, y, torso_a, neck_b));
        for (const auto& [a, b] : bones) {
          if (a < 0) continue;
          dist = std::min(dist, segment_distance(x, y, joints[a], joints[b]));
        }
        const double line = std::clamp(1.3 - dist, 0.0, 1.0);
        const double head_d = std::hypot(x - head.x, y - head.y);
        const double disc = std::clamp(kHeadRadius + 0.5 - head_d, 0.0, 1.0);
        const double figure = std::max(line, disc);
        value += (kFigureTone - value) * figure;
        scene.image.at(x, y, 0) = static_cast<std::uint8_t>(
            std::clamp(std::round(value * 255.0), 0.0, 255.0));
      }
    }
    for (int k = 0; k < kSceneKeypoints; ++k) {
      scene.keypoints[k] = {(joints[k].x + 0.5) / kSceneSize,
                            (joints[k].y + 0.5) / kSceneSize};
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace ergopipe::gap
