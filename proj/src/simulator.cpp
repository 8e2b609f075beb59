#include "egoloc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "egoloc/errors.hpp"
#include "egoloc/parallel.hpp"

namespace egoloc {

namespace {

// Ground-truth joints are snapped to multiples of 2^-20 m so that frame
// differences and their running sums are exact in double precision.
constexpr double kLattice = 1048576.0;

double snap(double v) { return std::round(v * kLattice) / kLattice; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t clip_stream(std::uint64_t seed, int clip_id) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(clip_id) + 1));
}

struct PathPoint {
  Eigen::Vector2d position;
  double heading;
  double walked;  // arc length actually covered since frame 0
};

PathPoint locate_on_path(const PersonSpec& person, double distance) {
  const auto& w = person.waypoints;
  struct Segment {
    Eigen::Vector2d a, dir;
    double length;
  };
  std::vector<Segment> segments;
  const std::size_t count = person.loop ? w.size() : w.size() - 1;
  for (std::size_t i = 0; i < count && w.size() > 1; ++i) {
    const Eigen::Vector2d& a = w[i];
    const Eigen::Vector2d& b = w[(i + 1) % w.size()];
    const double len = (b - a).norm();
    if (len > 0.0) segments.push_back({a, (b - a) / len, len});
  }
  if (segments.empty()) return {w.front(), person.gait.facing, 0.0};

  double total = 0.0;
  for (const auto& s : segments) total += s.length;

  double s = person.path_offset + distance;
  double walked = distance;
  if (person.loop) {
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
  } else if (s >= total) {
    walked = std::max(0.0, total - person.path_offset);
    const Segment& last = segments.back();
    return {last.a + last.dir * last.length, std::atan2(last.dir.y(), last.dir.x()), walked};
  } else if (s < 0.0) {
    s = 0.0;
  }
  for (const auto& seg : segments) {
    if (s < seg.length) {
      return {seg.a + seg.dir * s, std::atan2(seg.dir.y(), seg.dir.x()), walked};
    }
    s -= seg.length;
  }
  const Segment& last = segments.back();
  return {last.a + last.dir * last.length, std::atan2(last.dir.y(), last.dir.x()), walked};
}

std::vector<PersonSpec> effective_persons(const Scenario& scenario) {
  std::vector<PersonSpec> persons = scenario.persons;
  std::sort(persons.begin(), persons.end(),
            [](const PersonSpec& a, const PersonSpec& b) { return a.id < b.id; });
  if (scenario.same_gait) {
    const GaitParams shared = scenario.wearer().gait;
    for (auto& p : persons) p.gait = shared;
  }
  return persons;
}

}  // namespace

void Scenario::validate() const {
  if (duration < static_cast<int>(kClipFrames)) {
    throw ValidationError("duration", "must be at least " + std::to_string(kClipFrames));
  }
  if (persons.empty()) throw ValidationError("persons", "at least one person required");
  int wearers = 0;
  std::set<PersonId> ids;
  for (const auto& p : persons) {
    if (!ids.insert(p.id).second) {
      throw ValidationError("persons.id", "duplicate id " + std::to_string(p.id));
    }
    if (p.is_wearer) ++wearers;
    if (p.waypoints.empty()) throw ValidationError("persons.waypoints", "empty path");
    for (const auto& w : p.waypoints) {
      if (!w.allFinite()) throw ValidationError("persons.waypoints", "non-finite waypoint");
    }
    const GaitParams& g = p.gait;
    if (!(g.speed >= 0.0) || !std::isfinite(g.speed)) {
      throw ValidationError("persons.gait.speed", "must be finite and >= 0");
    }
    if (!(g.stride_length > 0.0)) {
      throw ValidationError("persons.gait.stride_length", "must be > 0");
    }
    if (!(g.height > 0.0)) throw ValidationError("persons.gait.height", "must be > 0");
    if (!(g.shoulder_half_width > 0.0)) {
      throw ValidationError("persons.gait.shoulder_half_width", "must be > 0");
    }
    if (!std::isfinite(p.path_offset) || p.path_offset < 0.0) {
      throw ValidationError("persons.path_offset", "must be finite and >= 0");
    }
  }
  if (wearers != 1) throw ValidationError("persons.is_wearer", "exactly one wearer required");
  const auto nonneg = [](double v) { return v >= 0.0 && std::isfinite(v); };
  if (!nonneg(noise.pose)) throw ValidationError("noise.sigma_pose", "must be >= 0");
  if (!nonneg(noise.odo_trans)) throw ValidationError("noise.sigma_odo_trans", "must be >= 0");
  if (!nonneg(noise.odo_rot)) throw ValidationError("noise.sigma_odo_rot", "must be >= 0");
  if (!nonneg(noise.bbox)) throw ValidationError("noise.sigma_bbox", "must be >= 0");
  if (!nonneg(noise.occlusion)) throw ValidationError("noise.sigma_occlusion", "must be >= 0");
  for (const auto& c : crossings) {
    if (!ids.count(c.a) || !ids.count(c.b) || c.a == c.b) {
      throw ValidationError("crossings", "must name two distinct existing persons");
    }
    if (c.start < 0 || c.end < c.start || c.end > duration) {
      throw ValidationError("crossings", "interval outside [0, duration]");
    }
  }
  if (std::abs(ego_time_offset) > duration - static_cast<int>(kClipFrames)) {
    throw ValidationError("ego_time_offset", "leaves no complete clip");
  }
}

const PersonSpec& Scenario::wearer() const {
  for (const auto& p : persons) {
    if (p.is_wearer) return p;
  }
  throw ValidationError("persons.is_wearer", "no wearer");
}

Scenario Scenario::with_noise(const NoiseConfig& n) const {
  Scenario s = *this;
  s.noise = n;
  return s;
}

Joint19Pose gait_pose(const GaitParams& g, const Eigen::Vector2d& position, double heading,
                      double phase) {
  const double h = g.height;
  const double sw = g.shoulder_half_width;
  const double hip = 0.5 * sw;
  const double s = std::sin(phase);
  const double bob = g.bob * std::cos(2.0 * phase);
  // Neck sits ahead of the shoulder line so the shoulder/neck normal has a
  // positive vertical component; shoulders are set back so the torso
  // centroid lies on the body axis.
  const double lean = 0.04;

  // Body coordinates: (right, forward, up).
  const std::array<Eigen::Vector3d, kJointCount> local = {{
      {hip, g.leg_swing * s, 0.08 * h},                     // right ankle
      {hip, 0.5 * g.leg_swing * s, 0.50 * h + bob},         // right knee
      {hip, 0.0, 0.95 * h + bob},                           // right hip
      {-hip, 0.0, 0.95 * h + bob},                          // left hip
      {-hip, -0.5 * g.leg_swing * s, 0.50 * h + bob},       // left knee
      {-hip, -g.leg_swing * s, 0.08 * h},                   // left ankle
      {sw + 0.04, -g.arm_swing * s, 0.92 * h + bob},        // right wrist
      {sw + 0.02, -0.5 * g.arm_swing * s, 1.18 * h + bob},  // right elbow
      {sw, -lean, 1.45 * h + bob},                          // right shoulder
      {-sw, -lean, 1.45 * h + bob},                         // left shoulder
      {-sw - 0.02, 0.5 * g.arm_swing * s, 1.18 * h + bob},  // left elbow
      {-sw - 0.04, g.arm_swing * s, 0.92 * h + bob},        // left wrist
      {0.0, 2.0 * lean, 1.50 * h + bob},                    // neck
      {0.0, 0.0, 1.75 * h + bob},                           // head top
      {0.0, 0.10, 1.64 * h + bob},                          // nose
      {-0.03, 0.08, 1.67 * h + bob},                        // left eye
      {0.03, 0.08, 1.67 * h + bob},                         // right eye
      {-0.07, 0.0, 1.65 * h + bob},                         // left ear
      {0.07, 0.0, 1.65 * h + bob},                          // right ear
  }};

  const Eigen::Vector3d forward(std::cos(heading), std::sin(heading), 0.0);
  const Eigen::Vector3d right(std::sin(heading), -std::cos(heading), 0.0);
  const Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d origin(position.x(), position.y(), 0.0);

  std::array<Eigen::Vector3d, kJointCount> world;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const Eigen::Vector3d p =
        origin + local[i].x() * right + local[i].y() * forward + local[i].z() * up;
    world[i] = p.unaryExpr(&snap);
  }
  return Joint19Pose(world);
}

std::vector<Joint19Pose> simulate_person_frames(const PersonSpec& person, int duration) {
  std::vector<Joint19Pose> frames;
  frames.reserve(static_cast<std::size_t>(duration));
  for (int f = 0; f < duration; ++f) {
    const PathPoint at = locate_on_path(person, person.gait.speed * f);
    const double phase =
        person.gait.phase + 2.0 * std::numbers::pi * at.walked / person.gait.stride_length;
    frames.push_back(gait_pose(person.gait, at.position, at.heading, phase));
  }
  return frames;
}

BoundingBox bounding_box_from_pose(const Joint19Pose& pose, double padding) {
  const Eigen::Vector2d c = torso_center_2d(pose);
  Eigen::Vector2d half = Eigen::Vector2d::Zero();
  for (const auto& j : pose.joints()) {
    half = half.cwiseMax((j.head<2>() - c).cwiseAbs());
  }
  half.array() += padding;
  return {c.x() - half.x(), c.y() - half.y(), c.x() + half.x(), c.y() + half.y()};
}

EgoTruth ego_deltas_from_truth(std::span<const Joint19Pose> frames) {
  if (frames.size() != kClipFrames) {
    throw InvalidArgument("ego_deltas_from_truth: expected " + std::to_string(kClipFrames) +
                          " frames");
  }
  EgoTruth out;
  std::array<SE3Transform, kClipFrames> body;
  for (std::size_t k = 0; k < kClipFrames; ++k) body[k] = body_frame(frames[k]);
  out.motion.t_init = body[0];
  for (std::size_t k = 0; k < kClipDeltas; ++k) {
    out.pose_deltas[k] = PoseDelta::between(frames[k], frames[k + 1]);
    const SE3Transform step = se3_compose(body[k].inverse(), body[k + 1]);
    out.motion.deltas[k] = {rotation_log(step.rotation), step.translation};
  }
  return out;
}

std::vector<std::vector<bool>> occlusion_flags(const Scenario& scenario) {
  const auto persons = effective_persons(scenario);
  std::vector<std::vector<bool>> flags(persons.size(),
                                       std::vector<bool>(scenario.duration, false));
  for (std::size_t i = 0; i < persons.size(); ++i) {
    for (const auto& c : scenario.crossings) {
      if (c.a != persons[i].id && c.b != persons[i].id) continue;
      for (int f = std::max(0, c.start); f < std::min(scenario.duration, c.end); ++f) {
        flags[i][f] = true;
      }
    }
  }
  return flags;
}

std::vector<CrossingInterval> detect_crossings(const Scenario& scenario, double radius) {
  const auto persons = effective_persons(scenario);
  std::vector<std::vector<Eigen::Vector2d>> centers;
  for (const auto& p : persons) {
    std::vector<Eigen::Vector2d> c;
    for (const auto& pose : simulate_person_frames(p, scenario.duration)) {
      c.push_back(torso_center_2d(pose));
    }
    centers.push_back(std::move(c));
  }
  std::vector<CrossingInterval> out;
  for (std::size_t i = 0; i < persons.size(); ++i) {
    for (std::size_t j = i + 1; j < persons.size(); ++j) {
      int start = -1;
      for (int f = 0; f <= scenario.duration; ++f) {
        const bool close =
            f < scenario.duration && (centers[i][f] - centers[j][f]).norm() < radius;
        if (close && start < 0) start = f;
        if (!close && start >= 0) {
          out.push_back({persons[i].id, persons[j].id, start, f});
          start = -1;
        }
      }
    }
  }
  return out;
}

Scene generate_scene(const Scenario& scenario, unsigned threads) {
  scenario.validate();
  const auto persons = effective_persons(scenario);
  std::vector<std::vector<Joint19Pose>> frames;
  frames.reserve(persons.size());
  for (const auto& p : persons) frames.push_back(simulate_person_frames(p, scenario.duration));
  const auto flags = occlusion_flags(scenario);

  std::size_t wearer = 0;
  while (!persons[wearer].is_wearer) ++wearer;

  std::vector<int> starts;
  const int last_start = scenario.duration - static_cast<int>(kClipFrames);
  for (int f = 0; f <= last_start; ++f) {
    const int ego_start = f + scenario.ego_time_offset;
    if (ego_start >= 0 && ego_start <= last_start) starts.push_back(f);
  }

  const NoiseConfig& noise = scenario.noise;
  Scene scene{scenario, std::vector<ClipObservation>(starts.size())};

  parallel_for(starts.size(), threads, [&](std::size_t c) {
    const int clip_id = static_cast<int>(c);
    const int f0 = starts[c];
    std::mt19937_64 rng(clip_stream(scenario.seed, clip_id));
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto jitter = [&](double sigma) { return sigma * normal(rng); };
    const auto jitter3 = [&](double sigma) {
      const double x = jitter(sigma);
      const double y = jitter(sigma);
      const double z = jitter(sigma);
      return Eigen::Vector3d(x, y, z);
    };

    ClipObservation& clip = scene.clips[c];
    clip.clip_id = clip_id;
    clip.start_frame = f0;
    clip.ground_truth_wearer = persons[wearer].id;

    const std::span<const Joint19Pose> ego_frames(
        frames[wearer].data() + f0 + scenario.ego_time_offset, kClipFrames);
    const EgoTruth truth = ego_deltas_from_truth(ego_frames);
    for (std::size_t k = 0; k < kClipDeltas; ++k) {
      std::array<Eigen::Vector3d, kJointCount> d = truth.pose_deltas[k].deltas();
      for (auto& v : d) v += jitter3(noise.pose);
      clip.ego.pose_deltas[k] = PoseDelta(d);
    }
    clip.ego.motion.t_init = truth.motion.t_init;
    for (std::size_t k = 0; k < kClipDeltas; ++k) {
      EgoMotionDelta d = truth.motion.deltas[k];
      d.rotation.delta_theta += jitter3(noise.odo_rot);
      d.translation += jitter3(noise.odo_trans);
      clip.ego.motion.deltas[k] = d;
    }

    clip.candidates.reserve(persons.size());
    for (std::size_t p = 0; p < persons.size(); ++p) {
      CandidateObservation cand;
      cand.person_id = persons[p].id;
      std::vector<Joint19Pose> poses;
      poses.reserve(kClipFrames);
      for (std::size_t k = 0; k < kClipFrames; ++k) {
        const int f = f0 + static_cast<int>(k);
        const bool occluded = flags[p][f];
        cand.valid[k] = !occluded;
        std::array<Eigen::Vector3d, kJointCount> j = frames[p][f].joints();
        for (auto& v : j) {
          v += jitter3(noise.pose);
          const Eigen::Vector3d extra = jitter3(noise.occlusion);
          if (occluded) v += extra;
        }
        poses.emplace_back(j);

        const BoundingBox truth_box = bounding_box_from_pose(frames[p][f]);
        const double lx = truth_box.left_top.x() + jitter(noise.bbox);
        const double ly = truth_box.left_top.y() + jitter(noise.bbox);
        const double rx = truth_box.right_bottom.x() + jitter(noise.bbox);
        const double ry = truth_box.right_bottom.y() + jitter(noise.bbox);
        cand.boxes[k] = BoundingBox(std::min(lx, rx), std::min(ly, ry), std::max(lx, rx),
                                    std::max(ly, ry));
      }
      cand.poses = PoseSequence(std::move(poses));
      clip.candidates.push_back(std::move(cand));
    }
  });
  return scene;
}

std::vector<std::string> preset_names() {
  return {"single-static",
          "two-person-no-crossing",
          "two-person-crossing",
          "three-person-no-crossing",
          "three-person-crossing",
          "group-crossing",
          "same-dressing-two-person-no-crossing",
          "same-dressing-three-person-crossing"};
}

namespace {

constexpr double kOcclusionRadius = 0.7;

GaitParams random_gait(std::mt19937_64& rng, double speed) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  GaitParams g;
  g.speed = speed;
  g.stride_length = in(1.0, 1.4);
  g.arm_swing = in(0.08, 0.25);
  g.leg_swing = in(0.12, 0.28);
  g.bob = in(0.01, 0.03);
  g.height = in(0.9, 1.1);
  g.shoulder_half_width = in(0.17, 0.23);
  g.phase = in(0.0, 2.0 * std::numbers::pi);
  return g;
}

// Distinct walking speeds, at least ~3 cm/frame apart.
std::vector<double> distinct_speeds(std::mt19937_64& rng, int n) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_real_distribution<double> u(-0.004, 0.004);
  std::vector<double> speeds(n);
  for (int i = 0; i < n; ++i) speeds[i] = 0.06 + 0.035 * order[i] + u(rng);
  return speeds;
}

std::vector<PersonSpec> separate_loops(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto speeds = distinct_speeds(rng, n);
  std::vector<PersonSpec> persons;
  for (int i = 0; i < n; ++i) {
    PersonSpec p;
    p.id = i;
    p.gait = random_gait(rng, speeds[i]);
    const Eigen::Vector2d center(6.0 * i, 0.0);
    const double hx = 1.5 + 0.3 * u(rng);
    const double hy = 1.0 + 0.3 * u(rng);
    const double angle = 0.5 * std::numbers::pi * u(rng);
    const Eigen::Matrix2d rot =
        (Eigen::Matrix2d() << std::cos(angle), -std::sin(angle), std::sin(angle),
         std::cos(angle))
            .finished();
    for (const auto& corner : {Eigen::Vector2d(-hx, -hy), Eigen::Vector2d(hx, -hy),
                               Eigen::Vector2d(hx, hy), Eigen::Vector2d(-hx, hy)}) {
      p.waypoints.push_back(center + rot * corner);
    }
    p.loop = true;
    p.path_offset = 4.0 * (hx + hy) * u(rng);
    persons.push_back(std::move(p));
  }
  return persons;
}

// Back-and-forth walks through a shared center with a common period, so all
// walkers pass the center together every half period.
std::vector<PersonSpec> crossing_lines(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto speeds = distinct_speeds(rng, n);
  const double period = 70.0 + 20.0 * u(rng);
  const double base_angle = std::numbers::pi * u(rng);
  std::vector<PersonSpec> persons;
  for (int i = 0; i < n; ++i) {
    PersonSpec p;
    p.id = i;
    p.gait = random_gait(rng, speeds[i]);
    const double angle = base_angle + std::numbers::pi * i / n;
    const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
    const double half_length = 0.25 * speeds[i] * period;
    p.waypoints = {-half_length * dir, half_length * dir};
    p.loop = true;
    persons.push_back(std::move(p));
  }
  return persons;
}

}  // namespace

Scenario make_preset(const std::string& name, std::uint64_t seed, int duration,
                     const NoiseConfig& noise) {
  std::mt19937_64 rng(splitmix64(seed ^ 0x5EED5EEDull));
  Scenario s;
  s.seed = seed;
  s.duration = duration;
  s.noise = noise;

  if (name == "single-static") {
    PersonSpec p;
    p.id = 0;
    p.waypoints = {Eigen::Vector2d::Zero()};
    p.gait = random_gait(rng, 0.0);
    s.persons = {p};
  } else if (name == "two-person-no-crossing" || name == "same-dressing-two-person-no-crossing") {
    s.persons = separate_loops(rng, 2);
  } else if (name == "three-person-no-crossing") {
    s.persons = separate_loops(rng, 3);
  } else if (name == "two-person-crossing") {
    s.persons = crossing_lines(rng, 2);
  } else if (name == "three-person-crossing" || name == "same-dressing-three-person-crossing") {
    s.persons = crossing_lines(rng, 3);
  } else if (name == "group-crossing") {
    s.persons = crossing_lines(rng, 6);
  } else {
    throw ValidationError("preset", "unknown preset '" + name + "'");
  }
  s.same_gait = name.starts_with("same-dressing");

  std::uniform_int_distribution<std::size_t> pick(0, s.persons.size() - 1);
  s.persons[pick(rng)].is_wearer = true;
  if (s.same_gait) {
    // Same walking style includes a shared path length for the crossing walks.
    const GaitParams shared = s.wearer().gait;
    const double half = s.wearer().waypoints.size() > 1
                            ? 0.5 * (s.wearer().waypoints[1] - s.wearer().waypoints[0]).norm()
                            : 0.0;
    for (auto& p : s.persons) {
      p.gait = shared;
      if (name.find("crossing") != std::string::npos && p.waypoints.size() == 2) {
        const Eigen::Vector2d dir = (p.waypoints[1] - p.waypoints[0]).normalized();
        p.waypoints = {-half * dir, half * dir};
      }
    }
  }
  s.crossings = detect_crossings(s, kOcclusionRadius);
  s.validate();
  return s;
}

}  // namespace egoloc
