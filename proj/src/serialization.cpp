#include "egoloc/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "egoloc/errors.hpp"

namespace egoloc {

namespace fs = std::filesystem;

namespace {

Json vec_json(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }
Json vec_json(const Eigen::Vector2d& v) { return Json::array({v.x(), v.y()}); }

Eigen::Vector3d vec3(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("vector", "expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Eigen::Vector2d vec2(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("vector", "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json pose_json(const Joint19Pose& pose) {
  Json out = Json::array();
  for (const auto& joint : pose.joints()) out.push_back(vec_json(joint));
  return out;
}

std::array<Eigen::Vector3d, kJointCount> joints_from(const Json& j, const char* field) {
  if (!j.is_array() || j.size() != kJointCount) {
    throw ValidationError(field, "expected 19 [x, y, z] triples");
  }
  std::array<Eigen::Vector3d, kJointCount> out;
  for (std::size_t i = 0; i < kJointCount; ++i) out[i] = vec3(j[i]);
  return out;
}

Json se3_json(const SE3Transform& t) {
  const auto& q = t.rotation;
  return {{"rotation", Json::array({q.w(), q.x(), q.y(), q.z()})},
          {"translation", vec_json(t.translation)}};
}

SE3Transform se3_from(const Json& j) {
  const Json& q = j.at("rotation");
  if (!q.is_array() || q.size() != 4) {
    throw ValidationError("t_init.rotation", "expected [w, x, y, z]");
  }
  return {UnitQuaternion(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                         q[3].get<double>()),
          vec3(j.at("translation"))};
}

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw ValidationError(what, e.what());
  } catch (const InvalidArgument& e) {
    throw ValidationError(what, e.what());
  }
}

void check_schema(const Json& j, const char* what) {
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion) {
    throw ValidationError(std::string(what) + ".schema_version",
                          "unsupported version " + j.at("schema_version").dump());
  }
}

Json noise_json(const NoiseConfig& n) {
  return {{"sigma_pose", n.pose},
          {"sigma_odo_trans", n.odo_trans},
          {"sigma_odo_rot", n.odo_rot},
          {"sigma_bbox", n.bbox},
          {"sigma_occlusion", n.occlusion}};
}

NoiseConfig noise_from(const Json& j) {
  NoiseConfig n;
  n.pose = j.value("sigma_pose", 0.0);
  n.odo_trans = j.value("sigma_odo_trans", 0.0);
  n.odo_rot = j.value("sigma_odo_rot", 0.0);
  n.bbox = j.value("sigma_bbox", 0.0);
  n.occlusion = j.value("sigma_occlusion", 0.0);
  return n;
}

Json gait_json(const GaitParams& g) {
  return {{"speed", g.speed},
          {"stride_length", g.stride_length},
          {"arm_swing", g.arm_swing},
          {"leg_swing", g.leg_swing},
          {"bob", g.bob},
          {"height", g.height},
          {"shoulder_half_width", g.shoulder_half_width},
          {"phase", g.phase},
          {"facing", g.facing}};
}

GaitParams gait_from(const Json& j) {
  GaitParams g;
  g.speed = j.value("speed", g.speed);
  g.stride_length = j.value("stride_length", g.stride_length);
  g.arm_swing = j.value("arm_swing", g.arm_swing);
  g.leg_swing = j.value("leg_swing", g.leg_swing);
  g.bob = j.value("bob", g.bob);
  g.height = j.value("height", g.height);
  g.shoulder_half_width = j.value("shoulder_half_width", g.shoulder_half_width);
  g.phase = j.value("phase", g.phase);
  g.facing = j.value("facing", g.facing);
  return g;
}

std::string clip_file_name(int clip_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "clip_%05d.json", clip_id);
  return buf;
}

}  // namespace

Json pose_sequence_to_json(const PoseSequence& seq) {
  Json out = Json::array();
  for (const auto& pose : seq.poses()) out.push_back(pose_json(pose));
  return out;
}

PoseSequence pose_sequence_from_json(const Json& j) {
  return guarded("poses", [&] {
    if (!j.is_array()) throw ValidationError("poses", "expected an array of frames");
    std::vector<Joint19Pose> poses;
    for (const auto& frame : j) poses.emplace_back(joints_from(frame, "poses"));
    return PoseSequence(std::move(poses), poses.size() != kClipFrames);
  });
}

Json codebook_to_json(const ActionCodebook& codebook) {
  Json rows = Json::array();
  for (int c = 0; c < codebook.k(); ++c) {
    Json row = Json::array();
    for (int r = 0; r < codebook.dim(); ++r) row.push_back(codebook.centroids()(r, c));
    rows.push_back(std::move(row));
  }
  return {{"schema_version", kSchemaVersion},
          {"k", codebook.k()},
          {"dim", codebook.dim()},
          {"seed", codebook.seed()},
          {"centroids", std::move(rows)}};
}

ActionCodebook codebook_from_json(const Json& j) {
  return guarded("codebook", [&] {
    check_schema(j, "codebook");
    const int k = j.at("k").get<int>();
    const int dim = j.at("dim").get<int>();
    const Json& rows = j.at("centroids");
    if (k < 1 || dim < 1) throw ValidationError("codebook.k", "k and dim must be >= 1");
    if (!rows.is_array() || static_cast<int>(rows.size()) != k) {
      throw ValidationError("codebook.centroids", "expected k rows");
    }
    Eigen::MatrixXd centroids(dim, k);
    for (int c = 0; c < k; ++c) {
      if (!rows[c].is_array() || static_cast<int>(rows[c].size()) != dim) {
        throw ValidationError("codebook.centroids", "row " + std::to_string(c) + " width != dim");
      }
      for (int r = 0; r < dim; ++r) centroids(r, c) = rows[c][r].get<double>();
    }
    return ActionCodebook(std::move(centroids), j.at("seed").get<std::uint64_t>());
  });
}

void save_codebook(const ActionCodebook& codebook, const fs::path& path) {
  write_text_file(path, codebook_to_json(codebook).dump() + "\n");
}

ActionCodebook load_codebook(const fs::path& path) {
  return codebook_from_json(read_json_file(path));
}

Json scenario_to_json(const Scenario& s) {
  Json persons = Json::array();
  for (const auto& p : s.persons) {
    Json waypoints = Json::array();
    for (const auto& w : p.waypoints) waypoints.push_back(vec_json(w));
    persons.push_back({{"id", p.id},
                       {"is_wearer", p.is_wearer},
                       {"waypoints", std::move(waypoints)},
                       {"loop", p.loop},
                       {"path_offset", p.path_offset},
                       {"gait", gait_json(p.gait)}});
  }
  Json crossings = Json::array();
  for (const auto& c : s.crossings) {
    crossings.push_back({{"a", c.a}, {"b", c.b}, {"start", c.start}, {"end", c.end}});
  }
  return {{"schema_version", kSchemaVersion},
          {"seed", s.seed},
          {"duration", s.duration},
          {"ego_time_offset", s.ego_time_offset},
          {"same_gait", s.same_gait},
          {"noise", noise_json(s.noise)},
          {"persons", std::move(persons)},
          {"crossings", std::move(crossings)}};
}

Scenario scenario_from_json(const Json& j) {
  Scenario s = guarded("scenario", [&] {
    if (!j.is_object()) throw ValidationError("scenario", "expected an object");
    check_schema(j, "scenario");
    const NoiseConfig noise = j.contains("noise") ? noise_from(j.at("noise")) : NoiseConfig{};
    if (j.contains("preset")) {
      Scenario p = make_preset(j.at("preset").get<std::string>(), j.value("seed", 0ull),
                               j.value("duration", 207), noise);
      p.ego_time_offset = j.value("ego_time_offset", 0);
      return p;
    }
    Scenario out;
    out.seed = j.at("seed").get<std::uint64_t>();
    out.duration = j.at("duration").get<int>();
    out.ego_time_offset = j.value("ego_time_offset", 0);
    out.same_gait = j.value("same_gait", false);
    out.noise = noise;
    for (const auto& pj : j.at("persons")) {
      PersonSpec p;
      p.id = pj.at("id").get<int>();
      p.is_wearer = pj.value("is_wearer", false);
      for (const auto& w : pj.at("waypoints")) p.waypoints.push_back(vec2(w));
      p.loop = pj.value("loop", false);
      p.path_offset = pj.value("path_offset", 0.0);
      if (pj.contains("gait")) p.gait = gait_from(pj.at("gait"));
      out.persons.push_back(std::move(p));
    }
    if (j.contains("crossings")) {
      for (const auto& cj : j.at("crossings")) {
        out.crossings.push_back({cj.at("a").get<int>(), cj.at("b").get<int>(),
                                 cj.at("start").get<int>(), cj.at("end").get<int>()});
      }
    }
    return out;
  });
  s.validate();
  return s;
}

Scenario load_scenario(const fs::path& path) { return scenario_from_json(read_json_file(path)); }

void save_scenario(const Scenario& scenario, const fs::path& path) {
  write_text_file(path, scenario_to_json(scenario).dump(2) + "\n");
}

Json clip_to_json(const ClipObservation& clip) {
  Json deltas = Json::array();
  for (const auto& d : clip.ego.pose_deltas) {
    Json joints = Json::array();
    for (const auto& v : d.deltas()) joints.push_back(vec_json(v));
    deltas.push_back(std::move(joints));
  }
  Json motion_deltas = Json::array();
  for (const auto& d : clip.ego.motion.deltas) {
    motion_deltas.push_back(
        {{"rotation", vec_json(d.rotation.delta_theta)}, {"translation", vec_json(d.translation)}});
  }
  Json candidates = Json::array();
  for (const auto& c : clip.candidates) {
    Json boxes = Json::array();
    for (const auto& b : c.boxes) {
      boxes.push_back(
          Json::array({b.left_top.x(), b.left_top.y(), b.right_bottom.x(), b.right_bottom.y()}));
    }
    candidates.push_back({{"person_id", c.person_id},
                          {"poses", pose_sequence_to_json(c.poses)},
                          {"boxes", std::move(boxes)},
                          {"valid", c.valid}});
  }
  return {{"schema_version", kSchemaVersion},
          {"clip_id", clip.clip_id},
          {"start_frame", clip.start_frame},
          {"ground_truth_wearer", clip.ground_truth_wearer},
          {"ego",
           {{"pose_deltas", std::move(deltas)},
            {"motion",
             {{"t_init", se3_json(clip.ego.motion.t_init)}, {"deltas", std::move(motion_deltas)}}}}},
          {"candidates", std::move(candidates)}};
}

ClipObservation clip_from_json(const Json& j) {
  return guarded("clip", [&] {
    check_schema(j, "clip");
    ClipObservation clip;
    clip.clip_id = j.at("clip_id").get<int>();
    clip.start_frame = j.value("start_frame", 0);
    clip.ground_truth_wearer = j.at("ground_truth_wearer").get<int>();
    const Json& ego = j.at("ego");
    const Json& deltas = ego.at("pose_deltas");
    if (deltas.size() != kClipDeltas) throw ValidationError("ego.pose_deltas", "expected 7");
    for (std::size_t k = 0; k < kClipDeltas; ++k) {
      clip.ego.pose_deltas[k] = PoseDelta(joints_from(deltas[k], "ego.pose_deltas"));
    }
    const Json& motion = ego.at("motion");
    clip.ego.motion.t_init = se3_from(motion.at("t_init"));
    const Json& md = motion.at("deltas");
    if (md.size() != kClipDeltas) throw ValidationError("ego.motion.deltas", "expected 7");
    for (std::size_t k = 0; k < kClipDeltas; ++k) {
      clip.ego.motion.deltas[k].rotation.delta_theta = vec3(md[k].at("rotation"));
      clip.ego.motion.deltas[k].translation = vec3(md[k].at("translation"));
    }
    for (const auto& cj : j.at("candidates")) {
      CandidateObservation c;
      c.person_id = cj.at("person_id").get<int>();
      c.poses = pose_sequence_from_json(cj.at("poses"));
      if (!c.poses.is_full_clip()) throw ValidationError("candidates.poses", "expected 8 frames");
      const Json& boxes = cj.at("boxes");
      const Json& valid = cj.at("valid");
      if (boxes.size() != kClipFrames || valid.size() != kClipFrames) {
        throw ValidationError("candidates", "boxes and valid need 8 entries");
      }
      for (std::size_t k = 0; k < kClipFrames; ++k) {
        const Json& b = boxes[k];
        c.boxes[k] = BoundingBox(b.at(0).get<double>(), b.at(1).get<double>(),
                                 b.at(2).get<double>(), b.at(3).get<double>());
        c.valid[k] = valid[k].get<bool>();
      }
      clip.candidates.push_back(std::move(c));
    }
    if (clip.candidates.empty()) throw ValidationError("candidates", "at least one required");
    return clip;
  });
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const Scenario& scenario) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(scenario_to_json(scenario).dump())));
  return buf;
}

void save_scene(const Scene& scene, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "clips", ec);
  if (ec) throw IoError(dir.string(), "cannot create scene directory");
  Json files = Json::array();
  for (const auto& clip : scene.clips) {
    const std::string name = clip_file_name(clip.clip_id);
    write_text_file(dir / "clips" / name, clip_to_json(clip).dump() + "\n");
    files.push_back("clips/" + name);
  }
  const Json manifest = {{"schema_version", kSchemaVersion},
                         {"seed", scene.scenario.seed},
                         {"config_hash", config_hash(scene.scenario)},
                         {"scenario", scenario_to_json(scene.scenario)},
                         {"clips", std::move(files)}};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Scene load_scene(const fs::path& dir) {
  const Json manifest = read_json_file(dir / "manifest.json");
  Scene scene;
  scene.scenario = scenario_from_json(guarded("manifest", [&] { return manifest.at("scenario"); }));
  const auto files = guarded("manifest", [&] { return manifest.at("clips"); });
  for (const auto& f : files) {
    scene.clips.push_back(clip_from_json(read_json_file(dir / f.get<std::string>())));
  }
  return scene;
}

Json score_to_json(int clip_id, const VerificationScore& s) {
  return {{"clip_id", clip_id},
          {"person_id", s.person_id},
          {"components",
           {{"action_ego_ce", s.action_ego_ce},
            {"action_third_ce", s.action_third_ce},
            {"motion_ego_l1", s.motion_ego_l1},
            {"motion_third_l1", s.motion_third_l1}}},
          {"total", s.total},
          {"match_probability", s.match_probability},
          {"observed", s.observed}};
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string(), std::string("malformed JSON: ") + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace egoloc
