#include <gtest/gtest.h>

#include <numbers>

#include "egoloc/errors.hpp"
#include "egoloc/serialization.hpp"
#include "egoloc/simulator.hpp"
#include "oracles.hpp"

using namespace egoloc;

namespace {

const CandidateObservation& wearer_of(const ClipObservation& clip) {
  for (const auto& c : clip.candidates) {
    if (c.person_id == clip.ground_truth_wearer) return c;
  }
  throw std::logic_error("no wearer candidate");
}

std::vector<Joint19Pose> rigid_frames(const Joint19Pose& base, const Eigen::Vector3d& step,
                                      double spin) {
  const SE3Transform body = body_frame(base);
  const Eigen::Matrix3d r0 = body.rotation.to_matrix();
  const Eigen::Vector3d axis = r0.col(2);
  std::vector<Joint19Pose> out;
  for (int k = 0; k < 8; ++k) {
    const Eigen::Matrix3d r = oracle::rotation_exp(axis * spin * k);
    std::array<Eigen::Vector3d, kJointCount> j;
    for (std::size_t i = 0; i < kJointCount; ++i) {
      j[i] = r * (base[i] - body.translation) + body.translation + step * k;
    }
    out.emplace_back(j);
  }
  return out;
}

}  // namespace

class ZeroNoisePreset : public ::testing::TestWithParam<std::string> {};

TEST_P(ZeroNoisePreset, CrossViewEquality) {
  const Scene scene = generate_scene(make_preset(GetParam(), 3, 60, NoiseConfig::zero()));
  ASSERT_EQ(scene.clips.size(), 53u);
  for (const auto& clip : scene.clips) {
    const auto& w = wearer_of(clip);
    EXPECT_EQ(integrate_pose_deltas(w.poses[0], clip.ego.pose_deltas), w.poses);
    const Trajectory2D ego = integrate_ego_motion(clip.ego.motion);
    const Trajectory2D box = bbox_trajectory(w.boxes);
    for (std::size_t k = 0; k < kClipFrames; ++k) EXPECT_LT((ego[k] - box[k]).norm(), 1e-9);
    EXPECT_EQ(clip.candidates.size(), scene.scenario.persons.size());
  }
}

INSTANTIATE_TEST_SUITE_P(AllPresets, ZeroNoisePreset, ::testing::ValuesIn(preset_names()),
                         [](const auto& info) {
                           std::string n = info.param;
                           std::replace(n.begin(), n.end(), '-', '_');
                           return n;
                         });

TEST(GenerateScene, SingleStaticPerson) {
  const Scene scene = generate_scene(make_preset("single-static", 1, 20, NoiseConfig::zero()));
  for (const auto& clip : scene.clips) {
    for (const auto& p : bbox_trajectory(clip.candidates[0].boxes)) {
      EXPECT_EQ(p, Eigen::Vector2d::Zero());
    }
    for (const auto& d : clip.ego.pose_deltas) {
      for (const auto& v : d.deltas()) EXPECT_EQ(v, Eigen::Vector3d::Zero());
    }
    for (const auto& d : clip.ego.motion.deltas) {
      EXPECT_LT(d.rotation.delta_theta.norm(), 1e-15);
      EXPECT_LT(d.translation.norm(), 1e-15);
    }
  }
}

TEST(GenerateScene, CrossingFlagsFollowSchedule) {
  const Scenario s = make_preset("two-person-crossing", 42, 207, NoiseConfig::zero());
  ASSERT_FALSE(s.crossings.empty());
  const Scene scene = generate_scene(s);
  EXPECT_EQ(scene.clips.size(), static_cast<std::size_t>(s.duration - 7));
  for (const auto& clip : scene.clips) {
    for (const auto& c : clip.candidates) {
      for (std::size_t k = 0; k < kClipFrames; ++k) {
        const int f = clip.start_frame + static_cast<int>(k);
        bool occluded = false;
        for (const auto& x : s.crossings) {
          occluded |= (x.a == c.person_id || x.b == c.person_id) && f >= x.start && f < x.end;
        }
        EXPECT_EQ(c.valid[k], !occluded);
      }
    }
  }
}

TEST(GenerateScene, DeterministicAcrossRunsAndThreads) {
  const NoiseConfig n{.pose = 0.02, .odo_trans = 0.01, .odo_rot = 0.01, .bbox = 0.01, .occlusion = 0.05};
  const Scenario s = make_preset("three-person-crossing", 9, 80, n);
  const Scene a = generate_scene(s, 1);
  const Scene b = generate_scene(s, 1);
  const Scene c = generate_scene(s, 4);
  for (std::size_t i = 0; i < a.clips.size(); ++i) {
    const std::string ja = clip_to_json(a.clips[i]).dump();
    EXPECT_EQ(ja, clip_to_json(b.clips[i]).dump());
    EXPECT_EQ(ja, clip_to_json(c.clips[i]).dump());
  }
  const Scene other = generate_scene(make_preset("three-person-crossing", 9, 80, n).with_noise(
      {.pose = 0.03, .odo_trans = 0.01, .odo_rot = 0.01, .bbox = 0.01, .occlusion = 0.05}));
  EXPECT_NE(clip_to_json(a.clips[0]).dump(), clip_to_json(other.clips[0]).dump());
}

TEST(GenerateScene, PoseNoiseHasRequestedSpread) {
  const Scenario s = make_preset("two-person-no-crossing", 2, 100, {.pose = 0.02});
  const Scene noisy = generate_scene(s);
  const Scene clean = generate_scene(s.with_noise(NoiseConfig::zero()));
  double sq = 0.0;
  double mean = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < noisy.clips.size(); ++i) {
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t k = 0; k < 8; ++k) {
        for (std::size_t j = 0; j < kJointCount; ++j) {
          const Eigen::Vector3d e =
              noisy.clips[i].candidates[c].poses[k][j] - clean.clips[i].candidates[c].poses[k][j];
          sq += e.squaredNorm();
          mean += e.sum();
          n += 3;
        }
      }
    }
  }
  EXPECT_NEAR(std::sqrt(sq / n), 0.02, 0.0005);
  EXPECT_NEAR(mean / n, 0.0, 0.0005);
}

TEST(GenerateScene, EgoTimeOffsetShiftsEgoStream) {
  Scenario s = make_preset("two-person-no-crossing", 4, 40, NoiseConfig::zero());
  const Scene base = generate_scene(s);
  s.ego_time_offset = 1;
  const Scene shifted = generate_scene(s);
  ASSERT_EQ(shifted.clips.size(), base.clips.size() - 1);
  for (std::size_t i = 0; i + 1 < base.clips.size(); ++i) {
    EXPECT_EQ(clip_to_json(shifted.clips[i]).at("ego").dump(),
              clip_to_json(base.clips[i + 1]).at("ego").dump());
  }
}

TEST(GenerateScene, SameGaitSharesWalkingStyle) {
  const Scenario s = make_preset("same-dressing-three-person-crossing", 8, 40, NoiseConfig::zero());
  EXPECT_TRUE(s.same_gait);
  for (const auto& p : s.persons) EXPECT_EQ(p.gait, s.wearer().gait);
  const Scenario d = make_preset("three-person-crossing", 8, 40, NoiseConfig::zero());
  EXPECT_FALSE(d.persons[0].gait == d.persons[1].gait);
}

TEST(EgoDeltasFromTruth, IdenticalFrames) {
  const Joint19Pose p = gait_pose({}, {1, 2}, 0.3, 0.4);
  const EgoTruth t = ego_deltas_from_truth(std::vector<Joint19Pose>(8, p));
  for (const auto& d : t.pose_deltas) {
    for (const auto& v : d.deltas()) EXPECT_EQ(v, Eigen::Vector3d::Zero());
  }
  for (const auto& d : t.motion.deltas) {
    EXPECT_LT(d.rotation.delta_theta.norm(), 1e-12);
    EXPECT_LT(d.translation.norm(), 1e-12);
  }
  EXPECT_THROW(ego_deltas_from_truth(std::vector<Joint19Pose>(7, p)), InvalidArgument);
}

TEST(EgoDeltasFromTruth, RigidTranslation) {
  const Joint19Pose p = gait_pose({}, {1, 2}, 0.7, 0.4);
  const EgoTruth t = ego_deltas_from_truth(rigid_frames(p, {0.3, 0, 0}, 0.0));
  const Eigen::Matrix3d r0 = body_frame(p).rotation.to_matrix();
  const Eigen::Vector3d expect = r0.transpose() * Eigen::Vector3d(0.3, 0, 0);
  for (const auto& d : t.motion.deltas) {
    EXPECT_LT((d.translation - expect).norm(), 1e-9);
    EXPECT_LT(d.rotation.delta_theta.norm(), 1e-9);
  }
}

TEST(EgoDeltasFromTruth, SpinAboutBodyZ) {
  const Joint19Pose p = gait_pose({}, {0, 0}, -1.2, 2.0);
  const EgoTruth t = ego_deltas_from_truth(rigid_frames(p, Eigen::Vector3d::Zero(), 0.1));
  const UnitQuaternion q = error_quaternion({Eigen::Vector3d(0, 0, 0.1)});
  for (const auto& d : t.motion.deltas) {
    const UnitQuaternion got = error_quaternion(d.rotation);
    const Eigen::Vector4d a(got.w(), got.x(), got.y(), got.z());
    EXPECT_LT(oracle::quat_gap(a, {q.w(), q.x(), q.y(), q.z()}), 1e-9);
    EXPECT_LT(d.translation.norm(), 1e-9);
  }
}

TEST(BoundingBoxFromPose, CenteredOnTorsoAndCoversJoints) {
  const Joint19Pose p = gait_pose({}, {3, -1}, 2.0, 1.0);
  const BoundingBox b = bounding_box_from_pose(p, 0.1);
  EXPECT_EQ(b.center(), torso_center_2d(p));
  for (const auto& j : p.joints()) {
    EXPECT_LE(b.left_top.x(), j.x() - 0.1 + 1e-12);
    EXPECT_GE(b.right_bottom.y(), j.y() + 0.1 - 1e-12);
  }
}

TEST(DetectCrossings, NoneForSeparateLoops) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_TRUE(make_preset("three-person-no-crossing", seed, 207, {}).crossings.empty());
    EXPECT_FALSE(make_preset("three-person-crossing", seed, 207, {}).crossings.empty());
  }
}

TEST(Scenario, ValidationNamesField) {
  const auto field = [](const Scenario& s) {
    try {
      s.validate();
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string();
  };
  Scenario s = make_preset("two-person-no-crossing", 1, 20, {});
  EXPECT_EQ(field(s), "");
  Scenario t = s;
  t.duration = 7;
  EXPECT_EQ(field(t), "duration");
  t = s;
  for (auto& p : t.persons) p.is_wearer = true;
  EXPECT_EQ(field(t), "persons.is_wearer");
  t = s;
  t.noise.pose = -1;
  EXPECT_EQ(field(t), "noise.sigma_pose");
  t = s;
  t.persons[1].id = t.persons[0].id;
  EXPECT_EQ(field(t), "persons.id");
  EXPECT_THROW(make_preset("nope", 1, 20, {}), ValidationError);
}
