// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "egoloc/evaluation.hpp"
#include "egoloc/geometry.hpp"
#include "oracles.hpp"

using namespace egoloc;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kGeomTol = 1e-9;
constexpr double kTrajTol = 1e-9;
constexpr double kFilterTol = 1e-12;
constexpr double kLogKTol = 1e-9;
constexpr double kGeomSeconds = 10.0;
constexpr double kSuiteSeconds = 300.0;

const NoiseConfig kNoise{.pose = 0.02, .odo_trans = 0.01, .odo_rot = 0.01, .bbox = 0.01};

struct Outcome {
  bool pass = true;
  std::string detail;
};

Json golden() {
  std::ifstream in(fs::path(EGOLOC_GOLDEN_DIR) / "acceptance.json");
  return Json::parse(in);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... v) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

Eigen::Vector4d coeffs(const UnitQuaternion& q) { return {q.w(), q.x(), q.y(), q.z()}; }

const CandidateObservation& wearer_of(const ClipObservation& clip) {
  for (const auto& c : clip.candidates) {
    if (c.person_id == clip.ground_truth_wearer) return c;
  }
  return clip.candidates.front();
}

Outcome ac1_geometry() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> angle(0.0, 3.1);
  constexpr int kTrials = 10000;
  double worst_exp = 0.0, worst_compose = 0.0, worst_se3 = 0.0;
  for (int i = 0; i < kTrials; ++i) {
    Eigen::Vector3d v = oracle::random_vector(rng, 1.0);
    if (v.norm() > 0) v = v.normalized() * angle(rng) * (i % 4 == 0 ? 1e-5 : 1.0);
    const UnitQuaternion q = error_quaternion({v});
    worst_exp = std::max(worst_exp, (q.to_matrix() - oracle::rotation_exp(v)).cwiseAbs().maxCoeff());

    const Eigen::Vector4d a = oracle::random_quat(rng), b = oracle::random_quat(rng);
    const UnitQuaternion qa(a[0], a[1], a[2], a[3]), qb(b[0], b[1], b[2], b[3]);
    const Eigen::Matrix3d ra = oracle::matrix_of(a[0], a[1], a[2], a[3]);
    const Eigen::Matrix3d rb = oracle::matrix_of(b[0], b[1], b[2], b[3]);
    worst_compose = std::max(
        worst_compose, oracle::quat_gap(coeffs(quat_compose(qa, qb)), oracle::quat_of(ra * rb)));

    const Eigen::Vector3d ta = oracle::random_vector(rng, 10.0), tb = oracle::random_vector(rng, 10.0);
    const SE3Transform c = se3_compose({qa, ta}, {qb, tb});
    const Eigen::Matrix4d m = oracle::homogeneous(ra, ta) * oracle::homogeneous(rb, tb);
    worst_se3 = std::max(worst_se3, (c.to_matrix() - m).cwiseAbs().maxCoeff());
  }
  const UnitQuaternion zero = error_quaternion({Eigen::Vector3d::Zero()});
  const bool exact = zero.w() == 1.0 && zero.x() == 0.0 && zero.y() == 0.0 && zero.z() == 0.0;
  const double secs = seconds_since(t0);
  return {worst_exp <= kGeomTol && worst_compose <= kGeomTol && worst_se3 <= kGeomTol && exact &&
              secs < kGeomSeconds,
          fmt("n=%d exp=%.2e compose=%.2e se3=%.2e zero_exact=%d t=%.2fs", kTrials, worst_exp,
              worst_compose, worst_se3, exact, secs)};
}

Outcome ac2_zero_noise() {
  std::size_t clips = 0, pose_mismatch = 0, correct = 0;
  double worst = 0.0;
  const std::pair<const char*, std::uint64_t> runs[] = {
      {"three-person-no-crossing", 1}, {"three-person-no-crossing", 2},
      {"two-person-no-crossing", 3},   {"two-person-no-crossing", 4},
      {"same-dressing-two-person-no-crossing", 5}, {"single-static", 6}};
  for (const auto& [preset, seed] : runs) {
    RunConfig cfg;
    cfg.scenario = make_preset(preset, seed, 207, NoiseConfig::zero());
    cfg.seed = seed;
    const Scene scene = generate_scene(*cfg.scenario);
    for (const auto& clip : scene.clips) {
      const auto& w = wearer_of(clip);
      pose_mismatch += !(integrate_pose_deltas(w.poses[0], clip.ego.pose_deltas) == w.poses);
      const Trajectory2D ego = integrate_ego_motion(clip.ego.motion);
      const Trajectory2D box = bbox_trajectory(w.boxes);
      for (std::size_t k = 0; k < kClipFrames; ++k) worst = std::max(worst, (ego[k] - box[k]).norm());
    }
    const ActionCodebook cb = fit_scene_codebook(scene.scenario, cfg.codebook_k, seed);
    const MetricsReport r = evaluate_scene(scene, cb, cfg);
    for (const auto& d : r.decisions) correct += d.raw_prediction == d.truth;
    clips += scene.clips.size();
  }
  const double acc = static_cast<double>(correct) / static_cast<double>(clips);
  return {clips >= 1000 && pose_mismatch == 0 && worst <= kTrajTol && acc == 1.0,
          fmt("clips=%zu pose_mismatch=%zu traj_max=%.2e accuracy=%.4f", clips, pose_mismatch,
              worst, acc)};
}

Outcome ac3_init_offset() {
  std::mt19937_64 rng(3003);
  constexpr int kCells = 6;
  std::array<Eigen::Vector3d, kJointCount> base_delta;
  for (auto& d : base_delta) d = {oracle::dyadic(rng, 0.05), oracle::dyadic(rng, 0.05), oracle::dyadic(rng, 0.05)};
  std::vector<Joint19Pose> centers;
  for (int c = 0; c < kCells; ++c) {
    std::array<Eigen::Vector3d, kJointCount> j;
    const Eigen::Vector3d shift(4.0 * c, std::ldexp(1.0, c % 3), 0.25 * c);
    for (auto& v : j) v = shift + Eigen::Vector3d(oracle::dyadic(rng, 0.5), oracle::dyadic(rng, 0.5), oracle::dyadic(rng, 0.5));
    centers.emplace_back(j);
  }
  const auto jitter = [&](const std::array<Eigen::Vector3d, kJointCount>& a, double s) {
    std::array<Eigen::Vector3d, kJointCount> out;
    for (std::size_t i = 0; i < kJointCount; ++i) {
      out[i] = a[i] + Eigen::Vector3d(oracle::dyadic(rng, s), oracle::dyadic(rng, s), oracle::dyadic(rng, s));
    }
    return out;
  };
  const auto deltas_near = [&](double s) {
    std::array<PoseDelta, kClipDeltas> d;
    for (auto& x : d) x = PoseDelta(jitter(base_delta, s));
    return d;
  };
  std::vector<PoseSequence> training;
  for (int c = 0; c < kCells; ++c) {
    for (int n = 0; n < 20; ++n) {
      training.push_back(integrate_pose_deltas(Joint19Pose(jitter(centers[c].joints(), 0.02)), deltas_near(0.005)));
    }
  }
  const ActionCodebook cb = fit_codebook(training, kCells, 3);
  std::array<int, kCells> cell_of{};
  for (int c = 0; c < kCells; ++c) {
    cell_of[c] = cb.assign(integrate_pose_deltas(centers[c], deltas_near(0.0))).index;
  }

  int offset_fail = 0, label_fail = 0;
  std::uniform_int_distribution<int> pick(0, kCells - 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int a = pick(rng);
    const int b = (a + 1 + pick(rng) % (kCells - 1)) % kCells;
    const auto d = deltas_near(0.005);
    const Joint19Pose p1(jitter(centers[a].joints(), 0.02)), p2(jitter(centers[b].joints(), 0.02));
    const PoseSequence s1 = integrate_pose_deltas(p1, d), s2 = integrate_pose_deltas(p2, d);
    for (std::size_t k = 0; k < kClipFrames; ++k) {
      for (std::size_t j = 0; j < kJointCount; ++j) offset_fail += (s1[k][j] - s2[k][j]) != (p1[j] - p2[j]);
    }
    const int l1 = cb.assign(s1).index, l2 = cb.assign(s2).index;
    label_fail += l1 == l2 || l1 != cell_of[a] || l2 != cell_of[b];
  }
  return {offset_fail == 0 && label_fail == 0,
          fmt("trials=100 offset_mismatch=%d label_mismatch=%d", offset_fail, label_fail)};
}

Outcome ac4_kmeans() {
  int increases = 0, fits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd m(6, 150);
    for (int c = 0; c < m.cols(); ++c) {
      const double centre = 3.0 * (c % 5);
      for (int r = 0; r < m.rows(); ++r) m(r, c) = centre + g(rng);
    }
    const KMeansFit fit = fit_codebook_vectors(m, {.k = 8, .seed = seed});
    for (std::size_t i = 1; i < fit.sse_history.size(); ++i) {
      increases += fit.sse_history[i] > fit.sse_history[i - 1];
    }
    ++fits;
  }

  int exhaustive_fail = 0;
  std::mt19937_64 rng(4004);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Eigen::VectorXd> pts;
    Eigen::MatrixXd m(2, 4);
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd p(2);
      const double base = i < 2 ? 0.0 : 64.0;
      p << base + oracle::dyadic(rng, 1.0), oracle::dyadic(rng, 1.0);
      pts.push_back(p);
      m.col(i) = p;
    }
    const oracle::TwoPartition best = oracle::best_two_partition(pts);
    const KMeansFit fit = fit_codebook_vectors(m, {.k = 2, .seed = static_cast<std::uint64_t>(trial)});
    const auto& c = fit.codebook.centroids();
    const bool same = (c.col(0) == best.mean_a && c.col(1) == best.mean_b) ||
                      (c.col(0) == best.mean_b && c.col(1) == best.mean_a);
    exhaustive_fail += !same || fit.sse_history.back() != best.sse;
  }

  const Scenario s = make_preset("three-person-no-crossing", 7, 60, NoiseConfig::zero());
  const bool deterministic =
      fit_scene_codebook(s, 50, 11).centroids() == fit_scene_codebook(s, 50, 11).centroids();
  return {increases == 0 && exhaustive_fail == 0 && deterministic,
          fmt("fits=%d sse_increases=%d exhaustive_mismatch=%d/100 deterministic=%d", fits,
              increases, exhaustive_fail, deterministic)};
}

Outcome ac5_filter() {
  std::mt19937_64 rng(5005);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const FilterParams fp;
  FilterState s = FilterState::uniform(std::vector<int>{0, 1, 2});
  oracle::ReferenceFilter ref(3, fp.alpha, fp.beta, fp.sigma_p);
  double worst = 0.0;
  std::vector<Eigen::Vector2d> truth = {{0, 0}, {1, 1}, {-1, 2}};
  for (int t = 0; t < 50; ++t) {
    if (t > 0) {
      s = predict(s, 1.0, fp);
      ref.predict(1.0);
    }
    std::vector<double> p(3);
    std::vector<Eigen::Vector2d> obs(3);
    bool occ[3];
    for (int i = 0; i < 3; ++i) {
      truth[i] += Eigen::Vector2d(0.08 * (i - 1), 0.05);
      obs[i] = truth[i] + 0.05 * Eigen::Vector2d(u(rng) - 0.5, u(rng) - 0.5);
      p[i] = i == 1 ? 0.4 + 0.6 * u(rng) : 0.7 * u(rng);
      occ[i] = u(rng) < 0.15;
    }
    s = update(s, p, obs, std::span<const bool>(occ, 3), fp).state;
    ref.update(p, obs, {occ[0], occ[1], occ[2]});
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(s.weights[i] - ref.w[i]));
  }

  int scenarios = 0, worse = 0;
  double raw_sum = 0.0, filt_sum = 0.0;
  NoiseConfig n = kNoise;
  n.occlusion = 0.05;
  for (const char* preset : {"two-person-crossing", "three-person-crossing"}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      RunConfig cfg;
      cfg.scenario = make_preset(preset, seed, 207, n);
      cfg.seed = seed;
      const MetricsReport r = run_evaluation(cfg);
      ++scenarios;
      worse += r.filtered_accuracy < r.accuracy;
      raw_sum += r.accuracy;
      filt_sum += r.filtered_accuracy;
    }
  }
  return {worst <= kFilterTol && scenarios >= 20 && worse == 0,
          fmt("recursion_max=%.2e scenarios=%d filtered<raw=%d mean_raw=%.4f mean_filtered=%.4f",
              worst, scenarios, worse, raw_sum / scenarios, filt_sum / scenarios)};
}

Outcome ac6_sweep(const Json& g) {
  RunConfig cfg;
  cfg.seed = g.at("seed").get<std::uint64_t>();
  cfg.scenario = make_preset(g.at("preset").get<std::string>(), cfg.seed,
                             g.at("duration").get<int>(), kNoise);
  const MetricsReport r = run_evaluation(cfg);
  const double floor = g.at("accuracy_floor").get<double>();
  const auto levels = g.at("sweep").at("sigma_pose").get<std::vector<double>>();
  const auto rows = run_sweep(cfg, levels);
  bool monotone = true;
  std::string sweep;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].accuracy > rows[i - 1].accuracy) monotone = false;
    sweep += fmt("%s%.3f", i ? "," : "", rows[i].accuracy);
  }
  return {r.decisions.size() == 200 && r.accuracy >= floor && monotone,
          fmt("clips=%zu accuracy=%.4f floor=%.2f sweep=[%s] monotone=%d", r.decisions.size(),
              r.accuracy, floor, sweep.c_str(), monotone)};
}

Outcome ac7_bookkeeping() {
  std::size_t scored = 0, mismatch = 0;
  NoiseConfig n = kNoise;
  n.occlusion = 0.05;
  for (const char* preset : {"three-person-no-crossing", "three-person-crossing", "group-crossing"}) {
    RunConfig cfg;
    cfg.scenario = make_preset(preset, 42, 207, n);
    const MetricsReport r = run_evaluation(cfg);
    for (const auto& d : r.decisions) {
      for (const auto& s : d.scores) {
        if (!s.observed) continue;
        ++scored;
        mismatch += s.total != ((s.action_ego_ce + s.action_third_ce) + s.motion_ego_l1) +
                                   s.motion_third_l1;
      }
    }
  }
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(400, 1.0 / 400.0);
  Eigen::VectorXd hot = Eigen::VectorXd::Zero(400);
  hot[17] = 1.0;
  const double ce = clamped_cross_entropy(uniform, 17);
  const double ce_pair = action_agreement(uniform, hot).ego_cross_entropy;
  const double err = std::max(std::abs(ce - std::log(400.0)), std::abs(ce_pair - std::log(400.0)));
  return {mismatch == 0 && scored > 0 && err <= kLogKTol,
          fmt("scored=%zu total_mismatch=%zu ce_err=%.2e", scored, mismatch, err)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome ac8_reproducible(Clock::time_point suite_start) {
  const fs::path root = fs::temp_directory_path() / "egoloc_acceptance";
  fs::remove_all(root);
  NoiseConfig n = kNoise;
  n.occlusion = 0.05;
  RunConfig cfg;
  cfg.scenario = make_preset("three-person-crossing", 42, 207, n);
  cfg.seed = 42;
  cfg.output_dir = root / "a";
  run_evaluation(cfg);
  cfg.output_dir = root / "b";
  cfg.threads = 4;
  run_evaluation(cfg);
  const std::string a = slurp(root / "a" / "report.json");
  const bool identical = !a.empty() && a == slurp(root / "b" / "report.json");
  const double secs = seconds_since(suite_start);
  return {identical && secs < kSuiteSeconds,
          fmt("report_bytes=%zu identical=%d acceptance_time=%.1fs", a.size(), identical, secs)};
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const Json g = golden();
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AC1 geometry oracles", ac1_geometry},
      {"AC2 zero-noise cross-view equality", ac2_zero_noise},
      {"AC3 init offset and labels", ac3_init_offset},
      {"AC4 k-means", ac4_kmeans},
      {"AC5 bayes filter", ac5_filter},
      {"AC6 noise robustness", [&] { return ac6_sweep(g); }},
      {"AC7 loss bookkeeping", ac7_bookkeeping},
      {"AC8 reproducibility", [&] { return ac8_reproducible(start); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
