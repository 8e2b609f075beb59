#include "egoloc/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <memory>
#include <set>
#include <sstream>

#include "egoloc/errors.hpp"
#include "egoloc/parallel.hpp"

namespace egoloc {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string xy(const Eigen::Vector2d& v) { return num(v.x()) + " " + num(v.y()); }

Scene resolve_scene(const RunConfig& config) {
  if (config.scenario) return generate_scene(*config.scenario, config.threads);
  if (fs::is_directory(config.scenario_path)) return load_scene(config.scenario_path);
  return generate_scene(load_scenario(config.scenario_path), config.threads);
}

}  // namespace

void RunConfig::validate() const {
  if (!scenario) {
    if (scenario_path.empty()) throw ValidationError("scenario", "no scenario given");
    if (!fs::exists(scenario_path)) throw IoError(scenario_path.string(), "scenario not found");
  }
  if (!codebook_path.empty() && !fs::exists(codebook_path)) {
    throw IoError(codebook_path.string(), "codebook not found");
  }
  if (codebook_path.empty() && codebook_k < 1) throw ValidationError("k", "must be >= 1");
  if (threads < 1) throw ValidationError("threads", "must be >= 1");
  weights.validate();
  filter.validate();
}

double average_precision(std::span<const double> scores, std::span<const bool> positives) {
  if (scores.size() != positives.size()) throw InvalidArgument("average_precision: size mismatch");
  const auto total_pos = std::count(positives.begin(), positives.end(), true);
  if (total_pos == 0) return 0.0;
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      if (positives[order[i]]) ++tp;
      ++seen;
      ++i;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

double average_recall(std::span<const double> scores, std::span<const bool> positives) {
  if (scores.size() != positives.size()) throw InvalidArgument("average_recall: size mismatch");
  const auto total_pos = std::count(positives.begin(), positives.end(), true);
  if (total_pos == 0) return 0.0;
  double sum = 0.0;
  constexpr int kSteps = 19;
  for (int s = 1; s <= kSteps; ++s) {
    const double t = 0.05 * s;
    std::size_t tp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (positives[i] && scores[i] >= t) ++tp;
    }
    sum += static_cast<double>(tp) / static_cast<double>(total_pos);
  }
  return sum / kSteps;
}

ActionCodebook fit_scene_codebook(const Scenario& scenario, int k, std::uint64_t seed,
                                  unsigned threads) {
  const Scene clean = generate_scene(scenario.with_noise(NoiseConfig::zero()), threads);
  std::vector<PoseSequence> clips;
  std::set<std::vector<double>> seen;
  for (const auto& clip : clean.clips) {
    for (const auto& c : clip.candidates) {
      const Eigen::VectorXd v = pose_clip_vector(c.poses);
      if (seen.insert(std::vector<double>(v.data(), v.data() + v.size())).second) {
        clips.push_back(c.poses);
      }
    }
  }
  const int capped = std::min<int>(k, static_cast<int>(clips.size()));
  return fit_codebook(clips, capped, seed);
}

MetricsReport evaluate_scene(const Scene& scene, const ActionCodebook& codebook,
                             const RunConfig& config) {
  config.weights.validate();
  config.filter.validate();

  MetricsReport report;
  report.scenario_hash = config_hash(scene.scenario);
  report.seed = config.seed;
  report.codebook_k = codebook.k();
  report.filter_enabled = config.enable_filter;
  report.runtime.threads = config.threads;

  const std::size_t n = scene.clips.size();
  report.decisions.resize(n);
  const auto t_score = Clock::now();
  parallel_for(n, config.threads, [&](std::size_t i) {
    const ClipObservation& clip = scene.clips[i];
    const Localization loc = localize(clip.ego, clip.candidates, codebook, config.weights);
    ClipDecision& d = report.decisions[i];
    d.clip_id = clip.clip_id;
    d.start_frame = clip.start_frame;
    d.truth = clip.ground_truth_wearer;
    d.raw_prediction = loc.person_id;
    d.filtered_prediction = loc.person_id;
    d.scores = loc.scores;
  });
  report.runtime.scoring_seconds = seconds_since(t_score);

  const auto t_filter = Clock::now();
  if (config.enable_filter) {
    std::vector<int> ids;
    std::optional<FilterState> state;
    for (std::size_t step = 0; step < n; ++step) {
      ClipDecision& d = report.decisions[step];
      const ClipObservation& clip = scene.clips[step];
      std::vector<int> clip_ids;
      std::vector<double> probs;
      std::vector<Eigen::Vector2d> observed;
      auto occluded = std::make_unique<bool[]>(clip.candidates.size());
      for (std::size_t c = 0; c < clip.candidates.size(); ++c) {
        const auto& cand = clip.candidates[c];
        clip_ids.push_back(cand.person_id);
        probs.push_back(d.scores[c].match_probability);
        observed.push_back(cand.boxes[kClipFrames - 1].center());
        occluded[c] = cand.valid_frames() == 0;
      }
      if (!state || clip_ids != ids) {
        ids = clip_ids;
        state = FilterState::uniform(ids);
      } else {
        state = predict(*state, 1.0, config.filter);
      }
      const FilterUpdate up =
          update(*state, probs, observed,
                 std::span<const bool>(occluded.get(), clip.candidates.size()), config.filter);
      for (std::size_t c = 0; c < ids.size(); ++c) {
        report.filter_trace.push_back({static_cast<int>(step), ids[c], up.prior[c],
                                       up.likelihood[c], up.state.weights[c], up.predicted[c],
                                       observed[c]});
      }
      state = up.state;
      d.filtered_prediction = map_identity(*state);
      d.low_confidence = state->low_confidence;
    }
  }
  report.runtime.filter_seconds = seconds_since(t_filter);

  std::size_t raw_ok = 0;
  std::size_t filt_ok = 0;
  std::size_t pairs = 0;
  for (const auto& d : report.decisions) pairs += d.scores.size();
  std::vector<double> probs;
  auto positives = std::make_unique<bool[]>(pairs);
  for (const auto& d : report.decisions) {
    raw_ok += d.raw_prediction == d.truth;
    filt_ok += d.filtered_prediction == d.truth;
    for (const auto& s : d.scores) {
      positives[probs.size()] = s.person_id == d.truth;
      probs.push_back(s.match_probability);
    }
  }
  if (n > 0) {
    report.accuracy = static_cast<double>(raw_ok) / static_cast<double>(n);
    report.filtered_accuracy = static_cast<double>(filt_ok) / static_cast<double>(n);
  }
  const std::span<const bool> pos_span(positives.get(), pairs);
  report.average_precision = average_precision(probs, pos_span);
  report.average_recall = average_recall(probs, pos_span);
  return report;
}

MetricsReport run_evaluation(const RunConfig& config) {
  config.validate();
  const auto t_scene = Clock::now();
  const Scene scene = resolve_scene(config);
  const double scene_seconds = seconds_since(t_scene);

  const auto t_cb = Clock::now();
  const ActionCodebook codebook =
      config.codebook_path.empty()
          ? fit_scene_codebook(scene.scenario, config.codebook_k, config.seed, config.threads)
          : load_codebook(config.codebook_path);
  const double codebook_seconds = seconds_since(t_cb);

  MetricsReport report = evaluate_scene(scene, codebook, config);
  report.runtime.scene_seconds = scene_seconds;
  report.runtime.codebook_seconds = codebook_seconds;
  if (!config.output_dir.empty()) write_report(report, config.output_dir);
  return report;
}

Json report_to_json(const MetricsReport& r) {
  Json decisions = Json::array();
  for (const auto& d : r.decisions) {
    Json scores = Json::array();
    for (const auto& s : d.scores) scores.push_back(score_to_json(d.clip_id, s));
    decisions.push_back({{"clip_id", d.clip_id},
                         {"start_frame", d.start_frame},
                         {"truth", d.truth},
                         {"raw_prediction", d.raw_prediction},
                         {"filtered_prediction", d.filtered_prediction},
                         {"low_confidence", d.low_confidence},
                         {"scores", std::move(scores)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"scenario_hash", r.scenario_hash},
          {"seed", r.seed},
          {"codebook_k", r.codebook_k},
          {"clips", r.decisions.size()},
          {"accuracy", r.accuracy},
          {"average_precision", r.average_precision},
          {"average_recall", r.average_recall},
          {"filter", {{"enabled", r.filter_enabled}, {"accuracy", r.filtered_accuracy}}},
          {"decisions", std::move(decisions)}};
}

Json runtime_to_json(const RuntimeStats& s) {
  return {{"schema_version", kSchemaVersion},
          {"scene_seconds", s.scene_seconds},
          {"codebook_seconds", s.codebook_seconds},
          {"scoring_seconds", s.scoring_seconds},
          {"filter_seconds", s.filter_seconds},
          {"threads", s.threads}};
}

void write_report(const MetricsReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError(dir.string(), "cannot create output directory");
  write_text_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
  write_text_file(dir / "runtime.json", runtime_to_json(report.runtime).dump(2) + "\n");
  std::ostringstream csv;
  csv << "clip_id,start_frame,truth,raw_prediction,filtered_prediction,raw_correct,"
         "filtered_correct\n";
  for (const auto& d : report.decisions) {
    csv << d.clip_id << ',' << d.start_frame << ',' << d.truth << ',' << d.raw_prediction << ','
        << d.filtered_prediction << ',' << (d.raw_prediction == d.truth) << ','
        << (d.filtered_prediction == d.truth) << '\n';
  }
  write_text_file(dir / "decisions.csv", csv.str());
  emit_plots(report, dir);
}

void emit_plots(const MetricsReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError(dir.string(), "cannot create output directory");

  std::ostringstream scores;
  scores << "clip_id,person_id,is_wearer,observed,action_ego_ce,action_third_ce,motion_ego_l1,"
            "motion_third_l1,total,match_probability\n";
  for (const auto& d : report.decisions) {
    for (const auto& s : d.scores) {
      scores << d.clip_id << ',' << s.person_id << ',' << (s.person_id == d.truth) << ','
             << s.observed << ',' << num(s.action_ego_ce) << ',' << num(s.action_third_ce) << ','
             << num(s.motion_ego_l1) << ',' << num(s.motion_third_l1) << ',' << num(s.total)
             << ',' << num(s.match_probability) << '\n';
    }
  }
  write_text_file(dir / "scores.csv", scores.str());

  std::ostringstream trace;
  trace << "step,candidate_id,prior,likelihood,posterior,predicted_xy,observed_xy\n";
  for (const auto& t : report.filter_trace) {
    trace << t.step << ',' << t.candidate_id << ',' << num(t.prior) << ',' << num(t.likelihood)
          << ',' << num(t.posterior) << ',' << xy(t.predicted) << ',' << xy(t.observed) << '\n';
  }
  write_text_file(dir / "filter_trace.csv", trace.str());
}

std::vector<SweepRow> run_sweep(const RunConfig& config, std::span<const double> sigma_pose) {
  config.validate();
  Scenario base = config.scenario ? *config.scenario
                  : fs::is_directory(config.scenario_path)
                      ? load_scene(config.scenario_path).scenario
                      : load_scenario(config.scenario_path);
  const ActionCodebook codebook =
      config.codebook_path.empty()
          ? fit_scene_codebook(base, config.codebook_k, config.seed, config.threads)
          : load_codebook(config.codebook_path);
  std::vector<SweepRow> rows;
  for (const double sigma : sigma_pose) {
    if (!(sigma >= 0.0)) throw ValidationError("sigma_pose", "must be >= 0");
    NoiseConfig noise = base.noise;
    noise.pose = sigma;
    const Scene scene = generate_scene(base.with_noise(noise), config.threads);
    const MetricsReport r = evaluate_scene(scene, codebook, config);
    rows.push_back({sigma, r.accuracy, r.filtered_accuracy, r.average_precision,
                    r.average_recall});
  }
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, const fs::path& path) {
  std::ostringstream csv;
  csv << "sigma_pose,accuracy,filtered_accuracy,average_precision,average_recall\n";
  for (const auto& r : rows) {
    csv << num(r.sigma_pose) << ',' << num(r.accuracy) << ',' << num(r.filtered_accuracy) << ','
        << num(r.average_precision) << ',' << num(r.average_recall) << '\n';
  }
  write_text_file(path, csv.str());
}

}  // namespace egoloc
