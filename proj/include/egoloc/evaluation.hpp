#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egoloc/action_codebook.hpp"
#include "egoloc/bayes_filter.hpp"
#include "egoloc/serialization.hpp"
#include "egoloc/simulator.hpp"
#include "egoloc/verification.hpp"

namespace egoloc {

struct RunConfig {
  /// Scenario JSON file or saved scene directory. Ignored when `scenario` is set.
  std::filesystem::path scenario_path;
  std::optional<Scenario> scenario;
  /// Empty: fit a codebook of `codebook_k` clusters on the scenario's
  /// noise-free clips, seeded with `seed`.
  std::filesystem::path codebook_path;
  int codebook_k = kDefaultCodebookSize;
  VerificationWeights weights;
  FilterParams filter;
  bool enable_filter = true;
  /// Empty: nothing is written.
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  /// Throws ValidationError naming the offending field, IoError for
  /// unresolvable paths.
  void validate() const;
};

struct ClipDecision {
  int clip_id = 0;
  int start_frame = 0;
  PersonId truth = 0;
  PersonId raw_prediction = 0;
  PersonId filtered_prediction = 0;
  bool low_confidence = false;
  std::vector<VerificationScore> scores;  // candidate order
};

struct FilterTraceRow {
  int step = 0;
  PersonId candidate_id = 0;
  double prior = 0.0;
  double likelihood = 0.0;
  double posterior = 0.0;
  Eigen::Vector2d predicted = Eigen::Vector2d::Zero();
  Eigen::Vector2d observed = Eigen::Vector2d::Zero();
};

struct RuntimeStats {
  double scene_seconds = 0.0;
  double codebook_seconds = 0.0;
  double scoring_seconds = 0.0;
  double filter_seconds = 0.0;
  unsigned threads = 1;
};

struct MetricsReport {
  std::string scenario_hash;
  std::uint64_t seed = 0;
  int codebook_k = 0;
  bool filter_enabled = false;
  double accuracy = 0.0;           // raw per-clip localization
  double filtered_accuracy = 0.0;  // equals accuracy when the filter is off
  double average_precision = 0.0;
  double average_recall = 0.0;
  std::vector<ClipDecision> decisions;  // ordered by clip_id
  std::vector<FilterTraceRow> filter_trace;
  RuntimeStats runtime;
};

/// Step-wise average precision of `scores` ranking `positives` first:
/// sum over distinct thresholds of (R_n - R_{n-1}) P_n. 0 without positives.
double average_precision(std::span<const double> scores, std::span<const bool> positives);
/// Mean recall over thresholds 0.05, 0.10, ..., 0.95 (score >= t predicts positive).
double average_recall(std::span<const double> scores, std::span<const bool> positives);

/// Noise-free copy of the scenario, clipped, every candidate clip pooled.
/// k is capped at the number of distinct clips.
ActionCodebook fit_scene_codebook(const Scenario& scenario, int k, std::uint64_t seed,
                                  unsigned threads = 1);

/// Localizes every clip, then runs the filter over the clip stream.
MetricsReport evaluate_scene(const Scene& scene, const ActionCodebook& codebook,
                             const RunConfig& config);

/// Resolves inputs, evaluates, and writes outputs when output_dir is set.
MetricsReport run_evaluation(const RunConfig& config);

/// Deterministic report (no runtime stats).
Json report_to_json(const MetricsReport& report);
Json runtime_to_json(const RuntimeStats& stats);

/// report.json, runtime.json, decisions.csv plus the trace CSVs.
void write_report(const MetricsReport& report, const std::filesystem::path& dir);

/// scores.csv (one row per clip and candidate) and filter_trace.csv.
void emit_plots(const MetricsReport& report, const std::filesystem::path& dir);

struct SweepRow {
  double sigma_pose = 0.0;
  double accuracy = 0.0;
  double filtered_accuracy = 0.0;
  double average_precision = 0.0;
  double average_recall = 0.0;
};

/// Re-evaluates the scenario with noise.pose set to each sigma in turn. One
/// codebook is shared across the sweep.
std::vector<SweepRow> run_sweep(const RunConfig& config, std::span<const double> sigma_pose);
void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);

inline constexpr double kDefaultSweep[] = {0.0, 0.02, 0.05, 0.10};

}  // namespace egoloc
