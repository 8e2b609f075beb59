// egoloc command-line driver: simulate, fit-codebook, evaluate, sweep, report.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "egoloc/errors.hpp"
#include "egoloc/evaluation.hpp"
#include "egoloc/serialization.hpp"
#include "egoloc/simulator.hpp"

namespace fs = std::filesystem;
using namespace egoloc;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct ScenarioArgs {
  std::string scenario;
  std::string scene;
  std::string preset;
  int duration = 207;
  int ego_time_offset = 0;
  NoiseConfig noise;
  CLI::Option* seed_opt = nullptr;
};

struct CommonArgs {
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& a, CommonArgs& c) {
  cmd->add_option("--scenario", a.scenario, "Scenario JSON file");
  cmd->add_option("--scene", a.scene, "Saved scene directory (from `simulate`)");
  cmd->add_option("--preset", a.preset, "Built-in scenario layout")
      ->check(CLI::IsMember(preset_names()));
  cmd->add_option("--duration", a.duration, "Frames, for --preset");
  cmd->add_option("--ego-time-offset", a.ego_time_offset, "Ego/third-view frame offset fault");
  cmd->add_option("--sigma-pose", a.noise.pose, "Pose noise, meters");
  cmd->add_option("--sigma-odo-trans", a.noise.odo_trans, "Ego translation noise, meters");
  cmd->add_option("--sigma-odo-rot", a.noise.odo_rot, "Ego rotation noise, radians");
  cmd->add_option("--sigma-bbox", a.noise.bbox, "Box corner noise, plane units");
  cmd->add_option("--sigma-occlusion", a.noise.occlusion, "Extra pose noise while occluded");
  a.seed_opt = cmd->add_option("--seed", c.seed, "Seed for every random stream");
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
}

// Noise flags apply to presets; a scenario file keeps its own noise block.
Scenario resolve_scenario(const ScenarioArgs& a, const CommonArgs& c) {
  const int given = !a.scenario.empty() + !a.preset.empty() + !a.scene.empty();
  if (given != 1) {
    throw ValidationError("scenario", "give exactly one of --scenario, --scene, --preset");
  }
  Scenario s;
  if (!a.preset.empty()) {
    s = make_preset(a.preset, c.seed, a.duration, a.noise);
  } else if (!a.scene.empty()) {
    s = load_scene(a.scene).scenario;
  } else {
    if (!fs::exists(a.scenario)) throw IoError(a.scenario, "scenario not found");
    s = load_scenario(a.scenario);
    if (a.seed_opt->count() > 0) s.seed = c.seed;
  }
  if (a.ego_time_offset != 0) s.ego_time_offset = a.ego_time_offset;
  s.validate();
  return s;
}

struct EvalArgs {
  std::string codebook;
  int k = kDefaultCodebookSize;
  VerificationWeights weights;
  FilterParams filter;
  bool enable_filter = true;
  std::string out;
};

void add_eval_flags(CLI::App* cmd, EvalArgs& e) {
  cmd->add_option("--codebook", e.codebook, "Codebook JSON (default: fit on clean clips)");
  cmd->add_option("--k", e.k, "Codebook size when fitting");
  cmd->add_option("--action-weight", e.weights.action, "Weight on both action terms");
  cmd->add_option("--motion-weight", e.weights.motion, "Weight on both trajectory terms");
  cmd->add_option("--sigma", e.weights.sigma, "Score scale: p = exp(-total / sigma)");
  cmd->add_option("--tau", e.weights.temperature, "Label softmax temperature, meters");
  cmd->add_option("--alpha", e.filter.alpha, "Filter mixing toward uniform");
  cmd->add_option("--beta", e.filter.beta, "Filter velocity memory");
  cmd->add_option("--sigma-p", e.filter.sigma_p, "Filter position gate");
  cmd->add_flag("--filter,!--no-filter", e.enable_filter, "Run the Bayes filter (default on)");
  cmd->add_option("--out", e.out, "Output directory")->required();
}

RunConfig make_run_config(const Scenario& s, const EvalArgs& e, const CommonArgs& c) {
  RunConfig cfg;
  cfg.scenario = s;
  cfg.codebook_path = e.codebook;
  cfg.codebook_k = e.k;
  cfg.weights = e.weights;
  cfg.filter = e.filter;
  cfg.enable_filter = e.enable_filter;
  cfg.output_dir = e.out;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  return cfg;
}

void print_summary(const Json& report) {
  std::printf("clips               %d\n", report.at("clips").get<int>());
  std::printf("accuracy            %.4f\n", report.at("accuracy").get<double>());
  if (report.at("filter").at("enabled").get<bool>()) {
    std::printf("filtered accuracy   %.4f\n", report.at("filter").at("accuracy").get<double>());
  }
  std::printf("average precision   %.4f\n", report.at("average_precision").get<double>());
  std::printf("average recall      %.4f\n", report.at("average_recall").get<double>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ego-to-third-view wearer localization harness"};
  app.require_subcommand(1);

  ScenarioArgs sa;
  CommonArgs ca;
  EvalArgs ea;

  auto* simulate = app.add_subcommand("simulate", "Generate a scene directory");
  add_scenario_flags(simulate, sa, ca);
  std::string sim_out;
  simulate->add_option("--out", sim_out, "Scene directory")->required();

  auto* fit = app.add_subcommand("fit-codebook", "Fit an action codebook on clean clips");
  add_scenario_flags(fit, sa, ca);
  std::string fit_out;
  int fit_k = kDefaultCodebookSize;
  fit->add_option("--k", fit_k, "Number of clusters");
  fit->add_option("--out", fit_out, "Codebook JSON path")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score every clip and write a report");
  add_scenario_flags(evaluate, sa, ca);
  add_eval_flags(evaluate, ea);

  auto* sweep = app.add_subcommand("sweep", "Accuracy versus pose noise");
  add_scenario_flags(sweep, sa, ca);
  add_eval_flags(sweep, ea);
  std::vector<double> sweep_sigmas(std::begin(kDefaultSweep), std::end(kDefaultSweep));
  sweep->add_option("--sigma-pose-list", sweep_sigmas, "Pose noise levels")->delimiter(',');

  auto* report = app.add_subcommand("report", "Print the metric table of a report");
  std::string report_in;
  report->add_option("--in", report_in, "Report directory or report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*simulate) {
      const Scenario s = resolve_scenario(sa, ca);
      const Scene scene = generate_scene(s, ca.threads);
      save_scene(scene, sim_out);
      std::printf("wrote %zu clips to %s (config %s)\n", scene.clips.size(), sim_out.c_str(),
                  config_hash(s).c_str());
    } else if (*fit) {
      if (fit_k < 1) throw ValidationError("k", "must be >= 1");
      const Scenario s = resolve_scenario(sa, ca);
      const ActionCodebook cb = fit_scene_codebook(s, fit_k, ca.seed, ca.threads);
      save_codebook(cb, fit_out);
      std::printf("wrote codebook k=%d to %s\n", cb.k(), fit_out.c_str());
    } else if (*evaluate) {
      RunConfig cfg = make_run_config(resolve_scenario(sa, ca), ea, ca);
      if (!sa.scene.empty()) {
        cfg.scenario.reset();
        cfg.scenario_path = sa.scene;
      }
      const MetricsReport r = run_evaluation(cfg);
      print_summary(report_to_json(r));
    } else if (*sweep) {
      const RunConfig cfg = make_run_config(resolve_scenario(sa, ca), ea, ca);
      const auto rows = run_sweep(cfg, sweep_sigmas);
      std::error_code ec;
      fs::create_directories(ea.out, ec);
      if (ec) throw IoError(ea.out, "cannot create output directory");
      write_sweep_csv(rows, fs::path(ea.out) / "sweep.csv");
      std::printf("sigma_pose  accuracy  filtered\n");
      for (const auto& row : rows) {
        std::printf("%-10.4f  %.4f    %.4f\n", row.sigma_pose, row.accuracy,
                    row.filtered_accuracy);
      }
    } else if (*report) {
      fs::path p = report_in;
      if (fs::is_directory(p)) p /= "report.json";
      print_summary(read_json_file(p));
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
