// Command-line front end: synthesizes test videos, extracts ridge
// trajectories, and scores recovered trajectories against references.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ridgetrack/report.hpp"
#include "ridgetrack/ridgetrack.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ridgetrack;

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;

std::string digits6(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

int default_threads() {
  if (const char* env = std::getenv("RIDGETRACK_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) return static_cast<int>(v);
    std::cerr << "warning: ignoring malformed RIDGETRACK_THREADS='" << env << "'\n";
  }
  return 0;
}

struct SimulateArgs {
  std::string preset;
  std::string spec_file;
  std::string out_dir = ".";
  std::string name;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool no_noise = false;
};

int run_simulate(const SimulateArgs& args) {
  SimulationSpec spec;
  if (!args.spec_file.empty()) {
    std::ifstream in(args.spec_file);
    if (!in) throw IoError("cannot open " + args.spec_file);
    spec = parse_simulation_spec(in);
  }
  if (!args.preset.empty()) {
    SimulationSpec chosen = preset_spec(args.preset);
    if (!args.spec_file.empty()) {
      // flags modify the file-supplied spec; the preset only replaces the
      // trajectory and amplitude content
      chosen.width = spec.width;
      chosen.height = spec.height;
      chosen.frames = spec.frames;
      chosen.baseline = spec.baseline;
      chosen.poisson = spec.poisson;
      chosen.seed = spec.seed;
    }
    spec = chosen;
  }
  if (args.seed_set) spec.seed = args.seed;
  if (args.no_noise) spec.poisson = false;
  if (!args.name.empty()) spec.name = args.name;
  validate_and_resolve(spec);

  fs::create_directories(args.out_dir);
  fs::path base = fs::path(args.out_dir) / spec.name;
  VideoTensor clean = render_clean(spec);
  save_tensor(clean, (base.string() + "_clean.bin"));
  std::cout << "wrote " << base.string() + "_clean.bin" << "\n";
  if (spec.poisson) {
    VideoTensor noisy = apply_poisson(clean, spec.seed);
    save_tensor(noisy, (base.string() + "_noisy.bin"));
    std::cout << "wrote " << base.string() + "_noisy.bin" << "\n";
  }
  save_trajectory_csv(truth_trajectory(spec), base.string() + "_truth.csv", spec.width,
                      spec.height);
  std::cout << "wrote " << base.string() + "_truth.csv" << "\n";
  std::cout << "frames=" << spec.frames << " seed=" << spec.seed
            << " noise=" << (spec.poisson ? "poisson" : "none") << "\n";
  return 0;
}

struct DetectArgs {
  std::string input;
  std::string output = "trajectory.csv";
  std::string report_base;
  std::string window = "7";
  int oversample = 0;
  DetectConfig cfg;
};

int run_detect(DetectArgs& args) {
  if (args.window == "full") {
    args.cfg.transition.window = TransitionParams::kFullWindow;
  } else {
    char* end = nullptr;
    long w = std::strtol(args.window.c_str(), &end, 10);
    if (end == args.window.c_str() || *end != '\0')
      throw ConfigError("--window takes a positive integer or 'full'");
    args.cfg.transition.window = static_cast<int>(w);
  }
  args.cfg.validate();

  VideoTensor video = load_video(args.input);
  auto begin = std::chrono::steady_clock::now();
  DetectResult result = detect(video, args.cfg);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();

  save_trajectory_csv(result.records, args.output, video.width(), video.height());

  std::string base = args.report_base.empty() ? args.output : args.report_base;
  write_report_text(result, args.cfg, video.width(), video.height(), video.frames(),
                    base + ".report.txt");
  write_report_json(result, args.cfg, video.width(), video.height(), video.frames(),
                    base + ".report.json");

  if (args.oversample > 0) {
    std::ofstream dense(args.output + ".dense.csv", std::ios::trunc);
    if (!dense) throw IoError("cannot create " + args.output + ".dense.csv");
    dense << "t,u,w\n";
    char line[120];
    long steps = static_cast<long>(video.frames() - 1) * args.oversample;
    for (long i = 0; i <= steps; ++i) {
      double t = double(i) / args.oversample;
      Vec3 p = result.curve.evaluate(t);
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", t, p.x, p.y);
      dense << line;
    }
  }

  double mean_max = 0.0;
  for (double m : result.frame_max_psi) mean_max += m;
  if (!result.frame_max_psi.empty()) mean_max /= double(result.frame_max_psi.size());
  std::cout << "frames=" << video.frames() << " runtime=" << digits6(seconds)
            << "s mean-max-psi=" << digits6(mean_max) << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string ref_path, test_path;
  std::string output;
  std::string mask;
};

int run_evaluate(const EvaluateArgs& args) {
  std::optional<std::pair<double, double>> mask;
  if (!args.mask.empty()) {
    std::size_t colon = args.mask.find(':');
    if (colon == std::string::npos) throw ConfigError("--mask takes BEGIN:END");
    try {
      mask = {std::stod(args.mask.substr(0, colon)), std::stod(args.mask.substr(colon + 1))};
    } catch (const std::exception&) {
      throw ConfigError("--mask takes BEGIN:END with numeric bounds");
    }
  }
  EvaluationReport report =
      evaluate(load_trajectory_csv(args.ref_path), load_trajectory_csv(args.test_path), mask);
  if (!args.output.empty()) save_evaluation_csv(report, args.output);

  auto print_summary = [](const char* label, const EvaluationSummary& s) {
    std::cout << label << ": frames=" << s.count << " mean=" << digits6(s.mean)
              << " rmse=" << digits6(s.rmse) << " max=" << digits6(s.max)
              << " below-1px=" << digits6(s.frac_below_1px) << "\n";
  };
  print_summary("overall", report.overall);
  if (report.has_mask) print_summary("masked", report.masked);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ridge trajectory extraction from gray-scale video tensors"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Render a synthetic valley video");
  simulate->add_option("--preset", sim.preset, "Trajectory preset: gamma1, gamma2 or gamma3");
  simulate->add_option("--spec", sim.spec_file, "Key=value spec file");
  simulate->add_option("--seed", sim.seed, "Noise seed")->each([&](const std::string&) {
    sim.seed_set = true;
  });
  simulate->add_flag("--no-noise", sim.no_noise, "Skip the Poisson noise pass");
  simulate->add_option("--out-dir", sim.out_dir, "Output directory");
  simulate->add_option("--name", sim.name, "Output file stem");

  DetectArgs det;
  det.cfg.threads = default_threads();
  CLI::App* detect_cmd = app.add_subcommand("detect", "Extract the ridge trajectory");
  detect_cmd->add_option("input", det.input, "Input tensor file or PGM directory")->required();
  detect_cmd->add_option("-o,--output", det.output, "Trajectory CSV path");
  detect_cmd->add_option("--report", det.report_base,
                         "Diagnostics base path (default: the output path)");
  detect_cmd->add_option("--sigma", det.cfg.scales.sigma, "Spatial smoothing scale");
  detect_cmd->add_option("--delta", det.cfg.scales.delta, "Temporal smoothing scale");
  detect_cmd->add_option("--truncate", det.cfg.scales.truncate,
                         "Kernel truncation radius in scale units");
  detect_cmd->add_option("--tangent-cap", det.cfg.scoring.tangent_cap,
                         "Spatial speed cap for candidate tangents, px/frame");
  detect_cmd->add_flag("--no-hatted", [&](std::int64_t) { det.cfg.scoring.use_hatted = false; },
                       "Disable the gradient-yielded weight branch");
  detect_cmd->add_option("--window", det.window, "Transition window radius or 'full'");
  detect_cmd->add_option("--bandwidth", det.cfg.bandwidth, "Curve smoothing bandwidth, frames");
  detect_cmd->add_option("--alpha", det.cfg.alpha, "Confidence level for the ellipses");
  detect_cmd->add_flag("--negate", det.cfg.negate_input,
                       "Negate the input first (track valleys)");
  detect_cmd->add_option("--oversample", det.oversample,
                         "Also write a dense curve CSV with this many samples per frame");
  detect_cmd->add_option("--threads", det.cfg.threads, "Worker threads (0 = hardware)");

  EvaluateArgs ev;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "Compare two trajectory CSVs frame by frame");
  evaluate_cmd->add_option("reference", ev.ref_path, "Reference trajectory CSV")->required();
  evaluate_cmd->add_option("candidate", ev.test_path, "Candidate trajectory CSV")->required();
  evaluate_cmd->add_option("-o,--output", ev.output, "Per-frame deviation CSV path");
  evaluate_cmd->add_option("--mask", ev.mask,
                           "Exclude frames in BEGIN:END from the masked summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (detect_cmd->parsed()) return run_detect(det);
    return run_evaluate(ev);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
