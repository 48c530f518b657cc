// Command-line surface for the retargeting library: retarget, evaluate,
// bench, and synth. Exit codes: 0 success, 1 validation/input error,
// 2 runtime error (optimizer divergence, unwritable outputs).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "retarget/io_bvh.hpp"
#include "retarget/io_json.hpp"
#include "retarget/io_obj.hpp"
#include "retarget/metrics.hpp"
#include "retarget/optimizer.hpp"
#include "retarget/proximity.hpp"
#include "retarget/scene.hpp"
#include "retarget/spatial_loss.hpp"

namespace {

using nlohmann::json;
using namespace retarget;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

int env_threads() {
  const char* value = std::getenv("RETARGET_THREADS");
  if (!value) return 0;
  return std::atoi(value);
}

std::vector<int> limb_joint_union(const LimbConfig& config) {
  std::vector<int> joints;
  for (int l = 0; l < kLimbCount; ++l)
    joints.insert(joints.end(), config.limb_joints[l].begin(), config.limb_joints[l].end());
  return joints;
}

json metrics_json(const SceneMetrics& m) {
  return {{"pen_rate", m.pen_rate},
          {"curvature", m.curvature},
          {"mse_vs_copy", m.mse_vs_copy},
          {"local_mse_vs_copy", m.local_mse_vs_copy}};
}

json trace_json(const std::vector<LossTraceRow>& trace) {
  json rows = json::array();
  for (const LossTraceRow& row : trace) {
    json r = {{"iteration", row.iteration}, {"total", row.total}, {"best", row.best}};
    if (row.terms.lp) r["lp"] = *row.terms.lp;
    if (row.terms.con) r["con"] = *row.terms.con;
    if (row.terms.tc) r["tc"] = *row.terms.tc;
    if (row.terms.j) r["j"] = *row.terms.j;
    if (row.terms.rec) r["rec"] = *row.terms.rec;
    rows.push_back(std::move(r));
  }
  return rows;
}

struct RetargetArgs {
  std::string source_bvh, source_obj, source_weights, target_obj, target_weights;
  std::string config_path, preset = "final", out_bvh, report_path;
  int threads = 0;
};

int cmd_retarget(const RetargetArgs& args) {
  BvhData source_data = parse_bvh(read_file(args.source_bvh));
  WeightsSidecar source_sidecar = parse_weights_sidecar(read_file(args.source_weights));
  SkinnedCharacter source_char =
      build_character(parse_obj(read_file(args.source_obj)), source_sidecar, &source_data.skeleton);
  WeightsSidecar target_sidecar = parse_weights_sidecar(read_file(args.target_weights));
  SkinnedCharacter target_char =
      build_character(parse_obj(read_file(args.target_obj)), target_sidecar, &source_data.skeleton);

  RunConfig config;
  if (!args.config_path.empty()) config = parse_run_config(read_file(args.config_path));
  if (args.preset == "final")
    config.optimizer.weights = preset_final();
  else if (args.preset == "curv")
    config.optimizer.weights = preset_curv();
  else
    throw DomainError("unknown preset '" + args.preset + "' (expected final|curv)");
  if (args.threads > 0) config.optimizer.threads = args.threads;

  RetargetReport report =
      optimize_sequence(source_data.motion, source_char, target_char, config.optimizer);

  write_file(args.out_bvh, write_bvh(target_char.skeleton, report.result));
  json out = {{"preset", args.preset},
              {"iterations_run", report.trace.size()},
              {"initial_loss", report.initial_loss},
              {"final_loss", report.final_loss},
              {"best_iteration", report.best_iteration},
              {"converged", report.converged},
              {"diverged", report.diverged},
              {"metrics_before", metrics_json(report.before)},
              {"metrics_after", metrics_json(report.after)},
              {"source_curvature", report.source_curvature},
              {"wall_ms", report.wall_ms},
              {"trace", trace_json(report.trace)}};
  write_file(args.report_path, out.dump(1) + "\n");

  std::cout << "retarget: " << report.trace.size() << " iterations, loss " << report.initial_loss
            << " -> " << report.final_loss << "\n"
            << "pen_rate " << report.before.pen_rate << "% -> " << report.after.pen_rate << "%, "
            << "curvature " << report.before.curvature << " -> " << report.after.curvature << "\n"
            << "report: " << args.report_path << "\nbvh: " << args.out_bvh << "\n";
  if (report.diverged) {
    std::cerr << "error: optimization diverged (loss exceeded 10x initial)\n";
    return 2;
  }
  return 0;
}

struct EvaluateArgs {
  std::string pred_bvh, gt_bvh, obj, weights, report_path, csv_path;
  int threads = 0;
};

int cmd_evaluate(const EvaluateArgs& args) {
  auto start = std::chrono::steady_clock::now();
  BvhData pred = parse_bvh(read_file(args.pred_bvh));
  BvhData gt = parse_bvh(read_file(args.gt_bvh));
  if (pred.motion.frame_count != gt.motion.frame_count ||
      pred.motion.joint_count != gt.motion.joint_count)
    throw ShapeError("prediction and ground truth have different T or K");
  WeightsSidecar sidecar = parse_weights_sidecar(read_file(args.weights));
  SkinnedCharacter character =
      build_character(parse_obj(read_file(args.obj)), sidecar, &gt.skeleton);
  LimbSegmentation segmentation = segment_limbs(character, character.limbs);

  MetricsReport metrics;
  metrics.mse = mse(pred.motion, pred.skeleton, gt.motion, gt.skeleton);
  metrics.mse_local = local_mse(pred.motion, pred.skeleton, gt.motion, gt.skeleton);
  PenetrationOptions options;
  options.threads = args.threads;
  metrics.pen_rate = penetration_rate(character, segmentation, pred.motion, 0.0, options);
  std::vector<int> limb_joints = limb_joint_union(character.limbs);
  metrics.curvature = curvature(pred.motion, pred.skeleton, limb_joints, &metrics.per_joint_curvature);
  double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::string sequence_id = std::filesystem::path(args.pred_bvh).stem().string();
  json out = {{"sequence_id", sequence_id}, {"mse", metrics.mse},
              {"mse_local", metrics.mse_local}, {"pen_rate", metrics.pen_rate},
              {"curvature", metrics.curvature}, {"wall_ms", wall_ms}};
  write_file(args.report_path, out.dump(1) + "\n");
  if (!args.csv_path.empty()) append_metrics_csv(args.csv_path, sequence_id, metrics, wall_ms);
  std::cout << metrics_kv(metrics, wall_ms);
  return 0;
}

struct BenchArgs {
  std::string scene = "slim_to_fat";
  std::string sizes = "50:500,100:1000,200:2000,400:4000";
  int repeats = 3;
  std::string report_path;
  int threads = 0;
};

int cmd_bench(const BenchArgs& args) {
  if (args.repeats < 1) throw DomainError("repeats must be at least 1");
  SceneSpec spec;
  spec.id = args.scene;
  spec.frames = 20;
  spec.density = 1.6;  // dense enough for the largest reference tier
  SceneAssets assets = generate_scene(spec);
  LimbSegmentation segmentation = segment_limbs(assets.target, assets.target.limbs);

  std::vector<std::pair<int, int>> tiers;
  std::stringstream sizes(args.sizes);
  std::string token;
  while (std::getline(sizes, token, ',')) {
    size_t colon = token.find(':');
    if (colon == std::string::npos) throw DomainError("sizes must be query:reference pairs");
    tiers.emplace_back(std::stoi(token.substr(0, colon)), std::stoi(token.substr(colon + 1)));
  }

  std::ostringstream csv;
  csv << "method,query_count,reference_count,mean_seconds,speedup,loss\n";
  std::cout << "method        queries  references  mean_s      speedup  loss\n";
  for (auto [queries, references] : tiers) {
    SampleCounts counts;
    counts.shape = 256;
    counts.limb_query = queries;
    counts.limb_reference = references;
    PointSample sample = sample_points(assets.target, segmentation, counts, spec.seed);

    double times[2] = {0.0, 0.0};
    double losses[2] = {0.0, 0.0};
    for (int method = 0; method < 2; ++method) {
      PenetrationOptions options;
      options.brute_force = method == 0;
      options.threads = args.threads;
      double best = std::numeric_limits<double>::infinity();
      for (int rep = 0; rep < args.repeats; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        PenetrationBreakdown out =
            limb_penetration_loss(assets.target, segmentation, sample, assets.motion, options);
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        best = std::min(best, seconds);
        losses[method] = out.total;
      }
      times[method] = best;
    }
    if (losses[0] != losses[1]) throw NumericError("tree and brute-force losses disagree");
    const char* names[2] = {"brute_force", "tree"};
    for (int method = 0; method < 2; ++method) {
      double speedup = method == 0 ? 1.0 : times[0] / times[1];
      csv << names[method] << ',' << queries << ',' << references << ',' << times[method] << ','
          << speedup << ',' << losses[method] << "\n";
      std::printf("%-13s %7d  %10d  %.6f    %6.2f   %.9g\n", names[method], queries, references,
                  times[method], speedup, losses[method]);
    }
  }
  if (!args.report_path.empty()) write_file(args.report_path, csv.str());
  return 0;
}

struct SynthArgs {
  std::string scene;
  std::string params;
  std::string out_dir;
};

int cmd_synth(const SynthArgs& args) {
  SceneSpec spec;
  if (!args.params.empty()) spec = parse_run_config("{\"scene\": " + args.params + "}").scene;
  if (!args.scene.empty()) spec.id = args.scene;
  spec.validate();
  SceneAssets assets = generate_scene(spec);

  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  auto path = [&](const char* name) { return (std::filesystem::path(args.out_dir) / name).string(); };
  try {
    write_file(path("source.bvh"), write_bvh(assets.source.skeleton, assets.motion));
    ObjData source_mesh{assets.source.vertices, assets.source.normals, assets.source.faces};
    write_file(path("source.obj"), write_obj(source_mesh));
    ObjData target_mesh{assets.target.vertices, assets.target.normals, assets.target.faces};
    write_file(path("target.obj"), write_obj(target_mesh));
    write_file(path("weights.json"), write_weights_sidecar(sidecar_from_character(assets.source)));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << "synth: wrote source.bvh source.obj target.obj weights.json to " << args.out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimization-based skinned motion retargeting"};
  app.require_subcommand(1);
  int threads = env_threads();
  app.add_option("--threads", threads, "Worker threads (0 = hardware)")->capture_default_str();

  RetargetArgs retarget_args;
  CLI::App* retarget_cmd = app.add_subcommand("retarget", "Optimize a motion onto a target character");
  retarget_cmd->add_option("--source-bvh", retarget_args.source_bvh)->required();
  retarget_cmd->add_option("--source-obj", retarget_args.source_obj)->required();
  retarget_cmd->add_option("--source-weights", retarget_args.source_weights)->required();
  retarget_cmd->add_option("--target-obj", retarget_args.target_obj)->required();
  retarget_cmd->add_option("--target-weights", retarget_args.target_weights)->required();
  retarget_cmd->add_option("--config", retarget_args.config_path, "JSON run configuration");
  retarget_cmd->add_option("--preset", retarget_args.preset, "Loss weight preset: final|curv")
      ->capture_default_str();
  retarget_cmd->add_option("--out-bvh", retarget_args.out_bvh)->required();
  retarget_cmd->add_option("--report", retarget_args.report_path)->required();

  EvaluateArgs evaluate_args;
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Compute metrics against a ground truth");
  evaluate_cmd->add_option("--pred-bvh", evaluate_args.pred_bvh)->required();
  evaluate_cmd->add_option("--gt-bvh", evaluate_args.gt_bvh)->required();
  evaluate_cmd->add_option("--obj", evaluate_args.obj)->required();
  evaluate_cmd->add_option("--weights", evaluate_args.weights)->required();
  evaluate_cmd->add_option("--report", evaluate_args.report_path)->required();
  evaluate_cmd->add_option("--csv", evaluate_args.csv_path, "Append a row to this results file");

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Tree vs brute-force penetration benchmark");
  bench_cmd->add_option("--scene", bench_args.scene)->capture_default_str();
  bench_cmd->add_option("--sizes", bench_args.sizes, "query:reference tiers")->capture_default_str();
  bench_cmd->add_option("--repeats", bench_args.repeats)->capture_default_str();
  bench_cmd->add_option("--report", bench_args.report_path, "CSV output path");

  SynthArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write synthetic scene assets");
  synth_cmd->add_option("--scene", synth_args.scene, "Scene id: arm_sweep|slim_to_fat");
  synth_cmd->add_option("--params", synth_args.params, "Scene parameters as a JSON object");
  synth_cmd->add_option("--out-dir", synth_args.out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    retarget_args.threads = threads;
    evaluate_args.threads = threads;
    bench_args.threads = threads;
    if (retarget_cmd->parsed()) return cmd_retarget(retarget_args);
    if (evaluate_cmd->parsed()) return cmd_evaluate(evaluate_args);
    if (bench_cmd->parsed()) return cmd_bench(bench_args);
    if (synth_cmd->parsed()) return cmd_synth(synth_args);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
