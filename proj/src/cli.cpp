#include "cmcf/cli.hpp"

#include "cmcf/metrics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

namespace cmcf::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class PhaseTimer {
public:
  void start(const std::string& name) {
    name_ = name;
    t0_ = std::chrono::steady_clock::now();
  }
  void stop() {
    auto dt = std::chrono::steady_clock::now() - t0_;
    timings_[name_] = std::chrono::duration<double>(dt).count();
  }
  json to_json() const { return json(timings_); }

private:
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
  std::map<std::string, double> timings_;
};

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setw(2) << j << '\n';
}

json config_json(const FlowConfig& c) {
  return {{"mode", to_string(c.mode)},
          {"tau", c.tau},
          {"mass", to_string(c.mass_scheme)},
          {"max_steps", c.max_steps},
          {"stop_sphericity", c.stop_sphericity},
          {"normalize", to_string(c.normalization)},
          {"degeneracy_area_ratio", c.degeneracy_area_ratio},
          {"snapshot_every", c.snapshot_every},
          {"solve_tolerance", c.solve_tolerance}};
}

json report_json(const ConformalityReport& r) {
  json j = to_json(r);
  return j;
}

} // namespace

int cmd_validate(const fs::path& input, std::ostream& out, std::ostream& err) {
  TriangleMesh mesh;
  try {
    mesh = load_mesh(input);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  ValidationReport rep = validate_closed_genus_zero(mesh);
  out << rep.summary();
  return rep.eligible() ? kExitOk : kExitFailed;
}

int cmd_metrics(const MetricsOptions& opts, std::ostream& out, std::ostream& err) {
  TriangleMesh orig, mapped;
  try {
    orig = load_mesh(opts.orig);
    mapped = load_mesh(opts.mapped);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!same_connectivity(orig, mapped)) {
    err << "error: meshes do not share connectivity (" << orig.num_vertices() << "/" << orig.num_faces() << " vs "
        << mapped.num_vertices() << "/" << mapped.num_faces() << " vertices/faces)\n";
    return kExitUsage;
  }
  try {
    ConformalityReport rep = summarize(orig, mapped, opts.degenerate_ratio);
    json j = report_json(rep);
    j["termination"] = nullptr;
    j["steps"] = nullptr;
    if (opts.out_dir) {
      fs::create_directories(*opts.out_dir);
      write_json(j, *opts.out_dir / "metrics.json");
      write_elements_csv(rep, orig, edge_flaps(orig), *opts.out_dir / "elements.csv");
    }
    out << std::setw(2) << j << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  PhaseTimer timer;
  json manifest;
  manifest["tool_version"] = kVersion;
  manifest["input"] = opts.input.string();
  manifest["output_dir"] = opts.out_dir.string();
  manifest["config"] = config_json(opts.flow);
  manifest["config"]["project_sphere"] = opts.project_sphere;

  try {
    opts.flow.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  TriangleMesh mesh;
  timer.start("load");
  try {
    mesh = load_mesh(opts.input);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  timer.stop();

  timer.start("validate");
  ValidationReport check = validate_closed_genus_zero(mesh);
  timer.stop();
  if (opts.flow.mode == FlowMode::CMCF && !check.eligible()) {
    err << "error: input is not a closed genus-zero surface with positive face areas\n" << check.summary();
    return kExitUsage;
  }

  std::vector<std::string> outputs;
  FlowResult result;
  try {
    fs::create_directories(opts.out_dir);
    if (opts.dump_matrices) {
      write_matrix_market(assemble_stiffness(mesh), opts.out_dir / "stiffness0.mtx");
      write_matrix_market(assemble_mass(mesh, opts.flow.mass_scheme), opts.out_dir / "mass0.mtx");
      outputs.push_back("stiffness0.mtx");
      outputs.push_back("mass0.mtx");
    }
    if (opts.flow.snapshot_every > 0) fs::create_directories(opts.out_dir / "snapshots");
    timer.start("flow");
    result = run_flow(mesh, opts.flow, [&](int step, const TriangleMesh& m) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/step_%04d.obj", step);
      save_obj(m, opts.out_dir / name);
      outputs.emplace_back(name);
    });
    timer.stop();
  } catch (const FlowInputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  timer.start("metrics");
  ConformalityReport report = summarize(mesh, result.mesh, opts.flow.degeneracy_area_ratio);
  json metrics = report_json(report);
  metrics["termination"] = to_string(result.termination);
  metrics["steps"] = result.steps();
  metrics["initial_sphericity"] = result.initial_sphericity;
  if (opts.project_sphere && result.sphere_projection) {
    ConformalityReport projected = summarize(mesh, *result.sphere_projection, opts.flow.degeneracy_area_ratio);
    metrics["projected"] = report_json(projected);
  }
  timer.stop();

  timer.start("write");
  save_obj(result.mesh, opts.out_dir / "final.obj");
  outputs.push_back("final.obj");
  if (opts.project_sphere && result.sphere_projection) {
    save_obj(*result.sphere_projection, opts.out_dir / "sphere.obj");
    outputs.push_back("sphere.obj");
  }
  write_json(metrics, opts.out_dir / "metrics.json");
  outputs.push_back("metrics.json");
  write_elements_csv(report, mesh, edge_flaps(mesh), opts.out_dir / "elements.csv");
  outputs.push_back("elements.csv");
  write_history_csv(result.history, opts.out_dir / "history.csv");
  outputs.push_back("history.csv");
  timer.stop();

  manifest["termination"] = to_string(result.termination);
  manifest["message"] = result.message;
  manifest["outputs"] = outputs;
  manifest["timings_seconds"] = timer.to_json();
  outputs.push_back("manifest.json");
  manifest["outputs"] = outputs;
  write_json(manifest, opts.out_dir / "manifest.json");

  out << "termination: " << to_string(result.termination) << " after " << result.steps() << " steps\n"
      << "sphericity: " << std::setprecision(6) << result.initial_sphericity << " -> " << report.sphericity << '\n'
      << "angular distortion: mean " << report.angular_summary.mean << " std " << report.angular_summary.std << '\n'
      << "lcr deviation: mean " << report.lcr_summary.mean << " std " << report.lcr_summary.std << '\n'
      << "valid: " << (report.valid ? "yes" : "no") << '\n';
  if (!result.message.empty()) out << "note: " << result.message << '\n';

  switch (result.termination) {
  case Termination::SphericityReached: return kExitOk;
  case Termination::MaxSteps: return kExitMaxSteps;
  default: return kExitFailed;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Spherical conformal parametrization by conformalized mean curvature flow"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunOptions run;
  std::string mode = "cmcf", mass = "galerkin", normalize_mode = "area-center";
  auto* run_cmd = app.add_subcommand("run", "Flow a mesh and write the result, metrics and history");
  run_cmd->add_option("--input", run.input, "Input mesh (.obj or .off)")->required();
  run_cmd->add_option("--mode", mode, "Flow variant")->check(CLI::IsMember({"mcf", "cmcf"}))->capture_default_str();
  run_cmd->add_option("--tau", run.flow.tau, "Time step")->capture_default_str();
  run_cmd->add_option("--max-steps", run.flow.max_steps, "Step limit")->capture_default_str();
  run_cmd->add_option("--stop-sphericity", run.flow.stop_sphericity, "Stop once sphericity reaches this")
      ->capture_default_str();
  run_cmd->add_option("--mass", mass, "Mass matrix")->check(CLI::IsMember({"galerkin", "lumped"}))->capture_default_str();
  run_cmd->add_option("--normalize", normalize_mode, "Per-step normalization")
      ->check(CLI::IsMember({"area-center", "area", "none"}))
      ->capture_default_str();
  run_cmd->add_option("--snapshot-every", run.flow.snapshot_every, "Write an OBJ every N steps (0: off)")
      ->capture_default_str();
  run_cmd->add_option("--degeneracy-ratio", run.flow.degeneracy_area_ratio,
                      "Face area / mean face area below which a face counts as collapsed")
      ->capture_default_str();
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory")->capture_default_str();
  run_cmd->add_flag("--project-sphere", run.project_sphere, "Also write the unit-sphere projection");
  run_cmd->add_flag("--dump-matrices", run.dump_matrices, "Write initial stiffness and mass (Matrix Market)");

  MetricsOptions metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Conformality report for two meshes with shared connectivity");
  metrics_cmd->add_option("original", metrics.orig, "Reference mesh")->required();
  metrics_cmd->add_option("mapped", metrics.mapped, "Mapped mesh")->required();
  metrics_cmd->add_option("--out-dir", metrics.out_dir, "Also write metrics.json and elements.csv here");
  metrics_cmd->add_option("--degeneracy-ratio", metrics.degenerate_ratio, "Collapsed-face threshold")
      ->capture_default_str();

  fs::path validate_input;
  auto* validate_cmd = app.add_subcommand("validate", "Check that a mesh is a closed genus-zero surface");
  validate_cmd->add_option("input", validate_input, "Mesh to check")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*run_cmd) {
    run.flow.mode = mode == "mcf" ? FlowMode::MCF : FlowMode::CMCF;
    run.flow.mass_scheme = mass == "lumped" ? MassScheme::Lumped : MassScheme::Galerkin;
    run.flow.normalization = normalize_mode == "area"   ? Normalization::AreaOnly
                             : normalize_mode == "none" ? Normalization::None
                                                        : Normalization::AreaCenter;
    return cmd_run(run, std::cout, std::cerr);
  }
  if (*metrics_cmd) return cmd_metrics(metrics, std::cout, std::cerr);
  return cmd_validate(validate_input, std::cout, std::cerr);
}

} // namespace cmcf::cli
