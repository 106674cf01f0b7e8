#include "cmcf/flow.hpp"

#include "cmcf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace cmcf {

void FlowConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  if (!(stop_sphericity > 0.0 && stop_sphericity <= 1.0)) {
    throw std::invalid_argument("stop sphericity must lie in (0, 1]");
  }
  if (max_steps < 0) throw std::invalid_argument("max steps must be non-negative");
  if (!(degeneracy_area_ratio >= 0.0)) throw std::invalid_argument("degeneracy ratio must be non-negative");
  if (snapshot_every < 0) throw std::invalid_argument("snapshot interval must be non-negative");
  if (!(solve_tolerance > 0.0)) throw std::invalid_argument("solve tolerance must be positive");
}

const char* to_string(FlowMode m) { return m == FlowMode::MCF ? "mcf" : "cmcf"; }

const char* to_string(Normalization n) {
  switch (n) {
  case Normalization::AreaCenter: return "area-center";
  case Normalization::AreaOnly: return "area";
  case Normalization::None: return "none";
  }
  return "unknown";
}

const char* to_string(Termination t) {
  switch (t) {
  case Termination::SphericityReached: return "sphericity_reached";
  case Termination::MaxSteps: return "max_steps";
  case Termination::Degenerate: return "degenerate";
  case Termination::SolverFailed: return "solver_failed";
  }
  return "unknown";
}

const char* to_string(MassScheme s) { return s == MassScheme::Galerkin ? "galerkin" : "lumped"; }

FlowState make_flow_state(const TriangleMesh& mesh, const FlowConfig& cfg) {
  FlowState state;
  state.positions = mesh.vertices;
  state.target_area = total_area(mesh);
  if (cfg.mode == FlowMode::CMCF) state.stiffness0 = assemble_stiffness(mesh);
  return state;
}

namespace {

StepOutput implicit_step(const FlowState& state, const TriangleMesh& mesh, const FlowConfig& cfg,
                         const SparseSymMatrix* frozen_stiffness) {
  if (cfg.tau == 0.0) return {state.positions, {}};
  TriangleMesh current = mesh.with_positions(state.positions);

  auto degeneracy = detect_degeneracy(state.positions, mesh, cfg.degeneracy_area_ratio);
  if (degeneracy.count() > 0) {
    throw FlowStepError(Termination::Degenerate,
                        std::to_string(degeneracy.count()) + " degenerate faces before step " +
                            std::to_string(state.step + 1));
  }

  SparseSymMatrix mass, stiffness;
  try {
    mass = assemble_mass(current, cfg.mass_scheme);
    if (!frozen_stiffness) stiffness = assemble_stiffness(current);
  } catch (const AssemblyError& e) {
    throw FlowStepError(Termination::Degenerate, e.what());
  }
  const SparseSymMatrix& L = frozen_stiffness ? *frozen_stiffness : stiffness;
  SparseSymMatrix system = SparseSymMatrix::combine(1.0, mass, -cfg.tau, L);
  Eigen::MatrixXd rhs = mass * Eigen::MatrixXd(state.positions);

  SolveOptions options;
  options.tolerance = cfg.solve_tolerance;
  StepOutput out;
  out.solve = solve_spd(system, rhs, options);
  if (!out.solve.ok()) {
    throw FlowStepError(Termination::SolverFailed, "linear solve failed at step " +
                                                       std::to_string(state.step + 1) + ": " + out.solve.message);
  }
  if (!out.solve.solution.allFinite()) {
    throw FlowStepError(Termination::SolverFailed, "non-finite positions at step " + std::to_string(state.step + 1));
  }
  out.positions = out.solve.solution;
  return out;
}

} // namespace

StepOutput mcf_step(const FlowState& state, const TriangleMesh& mesh, const FlowConfig& cfg) {
  return implicit_step(state, mesh, cfg, nullptr);
}

StepOutput cmcf_step(const FlowState& state, const TriangleMesh& mesh, const FlowConfig& cfg) {
  if (!state.stiffness0) throw std::logic_error("cmcf_step: initial stiffness not assembled");
  return implicit_step(state, mesh, cfg, &*state.stiffness0);
}

Positions normalize(const Positions& positions, const TriangleMesh& connectivity, double target_area,
                    Normalization mode) {
  if (mode == Normalization::None) return positions;
  TriangleMesh current = connectivity.with_positions(positions);
  double area = total_area(current);
  if (!(area > 0.0) || !std::isfinite(area)) {
    throw FlowStepError(Termination::Degenerate, "total area vanished during normalization");
  }
  Positions out = positions;
  if (mode == Normalization::AreaCenter) {
    Vec3 c = area_centroid(current);
    out.rowwise() -= c.transpose();
  }
  out *= std::sqrt(target_area / area);
  return out;
}

DegeneracyReport detect_degeneracy(const Positions& positions, const TriangleMesh& connectivity,
                                   double ratio_threshold) {
  TriangleMesh current = connectivity.with_positions(positions);
  auto areas = face_areas(current);
  DegeneracyReport rep;
  if (areas.empty()) return rep;
  double mean = 0.0;
  for (double a : areas) mean += a;
  mean /= static_cast<double>(areas.size());
  rep.worst_ratio = mean > 0.0 ? *std::min_element(areas.begin(), areas.end()) / mean : 0.0;
  for (std::size_t f = 0; f < areas.size(); ++f) {
    if (!(areas[f] >= ratio_threshold * mean) || face_angles(current, f).degenerate) rep.faces.push_back(f);
  }
  return rep;
}

TriangleMesh project_to_unit_sphere(const TriangleMesh& mesh) {
  Positions p = mesh.vertices;
  p.rowwise() -= area_centroid(mesh).transpose();
  p.rowwise().normalize();
  return mesh.with_positions(std::move(p));
}

FlowResult run_flow(const TriangleMesh& mesh, const FlowConfig& cfg, const SnapshotFn& snapshot) {
  cfg.validate();
  ValidationReport check = validate_closed_genus_zero(mesh);
  if (cfg.mode == FlowMode::CMCF && !check.eligible()) {
    throw FlowInputError("input is not a closed genus-zero mesh with positive face areas:\n" + check.summary());
  }
  if (cfg.mode == FlowMode::MCF &&
      !(check.indices_valid && check.closed && check.degenerate_faces.empty() && check.isolated_vertices == 0)) {
    throw FlowInputError("MCF needs a closed mesh with positive face areas:\n" + check.summary());
  }

  FlowState state = make_flow_state(mesh, cfg);
  FlowResult result;
  result.initial_sphericity = sphericity(mesh);
  result.termination = Termination::MaxSteps;

  double s = result.initial_sphericity;
  if (snapshot && cfg.snapshot_every > 0) snapshot(0, mesh);
  if (s >= cfg.stop_sphericity) {
    result.termination = Termination::SphericityReached;
  } else {
    while (state.step < cfg.max_steps) {
      try {
        StepOutput out = cfg.mode == FlowMode::CMCF ? cmcf_step(state, mesh, cfg) : mcf_step(state, mesh, cfg);
        Positions next = normalize(out.positions, mesh, state.target_area, cfg.normalization);
        state.positions = std::move(next);
        ++state.step;

        TriangleMesh current = mesh.with_positions(state.positions);
        auto degeneracy = detect_degeneracy(state.positions, mesh, cfg.degeneracy_area_ratio);
        StepRecord rec;
        rec.step = state.step;
        rec.sphericity = total_area(current) > 0.0 ? sphericity(current) : 0.0;
        rec.min_area_ratio = degeneracy.worst_ratio;
        rec.residual = out.solve.max_residual();
        rec.method = out.solve.method;
        state.history.push_back(rec);
        s = rec.sphericity;

        if (snapshot && cfg.snapshot_every > 0 && state.step % cfg.snapshot_every == 0) snapshot(state.step, current);
        if (degeneracy.count() > 0) {
          result.termination = Termination::Degenerate;
          result.message = std::to_string(degeneracy.count()) + " degenerate faces after step " +
                           std::to_string(state.step);
          break;
        }
        if (s >= cfg.stop_sphericity) {
          result.termination = Termination::SphericityReached;
          break;
        }
      } catch (const FlowStepError& e) {
        result.termination = e.reason();
        result.message = e.what();
        break;
      }
    }
  }

  result.mesh = mesh.with_positions(state.positions);
  result.history = std::move(state.history);
  result.degeneracy = detect_degeneracy(result.mesh.vertices, mesh, cfg.degeneracy_area_ratio);
  if (result.termination == Termination::SphericityReached) {
    result.sphere_projection = project_to_unit_sphere(result.mesh);
  }
  return result;
}

void write_history_csv(const std::vector<StepRecord>& history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV: " + path.string());
  out << std::setprecision(17);
  out << "step,sphericity,min_area_ratio,residual,method\n";
  for (const auto& r : history) {
    out << r.step << ',' << r.sphericity << ',' << r.min_area_ratio << ',' << r.residual << ','
        << to_string(r.method) << '\n';
  }
}

} // namespace cmcf
