#pragma once

#include "cmcf/fem.hpp"
#include "cmcf/mesh.hpp"
#include "cmcf/solver.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmcf {

enum class FlowMode { MCF, CMCF };
enum class Normalization { AreaCenter, AreaOnly, None };
enum class Termination { SphericityReached, MaxSteps, Degenerate, SolverFailed };

struct FlowConfig {
  FlowMode mode = FlowMode::CMCF;
  double tau = 0.05;
  MassScheme mass_scheme = MassScheme::Galerkin;
  int max_steps = 200;
  double stop_sphericity = 0.999;
  Normalization normalization = Normalization::AreaCenter;
  double degeneracy_area_ratio = 1e-8;
  int snapshot_every = 0;
  double solve_tolerance = 1e-10;

  // Throws std::invalid_argument.
  void validate() const;
};

struct StepRecord {
  int step = 0;
  double sphericity = 0.0;
  double min_area_ratio = 0.0;
  double residual = 0.0;
  SolveMethod method = SolveMethod::Cholesky;
};

struct FlowState {
  Positions positions;
  // Stiffness of the input surface; assembled once, used by every cMCF step.
  std::optional<SparseSymMatrix> stiffness0;
  int step = 0;
  double target_area = 0.0;
  std::vector<StepRecord> history;
};

struct DegeneracyReport {
  std::vector<std::size_t> faces;
  double worst_ratio = 0.0; // min face area / mean face area
  std::size_t count() const { return faces.size(); }
  bool metrics_valid() const { return faces.empty(); }
};

struct FlowResult {
  TriangleMesh mesh;
  Termination termination = Termination::MaxSteps;
  std::vector<StepRecord> history;
  double initial_sphericity = 0.0;
  DegeneracyReport degeneracy;
  std::string message;
  // Centered positions pushed onto the unit sphere; set only on success.
  std::optional<TriangleMesh> sphere_projection;

  int steps() const { return static_cast<int>(history.size()); }
};

class FlowStepError : public std::runtime_error {
public:
  FlowStepError(Termination reason, const std::string& what) : std::runtime_error(what), reason_(reason) {}
  Termination reason() const { return reason_; }

private:
  Termination reason_;
};

class FlowInputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Positions of the input mesh, its area as target, and (cMCF) the frozen
// initial stiffness.
FlowState make_flow_state(const TriangleMesh& mesh, const FlowConfig& cfg);

struct StepOutput {
  Positions positions;
  SpdSolveResult solve;
};

// Backward Euler step (D^t - tau L^t) X' = D^t X with both matrices taken at
// the current positions. Throws FlowStepError on a degenerate face or a
// failed solve.
StepOutput mcf_step(const FlowState& state, const TriangleMesh& mesh, const FlowConfig& cfg);

// (D^t - tau L^0) X' = D^t X; only the mass matrix follows the surface.
StepOutput cmcf_step(const FlowState& state, const TriangleMesh& mesh, const FlowConfig& cfg);

// area+center: translate the area centroid to the origin, then scale to
// target_area. area-only: scale about the origin. none: identity.
Positions normalize(const Positions& positions, const TriangleMesh& connectivity, double target_area,
                    Normalization mode);

// Faces below ratio_threshold times the current mean face area (the initial
// mean rescaled to the current total area, since the face count is fixed).
DegeneracyReport detect_degeneracy(const Positions& positions, const TriangleMesh& connectivity,
                                   double ratio_threshold);

// Each vertex of the area-centered mesh divided by its norm.
TriangleMesh project_to_unit_sphere(const TriangleMesh& mesh);

using SnapshotFn = std::function<void(int step, const TriangleMesh& mesh)>;

// Steps and normalizes until sphericity >= stop_sphericity, max_steps, a
// degenerate face, or a solver failure. Throws FlowInputError when the input
// is unsuitable (cMCF needs a closed genus-zero surface).
FlowResult run_flow(const TriangleMesh& mesh, const FlowConfig& cfg, const SnapshotFn& snapshot = {});

const char* to_string(FlowMode m);
const char* to_string(Normalization n);
const char* to_string(Termination t);
const char* to_string(MassScheme s);

// Columns: step,sphericity,min_area_ratio,residual,method
void write_history_csv(const std::vector<StepRecord>& history, const std::filesystem::path& path);

} // namespace cmcf
