#pragma once

#include "cmcf/fem.hpp"

#include <Eigen/Core>

#include <array>
#include <string>

namespace cmcf {

enum class SolveMethod { Cholesky, ConjugateGradient };
enum class SolveStatus { Success, NotPositiveDefinite, NotConverged };

struct SolveOptions {
  double tolerance = 1e-10; // relative residual |Ax - b| / |b| per column
  bool force_iterative = false;
  int max_iterations = 0; // CG cap; 0 picks 10 * N
};

struct SpdSolveResult {
  Eigen::MatrixXd solution;
  std::vector<double> relative_residuals; // one per column
  SolveMethod method = SolveMethod::Cholesky;
  SolveStatus status = SolveStatus::Success;
  bool factorization_failed = false;
  int iterations = 0; // CG iterations summed over columns
  std::string message;

  bool ok() const { return status == SolveStatus::Success; }
  double max_residual() const;
};

// Solves A X = B column by column for symmetric positive definite A. A direct
// sparse Cholesky factorization is tried first and shared across columns;
// Jacobi-preconditioned CG takes over if it breaks down or misses the
// residual bound. A result that misses the bound on either path is marked
// failed, never silently accepted.
SpdSolveResult solve_spd(const SparseSymMatrix& A, const Eigen::MatrixXd& B, const SolveOptions& options = {});

const char* to_string(SolveMethod m);
const char* to_string(SolveStatus s);

} // namespace cmcf
