#pragma once

#include "cmcf/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <filesystem>
#include <stdexcept>

namespace cmcf {

class AssemblyError : public std::runtime_error {
public:
  AssemblyError(const std::string& what, std::size_t face)
      : std::runtime_error(what), face_(face) {}
  std::size_t face() const { return face_; }

private:
  std::size_t face_;
};

// Symmetric N x N sparse matrix. Only the upper triangle (row <= col) is
// stored; the lower half is implied.
class SparseSymMatrix {
public:
  using Storage = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  using Triplet = Eigen::Triplet<double, int>;

  SparseSymMatrix() = default;
  // Entries below the diagonal are mirrored into the upper triangle;
  // duplicates are summed in the order given.
  SparseSymMatrix(Eigen::Index n, const std::vector<Triplet>& entries);
  explicit SparseSymMatrix(Storage upper);

  Eigen::Index size() const { return upper_.rows(); }
  double coeff(Eigen::Index i, Eigen::Index j) const;
  const Storage& upper() const { return upper_; }
  Storage full() const;
  Eigen::MatrixXd dense() const;

  Eigen::MatrixXd operator*(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd diagonal() const;
  Eigen::VectorXd row_sums() const;
  double sum() const;
  bool is_diagonal() const;

  // a * A + b * B
  static SparseSymMatrix combine(double a, const SparseSymMatrix& A, double b, const SparseSymMatrix& B);

  friend bool operator==(const SparseSymMatrix& lhs, const SparseSymMatrix& rhs);

private:
  Storage upper_;
};

// Per-triangle element matrices for the linear hat basis on the triangle
// (p0, p1, p2). Both throw AssemblyError(face = npos) on zero area.
//   stiffness: K_ij = -int grad B_i . grad B_j = cot(opposite angle) / 2 (i != j),
//              K_ii = -sum_j K_ij
//   mass:      M_ij = int B_i B_j = A/12 (i != j), A/6 (i == j)
Eigen::Matrix3d stiffness_element(const Vec3& p0, const Vec3& p1, const Vec3& p2);
Eigen::Matrix3d mass_element(const Vec3& p0, const Vec3& p1, const Vec3& p2);

SparseSymMatrix assemble_stiffness(const TriangleMesh& mesh);
SparseSymMatrix assemble_mass_galerkin(const TriangleMesh& mesh);
SparseSymMatrix assemble_mass_lumped(const TriangleMesh& mesh);

enum class MassScheme { Galerkin, Lumped };
SparseSymMatrix assemble_mass(const TriangleMesh& mesh, MassScheme scheme);

// Matrix Market coordinate format, "real symmetric" (lower triangle written).
void write_matrix_market(const SparseSymMatrix& m, const std::filesystem::path& path);

} // namespace cmcf
