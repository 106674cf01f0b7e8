#include "cmcf/fem.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace cmcf {

namespace {

constexpr std::size_t kNoFace = std::numeric_limits<std::size_t>::max();

// Twice the triangle area, or throw when the triangle has collapsed.
double doubled_area_checked(const Vec3& p0, const Vec3& p1, const Vec3& p2, std::size_t face) {
  double twice = (p1 - p0).cross(p2 - p0).norm();
  double longest = std::max({(p1 - p0).squaredNorm(), (p2 - p1).squaredNorm(), (p0 - p2).squaredNorm()});
  if (!(twice > 2e-14 * longest) || longest == 0.0) {
    throw AssemblyError(face == kNoFace ? std::string("zero-area triangle")
                                        : "zero-area face " + std::to_string(face),
                        face);
  }
  return twice;
}

} // namespace

// ===========================================================================
// SparseSymMatrix

SparseSymMatrix::SparseSymMatrix(Eigen::Index n, const std::vector<Triplet>& entries) : upper_(n, n) {
  std::vector<Triplet> up;
  up.reserve(entries.size());
  for (const auto& t : entries) {
    if (t.row() <= t.col()) {
      up.push_back(t);
    } else {
      up.emplace_back(t.col(), t.row(), t.value());
    }
  }
  upper_.setFromTriplets(up.begin(), up.end());
  upper_.makeCompressed();
}

SparseSymMatrix::SparseSymMatrix(Storage upper) : upper_(std::move(upper)) {
  upper_ = upper_.triangularView<Eigen::Upper>();
  upper_.makeCompressed();
}

double SparseSymMatrix::coeff(Eigen::Index i, Eigen::Index j) const {
  return i <= j ? upper_.coeff(i, j) : upper_.coeff(j, i);
}

SparseSymMatrix::Storage SparseSymMatrix::full() const {
  Storage f = upper_.selfadjointView<Eigen::Upper>();
  f.makeCompressed();
  return f;
}

Eigen::MatrixXd SparseSymMatrix::dense() const { return Eigen::MatrixXd(full()); }

Eigen::MatrixXd SparseSymMatrix::operator*(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd y = upper_.selfadjointView<Eigen::Upper>() * x;
  return y;
}

Eigen::VectorXd SparseSymMatrix::diagonal() const { return upper_.diagonal(); }

Eigen::VectorXd SparseSymMatrix::row_sums() const {
  return *this * Eigen::VectorXd::Ones(size());
}

double SparseSymMatrix::sum() const {
  double s = 0.0;
  for (int k = 0; k < upper_.outerSize(); ++k) {
    for (Storage::InnerIterator it(upper_, k); it; ++it) {
      s += it.row() == it.col() ? it.value() : 2.0 * it.value();
    }
  }
  return s;
}

bool SparseSymMatrix::is_diagonal() const {
  for (int k = 0; k < upper_.outerSize(); ++k) {
    for (Storage::InnerIterator it(upper_, k); it; ++it) {
      if (it.row() != it.col() && it.value() != 0.0) return false;
    }
  }
  return true;
}

SparseSymMatrix SparseSymMatrix::combine(double a, const SparseSymMatrix& A, double b, const SparseSymMatrix& B) {
  Storage sum = a * A.upper_ + b * B.upper_;
  return SparseSymMatrix(std::move(sum));
}

bool operator==(const SparseSymMatrix& lhs, const SparseSymMatrix& rhs) {
  const auto& a = lhs.upper_;
  const auto& b = rhs.upper_;
  if (a.rows() != b.rows() || a.nonZeros() != b.nonZeros()) return false;
  for (int k = 0; k < a.outerSize(); ++k) {
    SparseSymMatrix::Storage::InnerIterator ia(a, k), ib(b, k);
    for (; ia && ib; ++ia, ++ib) {
      if (ia.row() != ib.row() || ia.value() != ib.value()) return false;
    }
    if (ia || ib) return false;
  }
  return true;
}

// ===========================================================================
// Element matrices

Eigen::Matrix3d stiffness_element(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  const Vec3* p[3] = {&p0, &p1, &p2};
  double twice = doubled_area_checked(p0, p1, p2, kNoFace);
  Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
  for (int c = 0; c < 3; ++c) {
    // cot at corner c = (u . w) / |u x w|, and |u x w| is twice the area.
    const Vec3& a = *p[c];
    const Vec3& b = *p[(c + 1) % 3];
    const Vec3& d = *p[(c + 2) % 3];
    double cot = (b - a).dot(d - a) / twice;
    int i = (c + 1) % 3, j = (c + 2) % 3;
    K(i, j) = K(j, i) = 0.5 * cot;
  }
  for (int i = 0; i < 3; ++i) K(i, i) = -(K.row(i).sum() - K(i, i));
  return K;
}

Eigen::Matrix3d mass_element(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  double area = 0.5 * doubled_area_checked(p0, p1, p2, kNoFace);
  Eigen::Matrix3d M = Eigen::Matrix3d::Constant(area / 12.0);
  M.diagonal().setConstant(area / 6.0);
  return M;
}

// ===========================================================================
// Assembly

namespace {

template <class ElementFn>
SparseSymMatrix assemble(const TriangleMesh& mesh, ElementFn element, bool diagonal_only = false) {
  std::vector<SparseSymMatrix::Triplet> triplets;
  triplets.reserve(mesh.num_faces() * 6);
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.faces[f];
    Eigen::Matrix3d E;
    try {
      E = element(mesh.position(t[0]), mesh.position(t[1]), mesh.position(t[2]));
    } catch (const AssemblyError&) {
      throw AssemblyError("zero-area face " + std::to_string(f), f);
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b) {
        if (diagonal_only && a != b) continue;
        int i = t[a], j = t[b];
        if (i > j) std::swap(i, j);
        triplets.emplace_back(i, j, E(a, b));
      }
    }
  }
  return SparseSymMatrix(static_cast<Eigen::Index>(mesh.num_vertices()), triplets);
}

} // namespace

SparseSymMatrix assemble_stiffness(const TriangleMesh& mesh) { return assemble(mesh, stiffness_element); }

SparseSymMatrix assemble_mass_galerkin(const TriangleMesh& mesh) { return assemble(mesh, mass_element); }

SparseSymMatrix assemble_mass_lumped(const TriangleMesh& mesh) {
  return assemble(mesh, [](const Vec3& p0, const Vec3& p1, const Vec3& p2) {
    double area = 0.5 * doubled_area_checked(p0, p1, p2, kNoFace);
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    M.diagonal().setConstant(area / 3.0);
    return M;
  }, true);
}

SparseSymMatrix assemble_mass(const TriangleMesh& mesh, MassScheme scheme) {
  return scheme == MassScheme::Galerkin ? assemble_mass_galerkin(mesh) : assemble_mass_lumped(mesh);
}

void write_matrix_market(const SparseSymMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix file: " + path.string());
  const auto& up = m.upper();
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << up.rows() << ' ' << up.cols() << ' ' << up.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int k = 0; k < up.outerSize(); ++k) {
    for (SparseSymMatrix::Storage::InnerIterator it(up, k); it; ++it) {
      // Stored (row <= col); the format wants the lower triangle, 1-based.
      out << it.col() + 1 << ' ' << it.row() + 1 << ' ' << it.value() << '\n';
    }
  }
}

} // namespace cmcf
