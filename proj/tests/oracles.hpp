#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's assembly or solver code.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>
#include <vector>

namespace cmcf::oracle {

struct QuadPoint {
  double l0, l1, l2; // barycentric
  double weight;     // sums to 1 over the rule
};

// Symmetric 7-point rule, exact for polynomials of degree 5.
inline std::array<QuadPoint, 7> seven_point_rule() {
  const double s = std::sqrt(15.0);
  const double a1 = (6.0 - s) / 21.0, w1 = (155.0 - s) / 1200.0;
  const double a2 = (6.0 + s) / 21.0, w2 = (155.0 + s) / 1200.0;
  return {{{1.0 / 3, 1.0 / 3, 1.0 / 3, 9.0 / 40.0},
           {a1, a1, 1 - 2 * a1, w1},
           {a1, 1 - 2 * a1, a1, w1},
           {1 - 2 * a1, a1, a1, w1},
           {a2, a2, 1 - 2 * a2, w2},
           {a2, 1 - 2 * a2, a2, w2},
           {1 - 2 * a2, a2, a2, w2}}};
}

// Hat-function gradients from an explicit in-plane frame: each B_i is the
// affine function with B_i(p_j) = delta_ij, found by a 3x3 solve.
inline std::array<Eigen::Vector3d, 3> hat_gradients(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                                    const Eigen::Vector3d& p2, double* area) {
  Eigen::Vector3d e1 = (p1 - p0).normalized();
  Eigen::Vector3d n = (p1 - p0).cross(p2 - p0).normalized();
  Eigen::Vector3d e2 = n.cross(e1);
  Eigen::Matrix3d V;
  const Eigen::Vector3d* p[3] = {&p0, &p1, &p2};
  for (int r = 0; r < 3; ++r) {
    Eigen::Vector3d d = *p[r] - p0;
    V.row(r) << d.dot(e1), d.dot(e2), 1.0;
  }
  // Column i of C holds the coefficients (gx, gy, c) of B_i.
  Eigen::Matrix3d C = V.fullPivLu().solve(Eigen::Matrix3d::Identity());
  std::array<Eigen::Vector3d, 3> g;
  for (int i = 0; i < 3; ++i) g[i] = C(0, i) * e1 + C(1, i) * e2;
  // p0 sits at the origin and p1 on the first axis.
  *area = 0.5 * std::abs(V(1, 0) * V(2, 1));
  return g;
}

// Element matrices by quadrature: mass int B_i B_j, stiffness -int grad B_i . grad B_j.
inline void quadrature_elements(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1, const Eigen::Vector3d& p2,
                                Eigen::Matrix3d& mass, Eigen::Matrix3d& stiffness) {
  double area = 0.0;
  auto g = hat_gradients(p0, p1, p2, &area);
  mass.setZero();
  stiffness.setZero();
  for (const QuadPoint& q : seven_point_rule()) {
    double b[3] = {q.l0, q.l1, q.l2};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        mass(i, j) += q.weight * area * b[i] * b[j];
        stiffness(i, j) -= q.weight * area * g[i].dot(g[j]);
      }
    }
  }
}

// Plain dense Cholesky solve, A = R^T R.
inline Eigen::MatrixXd dense_cholesky_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = A(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= R(k, j) * R(k, j);
    R(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = A(j, i);
      for (Eigen::Index k = 0; k < j; ++k) s -= R(k, j) * R(k, i);
      R(j, i) = s / R(j, j);
    }
  }
  Eigen::MatrixXd Y = B;
  for (Eigen::Index c = 0; c < B.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) { // R^T y = b
      double s = Y(i, c);
      for (Eigen::Index k = 0; k < i; ++k) s -= R(k, i) * Y(k, c);
      Y(i, c) = s / R(i, i);
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) { // R x = y
      double s = Y(i, c);
      for (Eigen::Index k = i + 1; k < n; ++k) s -= R(i, k) * Y(k, c);
      Y(i, c) = s / R(i, i);
    }
  }
  return Y;
}

// Random proper rotation from a normalized random quaternion.
inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

} // namespace cmcf::oracle
