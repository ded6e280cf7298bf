#ifndef VARODE_NUM_LINALG_HPP
#define VARODE_NUM_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <vector>

#include "varode/num/taylor.hpp"

namespace varode {

// Numeric rank with a threshold relative to the largest singular value.
inline int numeric_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-9) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

// Smallest singular pair of a (rows >= cols) system: returns sigma_min,
// second smallest, and the corresponding right singular vector.
struct SmallestSingular {
  double sigma_min;
  double sigma_second;
  Eigen::VectorXd vec;
};

inline SmallestSingular smallest_singular(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  int k = static_cast<int>(sv.size());
  SmallestSingular r;
  r.sigma_min = sv(k - 1);
  r.sigma_second = k >= 2 ? sv(k - 2) : std::numeric_limits<double>::infinity();
  r.vec = svd.matrixV().col(k - 1);
  return r;
}

// Largest principal angle between the column spans of a and b (radians).
inline double subspace_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qa(a), qb(b);
  Eigen::MatrixXd Qa = qa.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd Qb = qb.householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Qa.transpose() * Qb);
  double cmin = svd.singularValues().minCoeff();
  cmin = std::clamp(cmin, -1.0, 1.0);
  return std::acos(cmin);
}

// --- small dense linear algebra over Taylor jets ---

using JetVec = std::vector<Jet>;
using JetMat = std::vector<std::vector<Jet>>;

inline JetMat jet_mat(std::size_t r, std::size_t c, std::size_t len) {
  return JetMat(r, std::vector<Jet>(c, Jet(0.0, len)));
}

inline JetMat jet_matmul(const JetMat& a, const JetMat& b) {
  std::size_t r = a.size(), k = b.size(), c = b[0].size();
  std::size_t len = a[0][0].size();
  JetMat m = jet_mat(r, c, len);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      Jet s(0.0, len);
      for (std::size_t t = 0; t < k; ++t) s = s + a[i][t] * b[t][j];
      m[i][j] = s;
    }
  return m;
}

// Solve A x = rhs with Gaussian elimination, pivoting on order-0 magnitude.
inline JetVec jet_solve(JetMat a, JetVec rhs) {
  std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col].value()) > std::abs(a[piv][col].value())) piv = r;
    if (std::abs(a[piv][col].value()) < 1e-300)
      throw DomainError("jet_solve: singular system");
    std::swap(a[piv], a[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      Jet f = a[r][col] / a[col][col];
      for (std::size_t c2 = col; c2 < n; ++c2) a[r][c2] = a[r][c2] - f * a[col][c2];
      rhs[r] = rhs[r] - f * rhs[col];
    }
  }
  JetVec x(n, Jet(0.0, rhs[0].size()));
  for (std::size_t i = n; i-- > 0;) {
    Jet s = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) s = s - a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace varode

#endif
