#ifndef VARODE_WILCZYNSKI_CURVE_HPP
#define VARODE_WILCZYNSKI_CURVE_HPP

#include <optional>
#include <variant>

#include "varode/wilczynski/invariants.hpp"

namespace varode {

// Sampled moving frame e_0(t)..e_N(t) in R^{N+1} with e_i = e_0^(i).
// Columns of frames[s] are e_0..e_N at grid[s].
struct ProjectiveCurve {
  int N{0};
  std::vector<double> grid;
  std::vector<Eigen::MatrixXd> frames;
  std::vector<std::vector<Jet>> jets;  // optional: per sample, jets of e_0 components
  double min_frame_det{0.0};           // min |det| of column-normalized frames

  Eigen::VectorXd e(int i, std::size_t s) const { return frames[s].col(i); }
};

inline void curve_check_regularity(ProjectiveCurve& c) {
  double mind = std::numeric_limits<double>::infinity();
  for (const auto& f : c.frames) {
    Eigen::MatrixXd n = f;
    for (int j = 0; j < n.cols(); ++j) {
      double nn = n.col(j).norm();
      if (nn == 0.0) { mind = 0.0; break; }
      n.col(j) /= nn;
    }
    mind = std::min(mind, std::abs(n.determinant()));
  }
  c.min_frame_det = mind;
  if (!(mind > 1e-12))
    throw IntegrationError("projective curve is not strongly regular on the grid");
}

// Fundamental system of u^(N+1) = sum p_i u^(i): N+1 solutions with identity
// initial frame; the frame determinant is then the Wronskian.
inline ProjectiveCurve fundamental_system(const LinearODECoeffs& c,
                                          const std::vector<double>& grid) {
  const int m = c.N + 1;
  auto rhs = [&c, m](const State& y, State& dy, double t) {
    dy.resize(m);
    for (int i = 0; i + 1 < m; ++i) dy[i] = y[i + 1];
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += c.eval(i, t) * y[i];
    dy[m - 1] = acc;
  };
  ProjectiveCurve pc;
  pc.N = c.N;
  pc.grid = grid;
  pc.frames.assign(grid.size(), Eigen::MatrixXd::Zero(m, m));
  for (int comp = 0; comp < m; ++comp) {
    State y0(m, 0.0);
    y0[comp] = 1.0;
    DenseResult dr = integrate_dense(rhs, y0, grid, {}, 1e-11, 1e-13);
    for (std::size_t s = 0; s < grid.size(); ++s)
      for (int i = 0; i < m; ++i) pc.frames[s](comp, i) = dr.at_grid[s][i];
  }
  curve_check_regularity(pc);
  return pc;
}

// span<e_0..e_i> as orthonormal (i+1)-frames per sample.
inline std::vector<Eigen::MatrixXd> osculating_flag(const ProjectiveCurve& c, int i) {
  if (i < 0 || i > c.N) throw InvalidInput("osculating_flag: index out of range");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(c.grid.size());
  for (const auto& f : c.frames) {
    Eigen::MatrixXd sub = f.leftCols(i + 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(sub);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(c.N + 1, i + 1);
    Eigen::MatrixXd r = qr.matrixQR().topRows(i + 1).triangularView<Eigen::Upper>();
    for (int d = 0; d <= i; ++d)
      if (std::abs(r(d, d)) < 1e-12 * sub.col(d).norm())
        throw IntegrationError("osculating flag rank deficiency (strong regularity)");
    out.push_back(q);
  }
  return out;
}

struct DualityForm {
  Eigen::MatrixXd B;
  bool skew{true};
  double residual{0.0};
};

struct AmbiguousDuality : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Skew form with e_i(t)^T B e_j(t) = 0 for all i,j <= (N-1)/2 over all
// samples (least squares); the tested osculating subspace has the Lagrangian
// dimension (N+1)/2.
inline std::optional<DualityForm> selfdual_test(const ProjectiveCurve& c, double tol = 1e-6) {
  if (c.N % 2 == 0) throw InvalidInput("selfdual_test requires odd N");
  const int d = c.N + 1;
  const int half = (c.N - 1) / 2;
  const int nunk = d * (d - 1) / 2;
  auto unk_index = [d](int a, int b) {  // a<b
    return a * d - a * (a + 1) / 2 + (b - a - 1);
  };
  std::vector<Eigen::VectorXd> rows;
  for (std::size_t s = 0; s < c.grid.size(); ++s) {
    for (int i = 0; i <= half; ++i) {
      for (int j = i + 1; j <= half; ++j) {
        Eigen::VectorXd ei = c.frames[s].col(i), ej = c.frames[s].col(j);
        Eigen::VectorXd row = Eigen::VectorXd::Zero(nunk);
        for (int a = 0; a < d; ++a)
          for (int b = a + 1; b < d; ++b)
            row(unk_index(a, b)) = ei(a) * ej(b) - ei(b) * ej(a);
        // unit rows weight every constraint equally; raw minors would let
        // high-column directions vanish numerically near the grid start
        double nrm = row.norm();
        if (nrm > 0.0) rows.push_back(row / nrm);
      }
    }
  }
  Eigen::MatrixXd sys(rows.size(), nunk);
  for (std::size_t r = 0; r < rows.size(); ++r) sys.row(r) = rows[r];
  SmallestSingular ss = smallest_singular(sys);
  if (ss.sigma_min >= tol) return std::nullopt;
  if (ss.sigma_second < 10 * tol)
    throw AmbiguousDuality("selfdual_test: solution space has dimension > 1");
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      B(a, b) = ss.vec(unk_index(a, b));
      B(b, a) = -B(a, b);
    }
  B /= B.norm();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  if (svd.singularValues()(d - 1) < 1e-6 * svd.singularValues()(0)) return std::nullopt;
  DualityForm df;
  df.B = B;
  df.skew = true;
  df.residual = ss.sigma_min;
  return df;
}

// Least-squares fit of an invertible A with A e0_1(t) parallel to e0_2(t).
struct ProjectiveMatch {
  Eigen::MatrixXd A;
  double residual;
};

inline std::variant<ProjectiveMatch, std::string> compare_projective(
    const ProjectiveCurve& c1, const ProjectiveCurve& c2, double tol = 1e-6) {
  if (c1.N != c2.N || c1.grid.size() != c2.grid.size())
    return std::string("curve dimension or grid mismatch");
  const int d = c1.N + 1;
  const int nunk = d * d;
  std::vector<Eigen::VectorXd> rows;
  for (std::size_t s = 0; s < c1.grid.size(); ++s) {
    Eigen::VectorXd u = c1.frames[s].col(0), v = c2.frames[s].col(0);
    u /= u.norm();
    v /= v.norm();
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        // (A u)_a v_b - (A u)_b v_a = 0
        Eigen::VectorXd row = Eigen::VectorXd::Zero(nunk);
        for (int k = 0; k < d; ++k) {
          row(a * d + k) += u(k) * v(b);
          row(b * d + k) -= u(k) * v(a);
        }
        double nrm = row.norm();
        if (nrm > 0.0) rows.push_back(row / nrm);
      }
  }
  Eigen::MatrixXd sys(rows.size(), nunk);
  for (std::size_t r = 0; r < rows.size(); ++r) sys.row(r) = rows[r];
  SmallestSingular ss = smallest_singular(sys);
  if (ss.sigma_min >= tol) return std::string("no projective match within tolerance");
  Eigen::MatrixXd A = Eigen::Map<Eigen::MatrixXd>(ss.vec.data(), d, d).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  if (svd.singularValues()(d - 1) < 1e-8 * svd.singularValues()(0))
    return std::string("fit degenerate (singular map)");
  return ProjectiveMatch{A, ss.sigma_min};
}

}  // namespace varode

#endif
