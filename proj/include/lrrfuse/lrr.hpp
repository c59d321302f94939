#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <optional>

namespace lrrfuse {

/// Inexact ALM settings for min ||Z||_* + lambda ||E||_{2,1} s.t. X = D Z + E.
struct LrrParams {
  double lambda = 100.0;
  /// Initial penalty; unset means 1e-2 / sigma_max(X), or 1e-2 when X = 0.
  std::optional<double> mu0;
  double rho = 1.1;
  double mu_max = 1e10;
  double tol = 1e-6;
  std::size_t max_iterations = 1000;
  /// Solve in the row space of D (an orthonormal basis of range(D^T)) and map
  /// back. The nuclear-norm minimizer always lies there, so the optimum is
  /// unchanged while the SVT works on a rank(D) x Q matrix.
  bool reduce_to_row_space = true;
};

/// Throws ParameterError for lambda <= 0, mu0 <= 0, rho <= 1, mu_max <= 0,
/// tol <= 0 or a zero iteration cap.
void validate(const LrrParams& params);

struct LrrSolution {
  Eigen::MatrixXd z;  // K x Q
  Eigen::MatrixXd e;  // d x Q
  std::size_t iterations = 0;
  bool converged = false;
  /// ||X - D Z - E||_inf, recomputed with the full dictionary.
  double feasibility_residual = 0.0;
  /// ||Z - J||_inf at the returned iterate (in the reduced basis when reduction is on).
  double split_residual = 0.0;
  /// ||Z||_* + lambda ||E||_{2,1}.
  double objective = 0.0;
};

/// Singular value thresholding: U max(S - tau, 0) V^T.
/// Strongly rectangular inputs (short side at most a quarter of the long
/// side) go through an eigendecomposition of the short-side Gram matrix.
Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau);

/// Column-wise shrinkage: each column q becomes max(1 - tau / ||q||, 0) q.
Eigen::MatrixXd shrink_l21(const Eigen::MatrixXd& m, double tau);

/// l1 norm of every column.
Eigen::VectorXd column_l1_norms(const Eigen::MatrixXd& z);

double nuclear_norm(const Eigen::MatrixXd& m);
double l21_norm(const Eigen::MatrixXd& m);

/// Per-iteration observer: iteration number, feasibility and split residuals.
using LrrProgress = std::function<void(std::size_t, double, double)>;

/// Low-rank representation of the columns of `x` over the fixed dictionary
/// `dictionary` (d x K). Passing x itself as the dictionary gives the
/// self-expressive model. When the iteration cap is hit the iterate with the
/// smallest max(residual) is returned with converged = false.
LrrSolution lrr_solve(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dictionary,
                      const LrrParams& params, const LrrProgress& progress = {});

}  // namespace lrrfuse
