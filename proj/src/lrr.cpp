#include "lrrfuse/lrr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "lrrfuse/errors.hpp"
#include "lrrfuse/kernels.hpp"

namespace lrrfuse {
namespace {

bool prefers_gram(Eigen::Index rows, Eigen::Index cols) {
  return 4 * std::min(rows, cols) <= std::max(rows, cols);
}

// Singular values of m through the short-side Gram matrix.
Eigen::VectorXd gram_singular_values(const Eigen::MatrixXd& m) {
  const bool wide = m.rows() <= m.cols();
  Eigen::MatrixXd gram = wide ? Eigen::MatrixXd(m * m.transpose()) : Eigen::MatrixXd(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  return eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

Eigen::MatrixXd svt_gram(const Eigen::MatrixXd& m, double tau) {
  const bool wide = m.rows() <= m.cols();
  const Eigen::MatrixXd gram = wide ? Eigen::MatrixXd(m * m.transpose()) : Eigen::MatrixXd(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed in svt");
  // With short-side singular vectors U: svt(M) = U diag(max(s - tau, 0) / s) U^T M.
  const Eigen::VectorXd sigma = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) keep += sigma[i] > tau ? 1 : 0;
  if (keep == 0) return Eigen::MatrixXd::Zero(m.rows(), m.cols());
  // Eigenvalues ascend; the kept ones are the trailing block.
  const Eigen::Index first = sigma.size() - keep;
  const Eigen::MatrixXd u = eig.eigenvectors().rightCols(keep);
  Eigen::VectorXd factor(keep);
  for (Eigen::Index i = 0; i < keep; ++i) factor[i] = (sigma[first + i] - tau) / sigma[first + i];
  if (wide) {
    const Eigen::MatrixXd projected = u.transpose() * m;
    return u * (factor.asDiagonal() * projected);
  }
  const Eigen::MatrixXd projected = m * u;
  return (projected * factor.asDiagonal()) * u.transpose();
}

Eigen::MatrixXd svt_direct(const Eigen::MatrixXd& m, double tau) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd shrunk = (svd.singularValues().array() - tau).cwiseMax(0.0);
  Eigen::Index keep = 0;
  while (keep < shrunk.size() && shrunk[keep] > 0.0) ++keep;
  if (keep == 0) return Eigen::MatrixXd::Zero(m.rows(), m.cols());
  return svd.matrixU().leftCols(keep) * shrunk.head(keep).asDiagonal() *
         svd.matrixV().leftCols(keep).transpose();
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (prefers_gram(m.rows(), m.cols())) return gram_singular_values(m).maxCoeff();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

// Orthonormal basis (K x r) of range(D^T), r = numerical rank of D.
Eigen::MatrixXd row_space_basis(const Eigen::MatrixXd& dictionary) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dictionary, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || !(s[0] > 0.0)) return Eigen::MatrixXd(dictionary.cols(), 0);
  const double cutoff = static_cast<double>(std::max(dictionary.rows(), dictionary.cols())) *
                        std::numeric_limits<double>::epsilon() * s[0];
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > cutoff) ++rank;
  return svd.matrixV().leftCols(rank);
}

struct AlmResult {
  Eigen::MatrixXd z;
  Eigen::MatrixXd e;
  std::size_t iterations = 0;
  bool converged = false;
  double split_residual = 0.0;
};

AlmResult run_inexact_alm(const Eigen::MatrixXd& x, const Eigen::MatrixXd& a, const LrrParams& params,
                          const LrrProgress& progress) {
  const Eigen::Index k = a.cols();
  const Eigen::Index q = x.cols();
  const Eigen::Index d = x.rows();

  double mu = 1e-2;
  if (params.mu0) {
    mu = *params.mu0;
  } else {
    const double top = spectral_norm(x);
    if (top > 0.0) mu = 1e-2 / top;
  }

  const Eigen::MatrixXd at = a.transpose();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(k, k) + at * a;
  const Eigen::LLT<Eigen::MatrixXd> factor(system);
  if (factor.info() != Eigen::Success) throw NumericError("I + D^T D is not positive definite");
  const Eigen::MatrixXd atx = at * x;

  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(k, q);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(k, q);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d, q);
  Eigen::MatrixXd y1 = Eigen::MatrixXd::Zero(d, q);
  Eigen::MatrixXd y2 = Eigen::MatrixXd::Zero(k, q);

  AlmResult best;
  double best_score = std::numeric_limits<double>::infinity();

  for (std::size_t it = 1; it <= params.max_iterations; ++it) {
    j = svt(z + y2 / mu, 1.0 / mu);
    z = factor.solve(atx - at * e + j + (at * y1 - y2) / mu);
    const Eigen::MatrixXd xmaz = x - a * z;
    e = shrink_l21(xmaz + y1 / mu, params.lambda / mu);
    const Eigen::MatrixXd leq1 = xmaz - e;
    const Eigen::MatrixXd leq2 = z - j;
    const double feasibility = max_abs(leq1);
    const double split = max_abs(leq2);
    if (progress) progress(it, feasibility, split);

    const bool done = feasibility <= params.tol && split <= params.tol;
    const double score = std::max(feasibility, split);
    if (done || score < best_score) {
      best_score = score;
      best.z = z;
      best.e = e;
      best.iterations = it;
      best.split_residual = split;
    }
    if (done) {
      best.converged = true;
      best.iterations = it;
      return best;
    }
    y1 += mu * leq1;
    y2 += mu * leq2;
    mu = std::min(params.rho * mu, params.mu_max);
  }
  best.iterations = params.max_iterations;
  return best;
}

}  // namespace

void validate(const LrrParams& params) {
  if (!(params.lambda > 0.0)) throw ParameterError("LRR lambda must be positive");
  if (params.mu0 && !(*params.mu0 > 0.0)) throw ParameterError("LRR mu0 must be positive");
  if (!(params.rho > 1.0)) throw ParameterError("LRR rho must exceed 1");
  if (!(params.mu_max > 0.0)) throw ParameterError("LRR mu_max must be positive");
  if (!(params.tol > 0.0)) throw ParameterError("LRR tolerance must be positive");
  if (params.max_iterations == 0) throw ParameterError("LRR iteration cap must be positive");
}

Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("svt threshold must be non-negative");
  if (m.size() == 0) return m;
  if (prefers_gram(m.rows(), m.cols())) return svt_gram(m, tau);
  return svt_direct(m, tau);
}

Eigen::MatrixXd shrink_l21(const Eigen::MatrixXd& m, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("l2,1 shrinkage threshold must be non-negative");
  Eigen::MatrixXd out = m;
  const auto rows = static_cast<std::size_t>(m.rows());
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    std::span<double> column(out.col(c).data(), rows);
    const double norm = std::sqrt(kernels::sum_squares(column));
    if (norm > tau) {
      kernels::scale(column, 1.0 - tau / norm);
    } else {
      std::fill(column.begin(), column.end(), 0.0);
    }
  }
  return out;
}

Eigen::VectorXd column_l1_norms(const Eigen::MatrixXd& z) {
  Eigen::VectorXd norms(z.cols());
  const auto rows = static_cast<std::size_t>(z.rows());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    norms[c] = kernels::sum_abs(std::span<const double>(z.col(c).data(), rows));
  }
  return norms;
}

double nuclear_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (prefers_gram(m.rows(), m.cols())) return gram_singular_values(m).sum();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().sum();
}

double l21_norm(const Eigen::MatrixXd& m) { return m.colwise().norm().sum(); }

LrrSolution lrr_solve(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dictionary, const LrrParams& params,
                      const LrrProgress& progress) {
  validate(params);
  if (dictionary.rows() != x.rows()) throw ParameterError("dictionary atom dimension does not match data");
  if (dictionary.cols() == 0) throw ParameterError("dictionary has no atoms");
  if (!x.allFinite() || !dictionary.allFinite()) throw ParameterError("LRR input contains non-finite values");

  LrrSolution solution;
  if (params.reduce_to_row_space) {
    const Eigen::MatrixXd basis = row_space_basis(dictionary);
    if (basis.cols() == 0) throw NumericError("dictionary is numerically zero");
    const Eigen::MatrixXd reduced = dictionary * basis;
    AlmResult alm = run_inexact_alm(x, reduced, params, progress);
    solution.z = basis * alm.z;
    solution.e = std::move(alm.e);
    solution.iterations = alm.iterations;
    solution.converged = alm.converged;
    solution.split_residual = alm.split_residual;
    solution.objective = nuclear_norm(alm.z) + params.lambda * l21_norm(solution.e);
  } else {
    AlmResult alm = run_inexact_alm(x, dictionary, params, progress);
    solution.z = std::move(alm.z);
    solution.e = std::move(alm.e);
    solution.iterations = alm.iterations;
    solution.converged = alm.converged;
    solution.split_residual = alm.split_residual;
    solution.objective = nuclear_norm(solution.z) + params.lambda * l21_norm(solution.e);
  }
  solution.feasibility_residual = max_abs(x - dictionary * solution.z - solution.e);
  return solution;
}

}  // namespace lrrfuse
