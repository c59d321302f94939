#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "lrrfuse/errors.hpp"
#include "lrrfuse/sparse_coding.hpp"
#include "sparse_internal.hpp"

namespace lrrfuse {
namespace detail {

namespace {
constexpr double kResidualFloor = 1e-12;
// A candidate whose new Cholesky pivot falls below this is numerically in the
// span of the current support.
constexpr double kPivotFloor = 1e-12;
}  // namespace

Eigen::VectorXd residual_of(const Eigen::MatrixXd& atoms, const SparseCode& code,
                            const Eigen::Ref<const Eigen::VectorXd>& signal) {
  Eigen::VectorXd residual = signal;
  for (std::size_t t = 0; t < code.size(); ++t) residual.noalias() -= code.values[t] * atoms.col(code.support[t]);
  return residual;
}

SparseCode omp_with_gram(const Eigen::MatrixXd& atoms, const Eigen::MatrixXd& gram,
                         const Eigen::Ref<const Eigen::VectorXd>& signal, std::size_t sparsity) {
  SparseCode code;
  if (signal.norm() < kResidualFloor) return code;

  const Eigen::VectorXd alpha = atoms.transpose() * signal;
  Eigen::VectorXd correlation = alpha;
  std::vector<bool> selected(static_cast<std::size_t>(atoms.cols()), false);
  Eigen::MatrixXd sub_gram;
  Eigen::VectorXd sub_alpha;

  while (code.size() < sparsity) {
    Eigen::Index best = -1;
    double best_abs = 0.0;
    for (Eigen::Index k = 0; k < correlation.size(); ++k) {
      if (selected[static_cast<std::size_t>(k)]) continue;
      const double a = std::fabs(correlation[k]);
      if (a > best_abs) {
        best_abs = a;
        best = k;
      }
    }
    if (best < 0) break;

    const auto s = static_cast<Eigen::Index>(code.size());
    Eigen::MatrixXd grown(s + 1, s + 1);
    grown.topLeftCorner(s, s) = sub_gram;
    for (Eigen::Index t = 0; t < s; ++t) {
      grown(t, s) = gram(code.support[static_cast<std::size_t>(t)], best);
      grown(s, t) = grown(t, s);
    }
    grown(s, s) = gram(best, best);
    Eigen::LLT<Eigen::MatrixXd> llt(grown);
    if (llt.info() != Eigen::Success) break;
    const double pivot = llt.matrixLLT()(s, s);
    if (!(pivot * pivot > kPivotFloor)) break;

    selected[static_cast<std::size_t>(best)] = true;
    code.support.push_back(best);
    sub_gram = std::move(grown);
    sub_alpha.conservativeResize(s + 1);
    sub_alpha[s] = alpha[best];
    code.values = llt.solve(sub_alpha);

    if (residual_of(atoms, code, signal).norm() < kResidualFloor) break;
    correlation = alpha;
    for (std::size_t t = 0; t < code.size(); ++t) {
      correlation.noalias() -= code.values[static_cast<Eigen::Index>(t)] * gram.col(code.support[t]);
    }
  }
  return code;
}

}  // namespace detail

Eigen::VectorXd omp(const Eigen::MatrixXd& atoms, const Eigen::Ref<const Eigen::VectorXd>& signal,
                    std::size_t sparsity) {
  require_unit_norm_columns(atoms);
  if (signal.size() != atoms.rows()) throw ParameterError("signal length does not match atom dimension");
  const auto limit = static_cast<std::size_t>(std::min(atoms.rows(), atoms.cols()));
  if (sparsity == 0 || sparsity > limit) {
    throw ParameterError("OMP sparsity must lie in [1, min(d, K)] = [1, " + std::to_string(limit) + "]");
  }
  const Eigen::MatrixXd gram = atoms.transpose() * atoms;
  const detail::SparseCode code = detail::omp_with_gram(atoms, gram, signal, sparsity);
  Eigen::VectorXd dense = Eigen::VectorXd::Zero(atoms.cols());
  for (std::size_t t = 0; t < code.size(); ++t) dense[code.support[t]] = code.values[static_cast<Eigen::Index>(t)];
  return dense;
}

Eigen::VectorXd omp(const Dictionary& dictionary, const Eigen::Ref<const Eigen::VectorXd>& signal,
                    std::size_t sparsity) {
  return omp(dictionary.atoms(), signal, sparsity);
}

}  // namespace lrrfuse
