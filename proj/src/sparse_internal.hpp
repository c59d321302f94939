#pragma once

#include <Eigen/Core>
#include <vector>

namespace lrrfuse::detail {

struct SparseCode {
  std::vector<Eigen::Index> support;
  Eigen::VectorXd values;

  std::size_t size() const { return support.size(); }
};

/// OMP against precomputed gram = atoms^T atoms.
SparseCode omp_with_gram(const Eigen::MatrixXd& atoms, const Eigen::MatrixXd& gram,
                         const Eigen::Ref<const Eigen::VectorXd>& signal, std::size_t sparsity);

/// signal - atoms * code.
Eigen::VectorXd residual_of(const Eigen::MatrixXd& atoms, const SparseCode& code,
                            const Eigen::Ref<const Eigen::VectorXd>& signal);

}  // namespace lrrfuse::detail
