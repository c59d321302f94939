#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lrrfuse {

/// d x K matrix of unit-norm atoms. Each atom remembers which patch class
/// (0..L) produced it.
class Dictionary {
 public:
  static constexpr double kUnitNormTolerance = 1e-10;

  /// Throws ParameterError unless every atom has unit norm, K >= 1, and every
  /// label is <= bins.
  Dictionary(Eigen::MatrixXd atoms, std::vector<std::uint32_t> labels, std::size_t bins);

  const Eigen::MatrixXd& atoms() const { return atoms_; }
  std::size_t dimension() const { return static_cast<std::size_t>(atoms_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(atoms_.cols()); }
  /// L, the number of orientation bins; labels range over 0..L.
  std::size_t bins() const { return bins_; }
  std::span<const std::uint32_t> labels() const { return labels_; }

  /// Number of atoms carrying each label 0..L.
  std::vector<std::size_t> atoms_per_class() const;

 private:
  Eigen::MatrixXd atoms_;
  std::vector<std::uint32_t> labels_;
  std::size_t bins_;
};

/// Throws ParameterError if any column of `atoms` is not unit norm within
/// Dictionary::kUnitNormTolerance.
void require_unit_norm_columns(const Eigen::MatrixXd& atoms);

struct KsvdParams {
  std::size_t atoms = 128;     // K_sub, atoms per class
  std::size_t sparsity = 6;    // T0
  std::size_t iterations = 30;
  std::uint64_t seed = 0;
};

/// Orthogonal matching pursuit. Greedily adds the atom most correlated with
/// the residual and refits all selected coefficients by least squares, until
/// `sparsity` atoms are selected or the residual norm drops below 1e-12.
/// Returns a dense K-vector with at most `sparsity` nonzeros.
Eigen::VectorXd omp(const Eigen::MatrixXd& atoms, const Eigen::Ref<const Eigen::VectorXd>& signal,
                    std::size_t sparsity);
Eigen::VectorXd omp(const Dictionary& dictionary, const Eigen::Ref<const Eigen::VectorXd>& signal,
                    std::size_t sparsity);

struct KsvdResult {
  Eigen::MatrixXd atoms;
  /// Total squared representation error after each iteration.
  std::vector<double> error_history;
  /// Atoms re-seeded because they went unused or duplicated another atom.
  std::size_t replaced_atoms = 0;
};

/// Learns `params.atoms` unit-norm atoms from the columns of `training`.
///
/// Initialization draws distinct nonzero training columns in a seeded random
/// order. Each iteration sparse-codes every column (a column keeps its
/// previous code when the new one is worse), then updates atoms one at a time
/// from the rank-1 SVD of the residual restricted to that atom's users.
/// Unused atoms, and atoms whose |inner product| with another exceeds 0.99,
/// are re-seeded from the worst-represented training column.
///
/// Throws ParameterError when `training` has fewer distinct nonzero columns
/// than requested atoms.
KsvdResult ksvd_train(const Eigen::MatrixXd& training, const KsvdParams& params);

/// Nonzero columns of `training`, normalized, with exact duplicates dropped,
/// in column order. Stops after `limit` atoms.
Eigen::MatrixXd distinct_normalized_columns(const Eigen::MatrixXd& training, std::size_t limit);

/// Concatenates one sub-dictionary per non-empty class, in class order.
/// Classes with fewer distinct patches than params.atoms contribute those
/// patches normalized, without training. `classes` holds V_0..V_L.
Dictionary build_global_dictionary(std::span<const Eigen::MatrixXd> classes, const KsvdParams& params);

}  // namespace lrrfuse
