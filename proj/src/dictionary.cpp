#include <cmath>
#include <string>

#include "lrrfuse/errors.hpp"
#include "lrrfuse/sparse_coding.hpp"

namespace lrrfuse {

void require_unit_norm_columns(const Eigen::MatrixXd& atoms) {
  for (Eigen::Index k = 0; k < atoms.cols(); ++k) {
    const double norm = atoms.col(k).norm();
    if (!(std::fabs(norm - 1.0) <= Dictionary::kUnitNormTolerance)) {
      throw ParameterError("dictionary atom " + std::to_string(k) + " is not unit norm (norm " +
                           std::to_string(norm) + ")");
    }
  }
}

Dictionary::Dictionary(Eigen::MatrixXd atoms, std::vector<std::uint32_t> labels, std::size_t bins)
    : atoms_(std::move(atoms)), labels_(std::move(labels)), bins_(bins) {
  if (atoms_.cols() == 0 || atoms_.rows() == 0) throw ParameterError("dictionary must have at least one atom");
  if (labels_.size() != static_cast<std::size_t>(atoms_.cols())) {
    throw ParameterError("dictionary label count does not match atom count");
  }
  for (std::uint32_t label : labels_) {
    if (label > bins_) throw ParameterError("dictionary label exceeds class range");
  }
  require_unit_norm_columns(atoms_);
}

std::vector<std::size_t> Dictionary::atoms_per_class() const {
  std::vector<std::size_t> counts(bins_ + 1, 0);
  for (std::uint32_t label : labels_) ++counts[label];
  return counts;
}

}  // namespace lrrfuse
