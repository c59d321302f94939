#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "lrrfuse/errors.hpp"
#include "lrrfuse/sparse_coding.hpp"
#include "sparse_internal.hpp"

namespace lrrfuse {
namespace {

constexpr double kCoherenceLimit = 0.99;
// Normalized columns this close are the same direction.
constexpr double kDuplicateLimit = 1.0 - 1e-12;

using detail::SparseCode;

std::vector<std::size_t> seeded_permutation(std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = count; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

bool is_duplicate(const Eigen::MatrixXd& chosen, Eigen::Index used, const Eigen::VectorXd& unit) {
  for (Eigen::Index k = 0; k < used; ++k) {
    if (std::fabs(chosen.col(k).dot(unit)) > kDuplicateLimit) return true;
  }
  return false;
}

// Greedy scan over `order`, keeping nonzero normalized columns that do not
// duplicate an earlier pick.
Eigen::MatrixXd pick_distinct(const Eigen::MatrixXd& training, const std::vector<std::size_t>& order,
                              std::size_t limit) {
  Eigen::MatrixXd chosen(training.rows(), static_cast<Eigen::Index>(std::min(limit, order.size())));
  Eigen::Index used = 0;
  for (std::size_t j : order) {
    if (static_cast<std::size_t>(used) == limit) break;
    const double norm = training.col(static_cast<Eigen::Index>(j)).norm();
    if (!(norm > 0.0)) continue;
    const Eigen::VectorXd unit = training.col(static_cast<Eigen::Index>(j)) / norm;
    if (is_duplicate(chosen, used, unit)) continue;
    chosen.col(used++) = unit;
  }
  return chosen.leftCols(used);
}


// Leading left singular vector of `error`, by power iteration on the scatter
// matrix warm-started at `start`. Starting from the current atom, every step
// can only raise the captured energy, so the atom update never increases the
// representation error. Empty when `error` is zero.
Eigen::VectorXd leading_direction(const Eigen::MatrixXd& error, const Eigen::VectorXd& start) {
  constexpr int kMaxSteps = 1000;
  constexpr double kStepTolerance = 1e-13;
  const Eigen::Index d = error.rows();
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  scatter.selfadjointView<Eigen::Lower>().rankUpdate(error);
  scatter.triangularView<Eigen::StrictlyUpper>() = scatter.transpose();
  if (!(scatter.diagonal().sum() > 0.0)) return {};

  Eigen::VectorXd u = start;
  Eigen::VectorXd next = scatter * u;
  if (!(next.norm() > 0.0)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter);
    if (eig.info() != Eigen::Success) throw NumericError("K-SVD eigendecomposition failed");
    u = eig.eigenvectors().col(d - 1);
    return u.dot(start) < 0.0 ? Eigen::VectorXd(-u) : u;
  }
  for (int step = 0; step < kMaxSteps; ++step) {
    next.normalize();
    const double change = (next - u).norm();
    u = next;
    if (change < kStepTolerance) break;
    next.noalias() = scatter * u;
  }
  return u;
}

class KsvdTrainer {
 public:
  KsvdTrainer(const Eigen::MatrixXd& training, const KsvdParams& params)
      : training_(training),
        params_(params),
        rng_(params.seed),
        sparsity_(std::min({params.sparsity, params.atoms, static_cast<std::size_t>(training.rows())})),
        codes_(static_cast<std::size_t>(training.cols())),
        residuals_(training) {
    const auto order = seeded_permutation(static_cast<std::size_t>(training.cols()), rng_);
    atoms_ = pick_distinct(training, order, params.atoms);
    if (static_cast<std::size_t>(atoms_.cols()) < params.atoms) {
      throw ParameterError("K-SVD needs " + std::to_string(params.atoms) + " distinct nonzero training columns, found " +
                           std::to_string(atoms_.cols()));
    }
  }

  KsvdResult run() {
    KsvdResult result;
    for (std::size_t it = 0; it < params_.iterations; ++it) {
      sparse_code_stage();
      reseed_unused(update_atoms());
      resolve_coherent_atoms();
      recompute_residuals();
      result.error_history.push_back(residuals_.squaredNorm());
    }
    final_cleanup();
    result.atoms = atoms_;
    result.replaced_atoms = replaced_;
    return result;
  }

 private:
  // Safeguarded: a column keeps its previous code if the new one is worse
  // under the current atoms.
  void sparse_code_stage() {
    const Eigen::MatrixXd gram = atoms_.transpose() * atoms_;
    for (Eigen::Index j = 0; j < training_.cols(); ++j) {
      SparseCode fresh = detail::omp_with_gram(atoms_, gram, training_.col(j), sparsity_);
      Eigen::VectorXd residual = detail::residual_of(atoms_, fresh, training_.col(j));
      if (residual.squaredNorm() <= residuals_.col(j).squaredNorm()) {
        codes_[static_cast<std::size_t>(j)] = std::move(fresh);
        residuals_.col(j) = residual;
      }
    }
  }

  struct Use {
    std::size_t column;
    std::size_t slot;
  };

  std::vector<std::vector<Use>> users_by_atom() const {
    std::vector<std::vector<Use>> users(static_cast<std::size_t>(atoms_.cols()));
    for (std::size_t j = 0; j < codes_.size(); ++j) {
      for (std::size_t t = 0; t < codes_[j].size(); ++t) {
        users[static_cast<std::size_t>(codes_[j].support[t])].push_back({j, t});
      }
    }
    return users;
  }

  // Rank-1 update of each atom and its coefficient row over the columns that
  // use it. Returns which atoms had users.
  std::vector<bool> update_atoms() {
    const auto users = users_by_atom();
    std::vector<bool> used(users.size(), false);
    const Eigen::Index d = atoms_.rows();
    for (Eigen::Index k = 0; k < atoms_.cols(); ++k) {
      const auto& who = users[static_cast<std::size_t>(k)];
      if (who.empty()) continue;
      used[static_cast<std::size_t>(k)] = true;
      Eigen::MatrixXd error(d, static_cast<Eigen::Index>(who.size()));
      for (std::size_t t = 0; t < who.size(); ++t) {
        const double coeff = codes_[who[t].column].values[static_cast<Eigen::Index>(who[t].slot)];
        error.col(static_cast<Eigen::Index>(t)) =
            residuals_.col(static_cast<Eigen::Index>(who[t].column)) + coeff * atoms_.col(k);
      }
      Eigen::VectorXd leading = leading_direction(error, atoms_.col(k));
      if (leading.size() == 0) continue;
      const Eigen::VectorXd row = error.transpose() * leading;
      atoms_.col(k) = leading;
      for (std::size_t t = 0; t < who.size(); ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        codes_[who[t].column].values[static_cast<Eigen::Index>(who[t].slot)] = row[ti];
        residuals_.col(static_cast<Eigen::Index>(who[t].column)) = error.col(ti) - row[ti] * leading;
      }
    }
    return used;
  }

  bool coherent_with_others(const Eigen::VectorXd& unit, Eigen::Index skip) const {
    for (Eigen::Index i = 0; i < atoms_.cols(); ++i) {
      if (i != skip && std::fabs(atoms_.col(i).dot(unit)) > kCoherenceLimit) return true;
    }
    return false;
  }

  // Training columns from worst to best represented (stable on ties).
  std::vector<Eigen::Index> worst_first() const {
    const Eigen::VectorXd errors = residuals_.colwise().squaredNorm().transpose();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(errors.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return errors[a] > errors[b]; });
    return order;
  }

  // First column in `order` not coherent with the other atoms; a seeded
  // random direction if none qualifies.
  Eigen::VectorXd replacement_for(Eigen::Index target, const std::vector<Eigen::Index>& order) {
    for (Eigen::Index j : order) {
      const double norm = training_.col(j).norm();
      if (!(norm > 0.0)) continue;
      const Eigen::VectorXd unit = training_.col(j) / norm;
      if (!coherent_with_others(unit, target)) return unit;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
      Eigen::VectorXd v(atoms_.rows());
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng_);
      const double norm = v.norm();
      if (!(norm > 0.0)) continue;
      v /= norm;
      if (!coherent_with_others(v, target) || atoms_.cols() == 1) return v;
    }
  }

  void reseed_unused(const std::vector<bool>& used) {
    std::vector<Eigen::Index> order;
    for (Eigen::Index k = 0; k < atoms_.cols(); ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      if (order.empty()) order = worst_first();
      atoms_.col(k) = replacement_for(k, order);
      ++replaced_;
    }
  }

  // Removes atom k from every code that uses it, pushing its contribution
  // back into the residual. Returns the affected columns.
  std::vector<std::size_t> strip_atom(Eigen::Index k) {
    std::vector<std::size_t> affected;
    for (std::size_t j = 0; j < codes_.size(); ++j) {
      SparseCode& code = codes_[j];
      for (std::size_t t = 0; t < code.size(); ++t) {
        if (code.support[t] != k) continue;
        const auto ti = static_cast<Eigen::Index>(t);
        residuals_.col(static_cast<Eigen::Index>(j)).noalias() += code.values[ti] * atoms_.col(k);
        code.support.erase(code.support.begin() + static_cast<long>(t));
        const Eigen::Index tail = code.values.size() - ti - 1;
        code.values.segment(ti, tail) = code.values.tail(tail).eval();
        code.values.conservativeResize(code.values.size() - 1);
        affected.push_back(j);
        break;
      }
    }
    return affected;
  }

  bool coherent_with_earlier(const Eigen::MatrixXd& gram, Eigen::Index j) const {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (std::fabs(gram(i, j)) > kCoherenceLimit) return true;
    }
    return false;
  }

  void refresh_gram_column(Eigen::MatrixXd& gram, Eigen::Index j) const {
    gram.col(j).noalias() = atoms_.transpose() * atoms_.col(j);
    gram.row(j) = gram.col(j).transpose();
  }

  // Re-seeds each atom that duplicates an earlier one, but only when
  // re-coding its users keeps the total error from growing.
  void resolve_coherent_atoms() {
    Eigen::MatrixXd gram = atoms_.transpose() * atoms_;
    std::vector<Eigen::Index> order;
    for (Eigen::Index target = 1; target < atoms_.cols(); ++target) {
      if (!coherent_with_earlier(gram, target)) continue;
      if (order.empty()) order = worst_first();

      const Eigen::VectorXd saved_atom = atoms_.col(target);
      std::vector<std::pair<std::size_t, SparseCode>> saved_codes;
      std::vector<Eigen::VectorXd> saved_residuals;
      double before = 0.0;
      for (std::size_t j = 0; j < codes_.size(); ++j) {
        const auto& support = codes_[j].support;
        if (std::find(support.begin(), support.end(), target) == support.end()) continue;
        saved_codes.emplace_back(j, codes_[j]);
        saved_residuals.push_back(residuals_.col(static_cast<Eigen::Index>(j)));
        before += saved_residuals.back().squaredNorm();
      }

      strip_atom(target);
      atoms_.col(target) = replacement_for(target, order);
      refresh_gram_column(gram, target);
      double after = 0.0;
      for (const auto& [j, code] : saved_codes) {
        const auto col = static_cast<Eigen::Index>(j);
        SparseCode fresh = detail::omp_with_gram(atoms_, gram, training_.col(col), sparsity_);
        Eigen::VectorXd residual = detail::residual_of(atoms_, fresh, training_.col(col));
        if (residual.squaredNorm() <= residuals_.col(col).squaredNorm()) {
          codes_[j] = std::move(fresh);
          residuals_.col(col) = residual;
        }
        after += residuals_.col(col).squaredNorm();
      }
      if (after > before) {
        atoms_.col(target) = saved_atom;
        refresh_gram_column(gram, target);
        for (std::size_t t = 0; t < saved_codes.size(); ++t) {
          codes_[saved_codes[t].first] = std::move(saved_codes[t].second);
          residuals_.col(static_cast<Eigen::Index>(saved_codes[t].first)) = saved_residuals[t];
        }
      } else {
        ++replaced_;
      }
    }
  }

  // Unconditional: no two atoms may stay coherent past training.
  void final_cleanup() {
    Eigen::MatrixXd gram = atoms_.transpose() * atoms_;
    std::vector<Eigen::Index> order;
    for (Eigen::Index target = 1; target < atoms_.cols(); ++target) {
      if (!coherent_with_earlier(gram, target)) continue;
      if (order.empty()) order = worst_first();
      strip_atom(target);
      atoms_.col(target) = replacement_for(target, order);
      refresh_gram_column(gram, target);
      ++replaced_;
    }
  }

  void recompute_residuals() {
    for (std::size_t j = 0; j < codes_.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      residuals_.col(col) = detail::residual_of(atoms_, codes_[j], training_.col(col));
    }
  }

  const Eigen::MatrixXd& training_;
  KsvdParams params_;
  std::mt19937_64 rng_;
  std::size_t sparsity_;
  Eigen::MatrixXd atoms_;
  std::vector<SparseCode> codes_;
  Eigen::MatrixXd residuals_;
  std::size_t replaced_ = 0;
};

}  // namespace

Eigen::MatrixXd distinct_normalized_columns(const Eigen::MatrixXd& training, std::size_t limit) {
  std::vector<std::size_t> order(static_cast<std::size_t>(training.cols()));
  std::iota(order.begin(), order.end(), 0);
  return pick_distinct(training, order, limit);
}

KsvdResult ksvd_train(const Eigen::MatrixXd& training, const KsvdParams& params) {
  if (training.cols() == 0) throw ParameterError("K-SVD training set is empty");
  if (training.rows() == 0) throw ParameterError("K-SVD training vectors have zero dimension");
  if (params.atoms == 0 || params.sparsity == 0 || params.iterations == 0) {
    throw ParameterError("K-SVD atoms, sparsity and iterations must be positive");
  }
  for (Eigen::Index j = 0; j < training.cols(); ++j) {
    if (!training.col(j).allFinite()) throw ParameterError("K-SVD training data contains non-finite values");
  }
  return KsvdTrainer(training, params).run();
}

Dictionary build_global_dictionary(std::span<const Eigen::MatrixXd> classes, const KsvdParams& params) {
  if (classes.empty()) throw ParameterError("no patch classes given");
  const std::size_t bins = classes.size() - 1;
  Eigen::Index dimension = -1;
  for (const auto& v : classes) {
    if (v.cols() == 0) continue;
    if (dimension >= 0 && v.rows() != dimension) throw ParameterError("patch classes differ in dimension");
    dimension = v.rows();
  }
  if (dimension < 0) throw NumericError("every patch class is empty");

  std::vector<Eigen::MatrixXd> parts;
  std::vector<std::uint32_t> labels;
  Eigen::Index total = 0;
  for (std::size_t j = 0; j < classes.size(); ++j) {
    const Eigen::MatrixXd& v = classes[j];
    if (v.cols() == 0) continue;
    Eigen::MatrixXd atoms = distinct_normalized_columns(v, params.atoms);
    if (static_cast<std::size_t>(atoms.cols()) == params.atoms) {
      KsvdParams per_class = params;
      per_class.seed = params.seed + j;
      atoms = ksvd_train(v, per_class).atoms;
    }
    labels.insert(labels.end(), static_cast<std::size_t>(atoms.cols()), static_cast<std::uint32_t>(j));
    total += atoms.cols();
    parts.push_back(std::move(atoms));
  }

  Eigen::MatrixXd global(dimension, std::max<Eigen::Index>(total, 1));
  if (total == 0) {
    // Only all-zero patches: a constant atom keeps the dictionary well defined.
    global.setConstant(1.0 / std::sqrt(static_cast<double>(dimension)));
    labels.assign(1, 0);
  } else {
    Eigen::Index offset = 0;
    for (const auto& part : parts) {
      global.middleCols(offset, part.cols()) = part;
      offset += part.cols();
    }
  }
  return Dictionary(std::move(global), std::move(labels), bins);
}

}  // namespace lrrfuse
