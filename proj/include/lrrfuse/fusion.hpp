#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lrrfuse/image.hpp"
#include "lrrfuse/lrr.hpp"
#include "lrrfuse/patching.hpp"
#include "lrrfuse/sparse_coding.hpp"

namespace lrrfuse {

/// Which coefficient column wins when both l1 norms are equal.
enum class TieBreak {
  kPreferB,  // strict ">" for A, as in the choose-max rule
  kPreferA,
};

enum class Source : std::uint8_t { kA, kB };

struct FusionConfig {
  std::size_t window = 8;
  std::size_t step = 1;
  std::size_t bins = 6;
  double hog_threshold = 0.3;
  KsvdParams ksvd{};
  LrrParams lrr{};
  TieBreak tie_break = TieBreak::kPreferB;
};

/// Throws ParameterError for out-of-range settings.
void validate(const FusionConfig& config);

struct FusedCoefficients {
  Eigen::MatrixXd z;
  std::vector<Source> provenance;
};

/// Column-wise choose-max on l1 norms.
FusedCoefficients fuse_coefficients(const Eigen::MatrixXd& za, const Eigen::MatrixXd& zb,
                                    TieBreak tie_break = TieBreak::kPreferB);

/// D * Z_f, reshaped to patches and overlap-averaged into an image.
GrayImage reconstruct_fused(const Dictionary& dictionary, const FusedCoefficients& fused,
                            const PatchGeometry& geometry);

/// Grid-sized (R x C) map of patch provenance: 1 where A won, 0 where B won.
GrayImage provenance_image(const std::vector<Source>& provenance, const PatchGeometry& geometry);

struct TrainedDictionary {
  Dictionary dictionary;
  /// Pooled patch count per class 0..L.
  std::vector<std::size_t> class_populations;
};

/// Pools the columns of every source, classifies them by dominant
/// orientation, trains one sub-dictionary per class and concatenates them.
/// Sources are pooled in lexicographic order of their patch data, so the
/// result does not depend on the order they are passed in.
TrainedDictionary train_dictionary(std::span<const PatchMatrix> sources, const FusionConfig& config);

struct SolveDiagnostics {
  std::size_t iterations = 0;
  bool converged = false;
  double feasibility_residual = 0.0;
  double split_residual = 0.0;
  double objective = 0.0;
};

struct FusionReport {
  std::size_t patches_per_image = 0;
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  /// Empty when a pre-trained dictionary was supplied.
  std::vector<std::size_t> class_populations;
  std::size_t dictionary_atoms = 0;
  std::vector<std::size_t> atoms_per_class;
  bool dictionary_supplied = false;
  SolveDiagnostics solve_a;
  SolveDiagnostics solve_b;
  std::size_t from_a = 0;
  std::size_t from_b = 0;
  /// Stage name and wall-clock seconds, in execution order.
  std::vector<std::pair<std::string, double>> timings;
  std::vector<std::string> warnings;
};

struct FusionResult {
  GrayImage fused;
  FusedCoefficients coefficients;
  Dictionary dictionary;
  FusionReport report;
};

/// Receives intermediate matrices by name ("vi_a", "z_a", "e_a", ..., "z_f").
using MatrixSink = std::function<void(std::string_view, const Eigen::MatrixXd&)>;

/// Full pipeline: patches, pooled dictionary (unless `pretrained` is given),
/// two LRR solves, choose-max fusion, reconstruction. Solver non-convergence
/// is recorded as a warning.
FusionResult fuse_images(const GrayImage& a, const GrayImage& b, const FusionConfig& config,
                         const Dictionary* pretrained = nullptr, const MatrixSink& sink = {});

}  // namespace lrrfuse
