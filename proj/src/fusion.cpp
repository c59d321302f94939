#include "lrrfuse/fusion.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <future>
#include <numeric>
#include <optional>
#include <string>

#include "lrrfuse/errors.hpp"
#include "lrrfuse/hog.hpp"

namespace lrrfuse {
namespace {

class StageTimer {
 public:
  explicit StageTimer(std::vector<std::pair<std::string, double>>& out) : out_(out) {}
  void mark(std::string stage) {
    const auto now = std::chrono::steady_clock::now();
    out_.emplace_back(std::move(stage), std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

 private:
  std::vector<std::pair<std::string, double>>& out_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

SolveDiagnostics diagnostics_of(const LrrSolution& s) {
  return SolveDiagnostics{s.iterations, s.converged, s.feasibility_residual, s.split_residual, s.objective};
}

}  // namespace

void validate(const FusionConfig& config) {
  if (config.window == 0) throw ParameterError("window must be positive");
  if (config.step == 0) throw ParameterError("step must be positive");
  if (config.bins == 0) throw ParameterError("HOG bin count must be positive");
  if (!(config.hog_threshold > 0.0 && config.hog_threshold < 1.0)) {
    throw ParameterError("HOG threshold must lie in (0, 1)");
  }
  if (config.ksvd.atoms == 0 || config.ksvd.sparsity == 0 || config.ksvd.iterations == 0) {
    throw ParameterError("K-SVD atoms, sparsity and iterations must be positive");
  }
  validate(config.lrr);
}

FusedCoefficients fuse_coefficients(const Eigen::MatrixXd& za, const Eigen::MatrixXd& zb, TieBreak tie_break) {
  if (za.rows() != zb.rows() || za.cols() != zb.cols()) {
    throw ParameterError("coefficient matrices differ in shape");
  }
  const Eigen::VectorXd l1_a = column_l1_norms(za);
  const Eigen::VectorXd l1_b = column_l1_norms(zb);
  FusedCoefficients fused{Eigen::MatrixXd(za.rows(), za.cols()),
                          std::vector<Source>(static_cast<std::size_t>(za.cols()))};
  for (Eigen::Index i = 0; i < za.cols(); ++i) {
    const bool pick_a = tie_break == TieBreak::kPreferB ? l1_a[i] > l1_b[i] : l1_a[i] >= l1_b[i];
    fused.z.col(i) = pick_a ? za.col(i) : zb.col(i);
    fused.provenance[static_cast<std::size_t>(i)] = pick_a ? Source::kA : Source::kB;
  }
  return fused;
}

GrayImage reconstruct_fused(const Dictionary& dictionary, const FusedCoefficients& fused,
                            const PatchGeometry& geometry) {
  if (static_cast<std::size_t>(fused.z.rows()) != dictionary.size()) {
    throw ParameterError("fused coefficients do not match the dictionary size");
  }
  if (static_cast<std::size_t>(fused.z.cols()) != geometry.count()) {
    throw ParameterError("fused coefficients do not match the patch count");
  }
  if (dictionary.dimension() != geometry.patch_length()) {
    throw ParameterError("dictionary atom length does not match the patch size");
  }
  const Eigen::MatrixXd patches = dictionary.atoms() * fused.z;
  return overlap_average(geometry, patches);
}

GrayImage provenance_image(const std::vector<Source>& provenance, const PatchGeometry& geometry) {
  if (provenance.size() != geometry.count()) throw ParameterError("provenance does not match the patch grid");
  std::vector<double> pixels(provenance.size());
  for (std::size_t i = 0; i < provenance.size(); ++i) pixels[i] = provenance[i] == Source::kA ? 1.0 : 0.0;
  return GrayImage(geometry.grid_rows(), geometry.grid_cols(), std::move(pixels));
}

TrainedDictionary train_dictionary(std::span<const PatchMatrix> sources, const FusionConfig& config) {
  validate(config);
  if (sources.empty()) throw ParameterError("no patch sources to train on");
  const std::size_t length = sources.front().geometry.patch_length();
  // Pool in content order so that swapping the sources cannot change D.
  std::vector<std::size_t> order(sources.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const Eigen::MatrixXd& mx = sources[x].data;
    const Eigen::MatrixXd& my = sources[y].data;
    if (mx.cols() != my.cols()) return mx.cols() < my.cols();
    return std::lexicographical_compare(mx.data(), mx.data() + mx.size(), my.data(), my.data() + my.size());
  });
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> members(config.bins + 1);
  for (std::size_t s : order) {
    if (sources[s].geometry.patch_length() != length) throw ParameterError("patch sources differ in window size");
    const auto labels = classify_columns(sources[s], config.bins, config.hog_threshold);
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i].value].emplace_back(s, i);
  }

  std::vector<Eigen::MatrixXd> classes(config.bins + 1);
  std::vector<std::size_t> populations(config.bins + 1);
  for (std::size_t j = 0; j < members.size(); ++j) {
    populations[j] = members[j].size();
    classes[j].resize(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(members[j].size()));
    for (std::size_t t = 0; t < members[j].size(); ++t) {
      const auto [s, i] = members[j][t];
      classes[j].col(static_cast<Eigen::Index>(t)) = sources[s].data.col(static_cast<Eigen::Index>(i));
    }
  }
  return TrainedDictionary{build_global_dictionary(classes, config.ksvd), std::move(populations)};
}

FusionResult fuse_images(const GrayImage& a, const GrayImage& b, const FusionConfig& config,
                         const Dictionary* pretrained, const MatrixSink& sink) {
  validate(config);
  if (!a.same_shape(b)) throw ParameterError("source images differ in size");

  FusionReport report;
  StageTimer timer(report.timings);
  auto dump = [&](std::string_view name, const Eigen::MatrixXd& m) {
    if (sink) sink(name, m);
  };

  // Sliding-window patch matrices.
  const PatchMatrix vi_a = extract_patches(a, config.window, config.step);
  const PatchMatrix vi_b = extract_patches(b, config.window, config.step);
  const PatchGeometry& geometry = vi_a.geometry;
  report.patches_per_image = geometry.count();
  report.grid_rows = geometry.grid_rows();
  report.grid_cols = geometry.grid_cols();
  dump("vi_a", vi_a.data);
  dump("vi_b", vi_b.data);
  timer.mark("patches");

  // Dictionary over the pooled patches of both sources.
  std::optional<Dictionary> dictionary;
  if (pretrained) {
    if (pretrained->dimension() != geometry.patch_length()) {
      throw ParameterError("supplied dictionary atom length " + std::to_string(pretrained->dimension()) +
                           " does not match window " + std::to_string(config.window));
    }
    dictionary = *pretrained;
    report.dictionary_supplied = true;
  } else {
    const std::array<PatchMatrix, 2> pooled{vi_a, vi_b};
    TrainedDictionary trained = train_dictionary(pooled, config);
    report.class_populations = std::move(trained.class_populations);
    dictionary = std::move(trained.dictionary);
  }
  report.dictionary_atoms = dictionary->size();
  report.atoms_per_class = dictionary->atoms_per_class();
  dump("dictionary", dictionary->atoms());
  timer.mark("dictionary");

  // The two solves share nothing and may run concurrently.
  const Eigen::MatrixXd& atoms = dictionary->atoms();
  auto solve_a = std::async(std::launch::async, [&] { return lrr_solve(vi_a.data, atoms, config.lrr); });
  const LrrSolution sol_b = lrr_solve(vi_b.data, atoms, config.lrr);
  const LrrSolution sol_a = solve_a.get();
  report.solve_a = diagnostics_of(sol_a);
  report.solve_b = diagnostics_of(sol_b);
  for (const auto& [name, sol] : {std::pair{"A", &sol_a}, std::pair{"B", &sol_b}}) {
    if (!sol->converged) {
      report.warnings.push_back(std::string("LRR solve for source ") + name + " stopped at the iteration cap (" +
                                std::to_string(sol->iterations) + ") without reaching tolerance");
    }
  }
  dump("z_a", sol_a.z);
  dump("e_a", sol_a.e);
  dump("z_b", sol_b.z);
  dump("e_b", sol_b.e);
  timer.mark("lrr");

  // Choose-max, then back to pixels.
  FusedCoefficients fused = fuse_coefficients(sol_a.z, sol_b.z, config.tie_break);
  for (Source s : fused.provenance) (s == Source::kA ? report.from_a : report.from_b) += 1;
  dump("z_f", fused.z);
  GrayImage image = reconstruct_fused(*dictionary, fused, geometry);
  timer.mark("reconstruct");

  return FusionResult{std::move(image), std::move(fused), std::move(*dictionary), std::move(report)};
}

}  // namespace lrrfuse
