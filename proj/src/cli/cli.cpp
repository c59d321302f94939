#include "lrrfuse/cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lrrfuse/cli/config.hpp"
#include "lrrfuse/cli/masks.hpp"
#include "lrrfuse/errors.hpp"
#include "lrrfuse/fusion.hpp"
#include "lrrfuse/image.hpp"
#include "lrrfuse/image_io.hpp"
#include "lrrfuse/matrix_io.hpp"
#include "lrrfuse/metrics.hpp"
#include "lrrfuse/patching.hpp"

namespace lrrfuse::cli {

namespace fs = std::filesystem;

namespace {

std::string fixed4(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

nlohmann::json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

nlohmann::json metrics_json(const MetricsReport& m) {
  return {{"ag", m.ag}, {"psnr", number_or_inf(m.psnr)}, {"ssim", m.ssim}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void require_same_size(const GrayImage& x, const GrayImage& y, const std::string& what) {
  if (!x.same_shape(y)) {
    throw ParameterError(what + " differ in size (" + std::to_string(x.height()) + "x" +
                         std::to_string(x.width()) + " vs " + std::to_string(y.height()) + "x" +
                         std::to_string(y.width()) + ")");
  }
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" || ext == ".pnm" || ext == ".png";
}

std::vector<fs::path> images_in(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) found.push_back(entry.path());
  }
  std::sort(found.begin(), found.end(),
            [](const fs::path& x, const fs::path& y) { return x.filename() < y.filename(); });
  return found;
}

// Pipeline flags shared by fuse, bench and train-dict. Only flags that were
// actually given override the config file.
struct PipelineFlags {
  std::string config_path;
  std::size_t window = 0, step = 0, bins = 0, atoms = 0, ksvd_iters = 0, sparsity = 0, max_iters = 0;
  double hog_threshold = 0.0, lambda = 0.0, tol = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::function<void(FusionConfig&)>> setters;

  void add_to(CLI::App& app, bool solver_flags) {
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    bind(app, "--window", window, "patch side n", [this](FusionConfig& c) { c.window = window; });
    bind(app, "--step", step, "patch stride s", [this](FusionConfig& c) { c.step = step; });
    bind(app, "--bins", bins, "orientation classes L", [this](FusionConfig& c) { c.bins = bins; });
    bind(app, "--hog-threshold", hog_threshold, "dominance threshold T",
         [this](FusionConfig& c) { c.hog_threshold = hog_threshold; });
    bind(app, "--atoms", atoms, "atoms per class", [this](FusionConfig& c) { c.ksvd.atoms = atoms; });
    bind(app, "--ksvd-iters", ksvd_iters, "K-SVD iterations",
         [this](FusionConfig& c) { c.ksvd.iterations = ksvd_iters; });
    bind(app, "--sparsity", sparsity, "OMP sparsity T0",
         [this](FusionConfig& c) { c.ksvd.sparsity = sparsity; });
    bind(app, "--seed", seed, "training seed", [this](FusionConfig& c) { c.ksvd.seed = seed; });
    if (solver_flags) {
      bind(app, "--lambda", lambda, "error weight", [this](FusionConfig& c) { c.lrr.lambda = lambda; });
      bind(app, "--tol", tol, "ALM stopping tolerance", [this](FusionConfig& c) { c.lrr.tol = tol; });
      bind(app, "--max-iters", max_iters, "ALM iteration cap",
           [this](FusionConfig& c) { c.lrr.max_iterations = max_iters; });
    }
  }

  template <typename T>
  void bind(CLI::App& app, const std::string& name, T& target, const std::string& help,
            std::function<void(FusionConfig&)> setter) {
    CLI::Option* opt = app.add_option(name, target, help);
    setters.push_back([opt, setter = std::move(setter)](FusionConfig& c) {
      if (opt->count() > 0) setter(c);
    });
  }

  FusionConfig resolve() const {
    FusionConfig config;
    if (!config_path.empty()) apply_config_file(config_path, config);
    for (const auto& set : setters) set(config);
    validate(config);
    return config;
  }
};

void report_warnings(const FusionReport& report, const std::string& context, std::ostream& err) {
  for (const auto& w : report.warnings) err << "warning: " << context << w << '\n';
}

nlohmann::json solve_json(const SolveDiagnostics& d) {
  return {{"iterations", d.iterations},
          {"converged", d.converged},
          {"feasibility_residual", d.feasibility_residual},
          {"split_residual", d.split_residual},
          {"objective", d.objective}};
}

// ---------------------------------------------------------------- blur-pair

struct BlurPairArgs {
  std::string original, mask = "left", out_a, out_b;
  std::size_t size = 3;
  double sigma = 7.0;
};

int run_blur_pair(const BlurPairArgs& args, std::ostream& out) {
  const GrayImage original = load_gray(args.original);
  const fs::path input(args.original);
  const FocusMask mask =
      parse_mask_spec(args.mask, original.height(), original.width(), input.parent_path());
  const FocusPair pair = make_focus_pair(original, mask, args.size, args.sigma);

  auto derived = [&](const char* suffix) {
    fs::path p = input;
    p.replace_filename(input.stem().string() + suffix + input.extension().string());
    return p;
  };
  const fs::path out_a = args.out_a.empty() ? derived("_a") : fs::path(args.out_a);
  const fs::path out_b = args.out_b.empty() ? derived("_b") : fs::path(args.out_b);
  save_gray(pair.a, out_a);
  save_gray(pair.b, out_b);
  out << out_a.string() << '\n' << out_b.string() << '\n';
  return kExitOk;
}

// --------------------------------------------------------------------- fuse

struct FuseArgs {
  std::string a, b, out, manifest, provenance, reference, dict, dump_dir;
  bool timings = false;
};

std::optional<Dictionary> load_dictionary_for(const std::string& path, const FusionConfig& config) {
  if (path.empty()) return std::nullopt;
  Dictionary d = read_dictionary(path);
  if (d.dimension() != config.window * config.window) {
    throw ParameterError("dictionary atoms have length " + std::to_string(d.dimension()) +
                         " but window " + std::to_string(config.window) + " needs " +
                         std::to_string(config.window * config.window));
  }
  return d;
}

int run_fuse(const FuseArgs& args, const PipelineFlags& flags, std::ostream& out, std::ostream& err) {
  const FusionConfig config = flags.resolve();
  const GrayImage a = load_gray(args.a);
  const GrayImage b = load_gray(args.b);
  require_same_size(a, b, "source images");
  std::optional<GrayImage> reference;
  if (!args.reference.empty()) {
    reference = load_gray(args.reference);
    require_same_size(a, *reference, "source and reference images");
  }
  const std::optional<Dictionary> dictionary = load_dictionary_for(args.dict, config);

  MatrixSink sink;
  if (!args.dump_dir.empty()) {
    const fs::path dir(args.dump_dir);
    fs::create_directories(dir);
    sink = [dir](std::string_view name, const Eigen::MatrixXd& m) {
      write_matrix(m, dir / (std::string(name) + ".flmat"));
    };
  }

  const FusionResult result = fuse_images(a, b, config, dictionary ? &*dictionary : nullptr, sink);
  const FusionReport& report = result.report;
  save_gray(result.fused, args.out);

  const fs::path manifest_path = args.manifest.empty() ? fs::path(args.out + ".json") : fs::path(args.manifest);
  nlohmann::json outputs = {{"fused", args.out}, {"manifest", manifest_path.string()}};
  if (!args.provenance.empty()) {
    const PatchGeometry geometry(a.height(), a.width(), config.window, config.step);
    save_gray(provenance_image(result.coefficients.provenance, geometry), args.provenance);
    outputs["provenance"] = args.provenance;
  }
  if (!args.dump_dir.empty()) outputs["dump_dir"] = args.dump_dir;

  nlohmann::json inputs = {{"a", args.a}, {"b", args.b}};
  if (reference) inputs["reference"] = args.reference;
  if (dictionary) inputs["dictionary"] = args.dict;
  if (!flags.config_path.empty()) inputs["config"] = flags.config_path;

  nlohmann::json metrics;
  if (reference) {
    metrics["a"] = metrics_json(evaluate(a, *reference));
    metrics["b"] = metrics_json(evaluate(b, *reference));
    metrics["fused"] = metrics_json(evaluate(result.fused, *reference));
  } else {
    metrics["a"] = {{"ag", average_gradient(a)}};
    metrics["b"] = {{"ag", average_gradient(b)}};
    metrics["fused"] = {{"ag", average_gradient(result.fused)}};
  }

  nlohmann::json diagnostics = {
      {"patches_per_image", report.patches_per_image},
      {"grid", {report.grid_rows, report.grid_cols}},
      {"class_populations", report.class_populations},
      {"dictionary_atoms", report.dictionary_atoms},
      {"atoms_per_class", report.atoms_per_class},
      {"dictionary_supplied", report.dictionary_supplied},
      {"solve_a", solve_json(report.solve_a)},
      {"solve_b", solve_json(report.solve_b)},
      {"columns_from_a", report.from_a},
      {"columns_from_b", report.from_b},
  };

  nlohmann::json manifest = {
      {"config", config_to_json(config)}, {"inputs", inputs},         {"outputs", outputs},
      {"seed", config.ksvd.seed},         {"diagnostics", diagnostics}, {"metrics", metrics},
      {"warnings", report.warnings},
  };
  if (args.timings) {
    nlohmann::json t;
    for (const auto& [stage, seconds] : report.timings) t[stage] = seconds;
    manifest["timings"] = t;
  }
  write_text(manifest_path, manifest.dump(2) + "\n");

  report_warnings(report, "", err);
  out << "fused " << a.height() << "x" << a.width() << ", " << report.dictionary_atoms << " atoms, "
      << report.from_a << " columns from A, " << report.from_b << " from B\n";
  if (reference) {
    const auto& f = metrics["fused"];
    out << "fused vs reference: ag " << fixed4(f["ag"].get<double>()) << " psnr "
        << (f["psnr"].is_string() ? f["psnr"].get<std::string>() : fixed4(f["psnr"].get<double>()))
        << " ssim " << fixed4(f["ssim"].get<double>()) << '\n';
  }
  return kExitOk;
}

// -------------------------------------------------------------------- bench

struct BenchArgs {
  std::string corpus, report, mask = "left", dict;
  std::size_t size = 3;
  double sigma = 7.0;
};

int run_bench(const BenchArgs& args, const PipelineFlags& flags, std::ostream& out, std::ostream& err) {
  const FusionConfig config = flags.resolve();
  const std::vector<fs::path> originals = images_in(args.corpus);
  if (originals.empty()) throw ParameterError("no images found in " + args.corpus);
  const std::optional<Dictionary> dictionary = load_dictionary_for(args.dict, config);

  std::string table =
      "image\tag_a\tag_b\tag_fused\tpsnr_a\tpsnr_b\tpsnr_fused\tssim_a\tssim_b\tssim_fused\n";
  for (const fs::path& path : originals) {
    const GrayImage original = load_gray(path);
    const std::string spec = read_mask_sidecar(path).value_or(args.mask);
    const FocusMask mask =
        parse_mask_spec(spec, original.height(), original.width(), path.parent_path());
    const FocusPair pair = make_focus_pair(original, mask, args.size, args.sigma);
    const FusionResult result =
        fuse_images(pair.a, pair.b, config, dictionary ? &*dictionary : nullptr);
    report_warnings(result.report, path.filename().string() + ": ", err);

    const MetricsReport ma = evaluate(pair.a, original);
    const MetricsReport mb = evaluate(pair.b, original);
    const MetricsReport mf = evaluate(result.fused, original);
    table += path.filename().string();
    for (double v : {ma.ag, mb.ag, mf.ag, ma.psnr, mb.psnr, mf.psnr, ma.ssim, mb.ssim, mf.ssim}) {
      table += '\t';
      table += fixed4(v);
    }
    table += '\n';
  }

  if (args.report.empty()) {
    out << table;
  } else {
    write_text(args.report, table);
    out << originals.size() << " images -> " << args.report << '\n';
  }
  return kExitOk;
}

// --------------------------------------------------------------- train-dict

struct TrainArgs {
  std::vector<std::string> inputs;
  std::string out;
};

int run_train(const TrainArgs& args, const PipelineFlags& flags, std::ostream& out) {
  const FusionConfig config = flags.resolve();
  std::vector<fs::path> paths;
  for (const auto& input : args.inputs) {
    if (fs::is_directory(input)) {
      const auto found = images_in(input);
      paths.insert(paths.end(), found.begin(), found.end());
    } else {
      paths.emplace_back(input);
    }
  }
  if (paths.empty()) throw ParameterError("no training images given");

  std::vector<PatchMatrix> sources;
  sources.reserve(paths.size());
  for (const auto& p : paths) {
    const GrayImage image = load_gray(p);
    sources.push_back(extract_patches(image, config.window, config.step));
  }
  const TrainedDictionary trained = train_dictionary(sources, config);
  write_dictionary(trained.dictionary, args.out);
  out << trained.dictionary.size() << " atoms of length " << trained.dictionary.dimension()
      << " from " << paths.size() << " images -> " << args.out << '\n';
  return kExitOk;
}

// --------------------------------------------------------------------- eval

int run_eval(const std::string& image_path, const std::string& reference_path, std::ostream& out) {
  const GrayImage image = load_gray(image_path);
  const GrayImage reference = load_gray(reference_path);
  require_same_size(image, reference, "image and reference");
  const MetricsReport m = evaluate(image, reference);
  out << "ag\t" << fixed4(m.ag) << "\npsnr\t" << fixed4(m.psnr) << "\nssim\t" << fixed4(m.ssim)
      << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-focus image fusion with HOG-classified dictionaries and low-rank representation",
               "lrrfuse"};
  app.require_subcommand(1);

  BlurPairArgs blur;
  CLI::App* blur_cmd = app.add_subcommand("blur-pair", "make a complementary defocused pair");
  blur_cmd->add_option("original", blur.original, "sharp original image")->required();
  blur_cmd->add_option("--mask", blur.mask, "left|right|top|bottom|circle:cx,cy,r|mask image");
  blur_cmd->add_option("--size", blur.size, "Gaussian kernel side");
  blur_cmd->add_option("--sigma", blur.sigma, "Gaussian sigma");
  blur_cmd->add_option("--out-a", blur.out_a, "output sharp inside the mask");
  blur_cmd->add_option("--out-b", blur.out_b, "output sharp outside the mask");

  FuseArgs fuse;
  PipelineFlags fuse_flags;
  CLI::App* fuse_cmd = app.add_subcommand("fuse", "fuse two differently focused images");
  fuse_cmd->add_option("a", fuse.a, "first source")->required();
  fuse_cmd->add_option("b", fuse.b, "second source")->required();
  fuse_cmd->add_option("--out", fuse.out, "fused image (.png or .pgm)")->required();
  fuse_cmd->add_option("--manifest", fuse.manifest, "run manifest (default: <out>.json)");
  fuse_cmd->add_option("--provenance", fuse.provenance, "patch provenance map image");
  fuse_cmd->add_option("--reference", fuse.reference, "all-in-focus reference for metrics");
  fuse_cmd->add_option("--dict", fuse.dict, "pre-trained dictionary file");
  fuse_cmd->add_option("--dump-dir", fuse.dump_dir, "write intermediate matrices here");
  fuse_cmd->add_flag("--timings", fuse.timings, "record stage timings in the manifest");
  fuse_flags.add_to(*fuse_cmd, true);

  BenchArgs bench;
  PipelineFlags bench_flags;
  CLI::App* bench_cmd = app.add_subcommand("bench", "blur, fuse and score every image in a directory");
  bench_cmd->add_option("corpus", bench.corpus, "directory of originals")->required();
  bench_cmd->add_option("--report", bench.report, "report file (default: stdout)");
  bench_cmd->add_option("--mask", bench.mask, "mask for images without a .mask file");
  bench_cmd->add_option("--size", bench.size, "Gaussian kernel side");
  bench_cmd->add_option("--sigma", bench.sigma, "Gaussian sigma");
  bench_cmd->add_option("--dict", bench.dict, "pre-trained dictionary file");
  bench_flags.add_to(*bench_cmd, true);

  TrainArgs train;
  PipelineFlags train_flags;
  CLI::App* train_cmd = app.add_subcommand("train-dict", "train a global dictionary");
  train_cmd->add_option("inputs", train.inputs, "images or directories of images")->required();
  train_cmd->add_option("--out", train.out, "dictionary file")->required();
  train_flags.add_to(*train_cmd, false);

  std::string eval_image, eval_reference;
  CLI::App* eval_cmd = app.add_subcommand("eval", "AG, PSNR and SSIM against a reference");
  eval_cmd->add_option("image", eval_image)->required();
  eval_cmd->add_option("reference", eval_reference)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*blur_cmd) return run_blur_pair(blur, out);
    if (*fuse_cmd) return run_fuse(fuse, fuse_flags, out, err);
    if (*bench_cmd) return run_bench(bench, bench_flags, out, err);
    if (*train_cmd) return run_train(train, train_flags, out);
    if (*eval_cmd) return run_eval(eval_image, eval_reference, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace lrrfuse::cli
