#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "lrrfuse/cli/cli.hpp"
#include "lrrfuse/cli/config.hpp"
#include "lrrfuse/cli/masks.hpp"
#include "lrrfuse/errors.hpp"
#include "lrrfuse/image_io.hpp"
#include "scenes.hpp"

using namespace lrrfuse;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lrrfuse_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string s(const fs::path& p) { return p.string(); }

const std::vector<std::string> kFast = {"--step", "2", "--atoms", "8", "--ksvd-iters", "3"};

std::vector<std::string> with_fast(std::vector<std::string> args) {
  args.insert(args.end(), kFast.begin(), kFast.end());
  return args;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("mask specs") {
    CHECK(cli::parse_mask_spec("left", 4, 6).sharp(0, 2));
    CHECK_FALSE(cli::parse_mask_spec("left", 4, 6).sharp(0, 3));
    CHECK(cli::parse_mask_spec("bottom", 4, 6).sharp(3, 0));
    CHECK(cli::parse_mask_spec("circle:2,2,1.5", 5, 5).sharp(2, 3));
    CHECK_FALSE(cli::parse_mask_spec("circle:2,2,1.5", 5, 5).sharp(0, 0));
    CHECK_THROWS_AS(cli::parse_mask_spec("circle:1,2", 5, 5), ParameterError);
    CHECK_THROWS_AS(cli::parse_mask_spec("circle:1,2,x", 5, 5), ParameterError);
    CHECK_THROWS_AS(cli::parse_mask_spec("diagonal", 5, 5), ParameterError);
  }

  TEST_CASE("config json roundtrip and errors") {
    FusionConfig c;
    c.step = 3;
    c.lrr.mu0 = 0.5;
    c.tie_break = TieBreak::kPreferA;
    FusionConfig back;
    cli::apply_config_json(cli::config_to_json(c), back);
    CHECK(cli::config_to_json(back) == cli::config_to_json(c));
    CHECK_THROWS_AS(cli::apply_config_json(nlohmann::json{{"windw", 4}}, back), ParameterError);
    CHECK_THROWS_AS(cli::apply_config_json(nlohmann::json{{"window", -4}}, back), ParameterError);
    CHECK_THROWS_AS(cli::apply_config_json(nlohmann::json{{"lambda", "big"}}, back), ParameterError);
  }

  TEST_CASE("blur-pair") {
    const fs::path dir = fresh_dir("blur");
    const GrayImage original = testing::synthetic_scene(20, 20, 1, 1);
    save_gray(original, dir / "img.pgm");
    const GrayImage stored = load_gray(dir / "img.pgm");

    SUBCASE("left mask writes a complementary pair") {
      const Run r = run({"blur-pair", s(dir / "img.pgm"), "--mask", "left"});
      REQUIRE(r.code == 0);
      const GrayImage a = load_gray(dir / "img_a.pgm"), b = load_gray(dir / "img_b.pgm");
      for (std::size_t row = 0; row < 20; ++row) {
        CHECK(a.at(row, 3) == stored.at(row, 3));
        CHECK(b.at(row, 15) == stored.at(row, 15));
      }
      CHECK(a != stored);
      CHECK(b != stored);
    }
    SUBCASE("all-true mask image keeps the original in out-a") {
      save_gray(GrayImage(20, 20, 1.0), dir / "all.png");
      const Run r = run({"blur-pair", s(dir / "img.pgm"), "--mask", s(dir / "all.png"), "--out-a",
                         s(dir / "x.pgm"), "--out-b", s(dir / "y.pgm")});
      REQUIRE(r.code == 0);
      CHECK(slurp(dir / "x.pgm") == slurp(dir / "img.pgm"));
    }
    SUBCASE("errors") {
      const Run missing = run({"blur-pair", s(dir / "nope.pgm")});
      CHECK(missing.code == cli::kExitIo);
      CHECK_FALSE(missing.err.empty());
      CHECK(run({"blur-pair", s(dir / "img.pgm"), "--mask", "sideways"}).code == cli::kExitUsage);
      CHECK(run({"blur-pair", s(dir / "img.pgm"), "--size", "4"}).code == cli::kExitUsage);
      CHECK(run({}).code == cli::kExitUsage);
      CHECK(run({"frobnicate"}).code == cli::kExitUsage);
      CHECK(run({"--help"}).code == 0);
    }
  }

  TEST_CASE("fuse writes image, manifest and provenance") {
    const fs::path dir = fresh_dir("fuse");
    const GrayImage original = testing::synthetic_scene(32, 32, 2, 0);
    save_gray(original, dir / "ref.png");
    REQUIRE(run({"blur-pair", s(dir / "ref.png"), "--out-a", s(dir / "a.png"), "--out-b", s(dir / "b.png")}).code == 0);

    const auto args = with_fast({"fuse", s(dir / "a.png"), s(dir / "b.png"), "--out", s(dir / "f.png"), "--reference",
                                 s(dir / "ref.png"), "--provenance", s(dir / "p.png"), "--dump-dir", s(dir / "dump")});
    const Run r = run(args);
    REQUIRE(r.code == 0);
    const auto manifest = nlohmann::json::parse(slurp(dir / "f.png.json"));
    CHECK(manifest["config"]["step"] == 2);
    CHECK(manifest["config"]["window"] == 8);
    CHECK(manifest["config"]["lambda"] == 100.0);
    CHECK(manifest["seed"] == 0);
    CHECK(manifest["inputs"]["reference"] == s(dir / "ref.png"));
    CHECK(manifest["diagnostics"]["patches_per_image"] == 13 * 13);
    CHECK(manifest["metrics"]["fused"]["psnr"].get<double>() > 0.0);
    CHECK(manifest["metrics"]["a"].contains("ssim"));
    CHECK_FALSE(manifest.contains("timings"));
    CHECK(load_gray(dir / "p.png").height() == 13);
    CHECK(fs::exists(dir / "dump" / "z_f.flmat"));

    const std::string first_image = slurp(dir / "f.png"), first_manifest = slurp(dir / "f.png.json");
    REQUIRE(run(args).code == 0);
    CHECK(slurp(dir / "f.png") == first_image);
    CHECK(slurp(dir / "f.png.json") == first_manifest);
  }

  TEST_CASE("identical inputs take every column from B") {
    const fs::path dir = fresh_dir("same");
    save_gray(testing::synthetic_scene(24, 24, 3, 2), dir / "i.pgm");
    REQUIRE(run(with_fast({"fuse", s(dir / "i.pgm"), s(dir / "i.pgm"), "--out", s(dir / "f.pgm"), "--provenance",
                           s(dir / "p.pgm")})).code == 0);
    const GrayImage map = load_gray(dir / "p.pgm");
    for (double v : map.pixels()) CHECK(v == 0.0);
  }

  TEST_CASE("fuse errors") {
    const fs::path dir = fresh_dir("fuse_err");
    save_gray(GrayImage(16, 16, 0.5), dir / "a.pgm");
    save_gray(GrayImage(16, 18, 0.5), dir / "b.pgm");
    CHECK(run({"fuse", s(dir / "a.pgm"), s(dir / "b.pgm"), "--out", s(dir / "f.pgm")}).code == cli::kExitUsage);
    CHECK(run({"fuse", s(dir / "a.pgm"), s(dir / "zz.pgm"), "--out", s(dir / "f.pgm")}).code == cli::kExitIo);
    CHECK(run({"fuse", s(dir / "a.pgm"), s(dir / "a.pgm"), "--out", s(dir / "f.pgm"), "--hog-threshold", "2"}).code ==
          cli::kExitUsage);
    CHECK(run({"fuse", s(dir / "a.pgm"), s(dir / "a.pgm")}).code == cli::kExitUsage);
  }

  TEST_CASE("config file sits between defaults and flags") {
    const fs::path dir = fresh_dir("config");
    save_gray(testing::synthetic_scene(24, 24, 4, 3), dir / "a.pgm");
    save_gray(testing::synthetic_scene(24, 24, 5, 3), dir / "b.pgm");
    std::ofstream(dir / "cfg.json") << R"({"step": 3, "window": 6, "atoms": 8, "ksvd_iters": 2, "lambda": 10})";
    REQUIRE(run({"fuse", s(dir / "a.pgm"), s(dir / "b.pgm"), "--out", s(dir / "f.pgm"), "--config",
                 s(dir / "cfg.json"), "--step", "2"}).code == 0);
    const auto m = nlohmann::json::parse(slurp(dir / "f.pgm.json"));
    CHECK(m["config"]["step"] == 2);
    CHECK(m["config"]["window"] == 6);
    CHECK(m["config"]["lambda"] == 10.0);
    CHECK(m["config"]["hog_threshold"] == 0.3);

    std::ofstream(dir / "bad.json") << R"({"stride": 3})";
    CHECK(run({"fuse", s(dir / "a.pgm"), s(dir / "b.pgm"), "--out", s(dir / "f.pgm"), "--config",
               s(dir / "bad.json")}).code == cli::kExitUsage);
    std::ofstream(dir / "broken.json") << "{";
    CHECK(run({"fuse", s(dir / "a.pgm"), s(dir / "b.pgm"), "--out", s(dir / "f.pgm"), "--config",
               s(dir / "broken.json")}).code == cli::kExitIo);
  }

  TEST_CASE("step 4 on 128x128 gives 961 patches per image") {
    const fs::path dir = fresh_dir("step4");
    save_gray(testing::synthetic_scene(128, 128, 6, 4), dir / "a.png");
    save_gray(testing::synthetic_scene(128, 128, 7, 4), dir / "b.png");
    REQUIRE(run({"fuse", s(dir / "a.png"), s(dir / "b.png"), "--out", s(dir / "f.png"), "--step", "4", "--atoms", "8",
                 "--ksvd-iters", "2"}).code == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "f.png.json"))["diagnostics"]["patches_per_image"] == 961);
  }

  TEST_CASE("train-dict then fuse with the file matches per-pair training") {
    const fs::path dir = fresh_dir("train");
    save_gray(testing::synthetic_scene(24, 24, 8, 1), dir / "a.pgm");
    save_gray(testing::synthetic_scene(24, 24, 9, 2), dir / "b.pgm");
    REQUIRE(run(with_fast({"train-dict", s(dir / "a.pgm"), s(dir / "b.pgm"), "--out", s(dir / "d.bin")})).code == 0);
    REQUIRE(run(with_fast({"fuse", s(dir / "a.pgm"), s(dir / "b.pgm"), "--out", s(dir / "own.pgm")})).code == 0);
    REQUIRE(run(with_fast({"fuse", s(dir / "a.pgm"), s(dir / "b.pgm"), "--out", s(dir / "ext.pgm"), "--dict",
                           s(dir / "d.bin")})).code == 0);
    CHECK(slurp(dir / "own.pgm") == slurp(dir / "ext.pgm"));
    const auto m = nlohmann::json::parse(slurp(dir / "ext.pgm.json"));
    CHECK(m["diagnostics"]["dictionary_supplied"] == true);
    CHECK(m["inputs"]["dictionary"] == s(dir / "d.bin"));

    CHECK(run({"fuse", s(dir / "a.pgm"), s(dir / "b.pgm"), "--out", s(dir / "x.pgm"), "--dict", s(dir / "d.bin"),
               "--window", "4"}).code == cli::kExitUsage);
    CHECK(run({"train-dict", s(dir / "nothing"), "--out", s(dir / "d2.bin")}).code == cli::kExitIo);
  }

  TEST_CASE("bench") {
    const fs::path dir = fresh_dir("bench");
    const fs::path corpus = dir / "corpus";
    fs::create_directories(corpus);
    for (int k = 0; k < 3; ++k) save_gray(testing::synthetic_scene(32, 32, 10 + k, k), corpus / ("img" + std::to_string(k) + ".png"));
    std::ofstream(corpus / "img1.mask") << "top\n";

    const auto args = with_fast({"bench", s(corpus), "--report", s(dir / "report.tsv")});
    REQUIRE(run(args).code == 0);
    const std::string report = slurp(dir / "report.tsv");
    std::istringstream lines(report);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "image\tag_a\tag_b\tag_fused\tpsnr_a\tpsnr_b\tpsnr_fused\tssim_a\tssim_b\tssim_fused");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].rfind("img" + std::to_string(i - 1) + ".png\t", 0) == 0);
      std::istringstream fields(rows[i]);
      std::vector<std::string> f;
      std::string field;
      while (std::getline(fields, field, '\t')) f.push_back(field);
      REQUIRE(f.size() == 10);
      for (std::size_t j = 1; j < 10; ++j) {
        const auto dot = f[j].find('.');
        REQUIRE(dot != std::string::npos);
        CHECK(f[j].size() - dot - 1 == 4);
      }
    }
    REQUIRE(run(args).code == 0);
    CHECK(slurp(dir / "report.tsv") == report);

    fs::create_directories(dir / "empty");
    CHECK(run({"bench", s(dir / "empty")}).code == cli::kExitUsage);
  }

  TEST_CASE("eval") {
    const fs::path dir = fresh_dir("eval");
    save_gray(testing::synthetic_scene(16, 16, 1, 3), dir / "x.pgm");
    save_gray(GrayImage(16, 12, 0.5), dir / "y.pgm");
    const Run same = run({"eval", s(dir / "x.pgm"), s(dir / "x.pgm")});
    REQUIRE(same.code == 0);
    CHECK(same.out.find("psnr\t+inf\n") != std::string::npos);
    CHECK(same.out.find("ssim\t1.0000\n") != std::string::npos);
    CHECK(run({"eval", s(dir / "x.pgm"), s(dir / "y.pgm")}).code == cli::kExitUsage);
  }
}
