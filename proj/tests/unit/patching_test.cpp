#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "lrrfuse/errors.hpp"
#include "lrrfuse/patching.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace lrrfuse;

TEST_SUITE("patching") {
  TEST_CASE("patch counts") {
    CHECK(PatchGeometry(16, 16, 8, 1).count() == 81);
    CHECK(PatchGeometry(512, 512, 8, 1).count() == 255025);
    CHECK(PatchGeometry(128, 128, 8, 4).count() == 961);
    CHECK(PatchGeometry(10, 7, 3, 2).grid_rows() == 4);
    CHECK(PatchGeometry(10, 7, 3, 2).grid_cols() == 3);
    CHECK_THROWS_AS(PatchGeometry(4, 4, 5, 1), ParameterError);
    CHECK_THROWS_AS(PatchGeometry(4, 4, 2, 0), ParameterError);
  }

  TEST_CASE("one window covering the image is the vectorized image") {
    const GrayImage img = testing::random_image(5, 5, 1);
    const PatchMatrix p = extract_patches(img, 5, 1);
    REQUIRE(p.data.cols() == 1);
    for (std::size_t r = 0; r < 5; ++r) {
      for (std::size_t c = 0; c < 5; ++c) CHECK(p.data(static_cast<Eigen::Index>(r * 5 + c), 0) == img.at(r, c));
    }
    CHECK(reconstruct_average(p) == img);
  }

  TEST_CASE("columns hold the windows in raster order") {
    const GrayImage img = testing::random_image(9, 11, 4);
    const PatchMatrix p = extract_patches(img, 3, 2);
    const auto& g = p.geometry;
    for (std::size_t q = 0; q < g.count(); ++q) {
      CHECK(g.column_of(g.grid_of(q)) == q);
      for (std::size_t y = 0; y < 3; ++y) {
        for (std::size_t x = 0; x < 3; ++x) {
          CHECK(p.data(static_cast<Eigen::Index>(y * 3 + x), static_cast<Eigen::Index>(q)) ==
                img.at(g.top(q) + y, g.left(q) + x));
        }
      }
    }
  }

  TEST_CASE("coverage matches a brute-force count") {
    for (auto [h, w, n, s] : {std::array<std::size_t, 4>{9, 9, 4, 1}, {11, 13, 4, 3}, {20, 17, 8, 4}, {8, 8, 2, 3}}) {
      CHECK(PatchGeometry(h, w, n, s).coverage() == testing::coverage_oracle(h, w, n, s));
    }
  }

  TEST_CASE("roundtrip restores covered pixels") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t h = 9 + rng() % 20, w = 9 + rng() % 20;
      for (std::size_t n : {4u, 8u}) {
        for (std::size_t s : {1u, 2u, 4u, 5u}) {
          const GrayImage img = testing::random_image(h, w, rng());
          const GrayImage back = reconstruct_average(extract_patches(img, n, s));
          const auto cover = testing::coverage_oracle(h, w, n, s);
          for (std::size_t i = 0; i < img.size(); ++i) {
            if (cover[i] > 0) CHECK(std::abs(back.pixels()[i] - img.pixels()[i]) <= 1e-12);
          }
        }
      }
    }
  }

  TEST_CASE("overlap average of disagreeing patches") {
    // Two 2x2 windows on a 2x3 image share the middle column.
    const PatchGeometry g(2, 3, 2, 1);
    Eigen::MatrixXd patches(4, 2);
    patches.col(0).setConstant(0.2);
    patches.col(1).setConstant(0.7);
    const GrayImage out = overlap_average(g, patches);
    CHECK(out.at(0, 0) == 0.2);
    CHECK(out.at(1, 2) == 0.7);
    CHECK(out.at(0, 1) == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(out.at(1, 1) == doctest::Approx(0.45).epsilon(1e-15));
  }

  TEST_CASE("overlap average matches the per-pixel oracle for arbitrary patches") {
    const PatchGeometry g(12, 10, 4, 2);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd patches(16, static_cast<Eigen::Index>(g.count()));
    for (Eigen::Index i = 0; i < patches.size(); ++i) patches.data()[i] = u(rng);
    std::vector<double> sum(120, 0.0);
    for (std::size_t q = 0; q < g.count(); ++q) {
      for (std::size_t y = 0; y < 4; ++y) {
        for (std::size_t x = 0; x < 4; ++x) {
          sum[(g.top(q) + y) * 10 + g.left(q) + x] += patches(static_cast<Eigen::Index>(y * 4 + x), static_cast<Eigen::Index>(q));
        }
      }
    }
    const auto cover = testing::coverage_oracle(12, 10, 4, 2);
    const GrayImage out = overlap_average(g, patches);
    for (std::size_t i = 0; i < sum.size(); ++i) {
      CHECK(out.pixels()[i] == doctest::Approx(sum[i] / static_cast<double>(cover[i])).epsilon(1e-14));
    }
    CHECK_THROWS_AS(overlap_average(g, Eigen::MatrixXd(16, 3)), ParameterError);
  }

  TEST_CASE("uncovered border takes the nearest covered value") {
    // 11x11 with n=4, s=3: rows and columns 0..9 covered, index 10 not.
    const GrayImage img = testing::random_image(11, 11, 8);
    const GrayImage back = reconstruct_average(extract_patches(img, 4, 3));
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(back.at(10, i) == back.at(9, i));
      CHECK(back.at(i, 10) == back.at(i, 9));
    }
    CHECK(back.at(10, 10) == back.at(9, 9));
  }
}
