#pragma once

// Deterministic textured test scenes standing in for natural photographs.

#include <cstddef>
#include <cstdint>

#include "lrrfuse/image.hpp"

namespace lrrfuse::testing {

/// Five scene families, selected by `kind` modulo 5.
GrayImage synthetic_scene(std::size_t height, std::size_t width, std::uint64_t seed, int kind);

/// Uniform noise in [0, 1].
GrayImage random_image(std::size_t height, std::size_t width, std::uint64_t seed);

}  // namespace lrrfuse::testing
