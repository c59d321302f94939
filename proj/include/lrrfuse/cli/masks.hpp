#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "lrrfuse/image.hpp"

namespace lrrfuse::cli {

/// `left`, `right`, `top`, `bottom`, `circle:cx,cy,r` or the path of a mask
/// image (pixels >= 0.5 are sharp in A). Relative mask paths resolve against
/// `base_dir`. Anything else throws ParameterError.
FocusMask parse_mask_spec(std::string_view spec, std::size_t height, std::size_t width,
                          const std::filesystem::path& base_dir = {});

/// Contents of `<image stem>.mask` beside `image`, trimmed, if that file exists.
std::optional<std::string> read_mask_sidecar(const std::filesystem::path& image);

}  // namespace lrrfuse::cli
