#include "lrrfuse/cli/masks.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "lrrfuse/errors.hpp"
#include "lrrfuse/image_io.hpp"

namespace lrrfuse::cli {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::string_view spec) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParameterError("bad number in mask spec '" + std::string(spec) + "'");
  }
  return v;
}

}  // namespace

FocusMask parse_mask_spec(std::string_view spec, std::size_t height, std::size_t width,
                          const std::filesystem::path& base_dir) {
  if (spec == "left") return FocusMask::left_half(height, width);
  if (spec == "right") return FocusMask::right_half(height, width);
  if (spec == "top") return FocusMask::top_half(height, width);
  if (spec == "bottom") return FocusMask::bottom_half(height, width);

  constexpr std::string_view kCircle = "circle:";
  if (spec.starts_with(kCircle)) {
    std::vector<double> values;
    std::string_view rest = spec.substr(kCircle.size());
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_number(rest.substr(0, comma), spec));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (values.size() != 3 || !(values[2] >= 0.0)) {
      throw ParameterError("mask spec must be circle:cx,cy,r with r >= 0, got '" +
                           std::string(spec) + "'");
    }
    return FocusMask::disk(height, width, values[0], values[1], values[2]);
  }

  std::filesystem::path path(spec);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  if (spec.empty() || !std::filesystem::is_regular_file(path)) {
    throw ParameterError("unknown mask spec '" + std::string(spec) +
                         "' (expected left, right, top, bottom, circle:cx,cy,r or a mask image)");
  }
  const GrayImage image = load_gray(path);
  if (image.height() != height || image.width() != width) {
    throw ParameterError("mask image " + path.string() + " does not match the image size");
  }
  return FocusMask::from_image(image);
}

std::optional<std::string> read_mask_sidecar(const std::filesystem::path& image) {
  std::filesystem::path sidecar = image;
  sidecar.replace_extension(".mask");
  if (!std::filesystem::is_regular_file(sidecar)) return std::nullopt;
  std::ifstream in(sidecar);
  if (!in) throw IoError("cannot read mask file " + sidecar.string());
  std::ostringstream text;
  text << in.rdbuf();
  return trim(text.str());
}

}  // namespace lrrfuse::cli
