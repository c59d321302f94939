#pragma once

#include <filesystem>

#include "lrrfuse/image.hpp"

namespace lrrfuse {

/// Reads a binary PGM (P5, maxval <= 255) or an 8-bit PNG. The format is
/// detected from the file signature. Colour input is reduced to luma
/// (0.299 R + 0.587 G + 0.114 B); alpha is ignored.
///
/// Throws IoError when the file is missing or truncated and FormatError for
/// unsupported content such as 16-bit samples.
GrayImage load_gray(const std::filesystem::path& path);

/// Writes round-half-up 8-bit samples. A ".png" extension (any case) selects
/// PNG; everything else is written as binary PGM.
void save_gray(const GrayImage& image, const std::filesystem::path& path);

/// The byte save_gray writes for intensity `v`.
std::uint8_t quantize(double v);

}  // namespace lrrfuse
