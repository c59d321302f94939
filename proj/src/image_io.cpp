#include "lrrfuse/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include "lrrfuse/errors.hpp"

namespace lrrfuse {
namespace {

constexpr std::array<unsigned char, 8> kPngSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

// Netpbm header token reader: whitespace separated, '#' starts a comment.
class PgmHeader {
 public:
  PgmHeader(const std::vector<unsigned char>& bytes, const std::string& name)
      : bytes_(bytes), name_(name) {}

  unsigned long next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) throw IoError("truncated PGM header: " + name_);
    if (!std::isdigit(bytes_[pos_])) throw FormatError("malformed PGM header: " + name_);
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1UL << 31)) throw FormatError("PGM header value too large: " + name_);
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size()) throw IoError("truncated PGM header: " + name_);
    if (!std::isspace(bytes_[pos_])) throw FormatError("malformed PGM header: " + name_);
    return pos_ + 1;
  }

  void seek(std::size_t pos) { pos_ = pos; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

GrayImage decode_pgm(const std::vector<unsigned char>& bytes, const std::string& name) {
  PgmHeader header(bytes, name);
  header.seek(2);
  const unsigned long width = header.next_number();
  const unsigned long height = header.next_number();
  const unsigned long maxval = header.next_number();
  if (width == 0 || height == 0) throw FormatError("PGM has zero dimension: " + name);
  if (maxval == 0 || maxval > 255) {
    throw FormatError("unsupported PGM maxval " + std::to_string(maxval) + " (8-bit only): " + name);
  }
  const std::size_t offset = header.raster_offset();
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() < offset + count) throw IoError("truncated PGM raster: " + name);
  std::vector<double> pixels(count);
  const double scale = static_cast<double>(maxval);
  for (std::size_t i = 0; i < count; ++i) {
    pixels[i] = std::min(static_cast<double>(bytes[offset + i]) / scale, 1.0);
  }
  return GrayImage(height, width, std::move(pixels));
}

struct PngReadSource {
  const std::vector<unsigned char>* bytes;
  std::size_t pos;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
  if (src->pos + length > src->bytes->size()) png_error(png, "unexpected end of file");
  std::memcpy(out, src->bytes->data() + src->pos, length);
  src->pos += length;
}

void png_error_handler(png_structp png, png_const_charp message) {
  auto* buffer = static_cast<std::string*>(png_get_error_ptr(png));
  if (buffer) *buffer = message;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

enum class PngFailure { kNone, kTruncated, kUnsupported };

// Kept free of C++ objects with non-trivial destructors between setjmp and
// the calls that may longjmp.
PngFailure decode_png_rows(png_structp png, png_infop info, std::vector<unsigned char>& samples,
                           png_uint_32& width, png_uint_32& height, int& channels) {
  if (setjmp(png_jmpbuf(png))) return PngFailure::kTruncated;
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (bit_depth == 16) return PngFailure::kUnsupported;
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  samples.resize(stride * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = samples.data() + r * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return PngFailure::kNone;
}

GrayImage decode_png(const std::vector<unsigned char>& bytes, const std::string& name) {
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_error_handler,
                                           png_warning_handler);
  if (!png) throw NumericError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw NumericError("libpng initialization failed");
  }
  PngReadSource source{&bytes, 0};
  png_set_read_fn(png, &source, png_read_from_memory);

  std::vector<unsigned char> samples;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  const PngFailure failure = decode_png_rows(png, info, samples, width, height, channels);
  png_destroy_read_struct(&png, &info, nullptr);
  if (failure == PngFailure::kUnsupported) throw FormatError("16-bit PNG is not supported: " + name);
  if (failure == PngFailure::kTruncated) throw IoError("cannot decode PNG " + name + ": " + message);
  if (channels != 1 && channels != 3) throw FormatError("unsupported PNG channel layout: " + name);

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<double> pixels(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (channels == 1) {
      pixels[i] = samples[i] / 255.0;
    } else {
      const double luma = 0.299 * samples[3 * i] + 0.587 * samples[3 * i + 1] + 0.114 * samples[3 * i + 2];
      pixels[i] = luma / 255.0;
    }
  }
  return GrayImage::clamped(height, width, std::move(pixels));
}

bool has_png_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".png";
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

bool encode_png_rows(png_structp png, png_infop info, std::vector<png_bytep>& rows,
                     png_uint_32 width, png_uint_32 height) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  return true;
}

std::vector<unsigned char> encode_png(const std::vector<unsigned char>& samples, std::size_t width,
                                      std::size_t height) {
  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_error_handler,
                                            png_warning_handler);
  if (!png) throw NumericError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw NumericError("libpng initialization failed");
  }
  std::vector<unsigned char> out;
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  std::vector<png_bytep> rows(height);
  for (std::size_t r = 0; r < height; ++r) {
    rows[r] = const_cast<png_bytep>(samples.data() + r * width);
  }
  const bool ok = encode_png_rows(png, info, rows, static_cast<png_uint_32>(width),
                                  static_cast<png_uint_32>(height));
  png_destroy_write_struct(&png, &info);
  if (!ok) throw IoError("PNG encoding failed: " + message);
  return out;
}

}  // namespace

std::uint8_t quantize(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(clamped * 255.0 + 0.5));
}

GrayImage load_gray(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = read_all(path);
  const std::string name = path.string();
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes, name);
  if (bytes.size() >= kPngSignature.size() &&
      std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin())) {
    return decode_png(bytes, name);
  }
  if (bytes.size() < 2) throw IoError("file too short to identify: " + name);
  throw FormatError("not a binary PGM or PNG file: " + name);
}

void save_gray(const GrayImage& image, const std::filesystem::path& path) {
  std::vector<unsigned char> samples(image.size());
  std::transform(image.pixels().begin(), image.pixels().end(), samples.begin(), quantize);

  std::vector<unsigned char> encoded;
  if (has_png_extension(path)) {
    encoded = encode_png(samples, image.width(), image.height());
  } else {
    const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                               std::to_string(image.height()) + "\n255\n";
    encoded.assign(header.begin(), header.end());
    encoded.insert(encoded.end(), samples.begin(), samples.end());
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(encoded.data()), static_cast<std::streamsize>(encoded.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace lrrfuse
