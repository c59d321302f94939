#include "lrrfuse/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <string_view>

#include "lrrfuse/errors.hpp"

namespace lrrfuse {
namespace {

constexpr std::array<char, 8> kMatrixMagic{'F', 'L', 'M', 'A', 'T', '1', '\0', '\0'};
constexpr std::array<char, 8> kDictionaryMagic{'F', 'L', 'D', 'I', 'C', 'T', '1', '\0'};

class Writer {
 public:
  void magic(const std::array<char, 8>& m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }
  void u64(std::uint64_t v) { put(v, 8); }
  void u32(std::uint32_t v) { put(v, 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  void expect_magic(const std::array<char, 8>& m, std::string_view what) {
    need(8);
    if (!std::equal(m.begin(), m.end(), bytes_.begin() + static_cast<long>(pos_))) {
      throw FormatError("not a " + std::string(what) + " file (bad magic)");
    }
    pos_ += 8;
  }
  std::uint64_t u64() { return get(8); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw IoError("binary file is truncated");
  }
  std::uint64_t get(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

// rows * cols doubles must fit in what is left of the file.
void check_payload(std::uint64_t rows, std::uint64_t cols, std::size_t remaining) {
  constexpr std::uint64_t kLimit = std::numeric_limits<std::uint32_t>::max();
  if (rows > kLimit || cols > kLimit) throw FormatError("matrix dimensions out of range");
  if (rows * cols > remaining / 8) throw IoError("binary file is truncated");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode_matrix(const Eigen::MatrixXd& m) {
  Writer w;
  w.magic(kMatrixMagic);
  w.u64(static_cast<std::uint64_t>(m.rows()));
  w.u64(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
  return w.take();
}

Eigen::MatrixXd decode_matrix(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.expect_magic(kMatrixMagic, "matrix");
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  check_payload(rows, cols, r.remaining());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
  if (r.remaining() != 0) throw FormatError("trailing bytes after matrix payload");
  return m;
}

std::vector<std::uint8_t> encode_dictionary(const Dictionary& dictionary) {
  Writer w;
  w.magic(kDictionaryMagic);
  w.u64(dictionary.dimension());
  w.u64(dictionary.size());
  w.u64(dictionary.bins());
  for (std::uint32_t label : dictionary.labels()) w.u32(label);
  const Eigen::MatrixXd& atoms = dictionary.atoms();
  for (Eigen::Index i = 0; i < atoms.size(); ++i) w.f64(atoms.data()[i]);
  return w.take();
}

Dictionary decode_dictionary(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.expect_magic(kDictionaryMagic, "dictionary");
  const std::uint64_t d = r.u64();
  const std::uint64_t k = r.u64();
  const std::uint64_t bins = r.u64();
  if (bins > std::numeric_limits<std::uint32_t>::max()) throw FormatError("dictionary class count out of range");
  if (k > r.remaining() / 4) throw IoError("binary file is truncated");
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(k));
  for (auto& label : labels) label = r.u32();
  check_payload(d, k, r.remaining());
  Eigen::MatrixXd atoms(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < atoms.size(); ++i) atoms.data()[i] = r.f64();
  if (r.remaining() != 0) throw FormatError("trailing bytes after dictionary payload");
  try {
    return Dictionary(std::move(atoms), std::move(labels), static_cast<std::size_t>(bins));
  } catch (const ParameterError& e) {
    throw FormatError(std::string("invalid dictionary file: ") + e.what());
  }
}

void write_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path) { write_file(encode_matrix(m), path); }
Eigen::MatrixXd read_matrix(const std::filesystem::path& path) { return decode_matrix(read_file(path)); }
void write_dictionary(const Dictionary& dictionary, const std::filesystem::path& path) {
  write_file(encode_dictionary(dictionary), path);
}
Dictionary read_dictionary(const std::filesystem::path& path) { return decode_dictionary(read_file(path)); }

}  // namespace lrrfuse
