#pragma once

// Binary interchange formats. All integers and floats are little-endian.
//
//   Matrix:      "FLMAT1\0\0"  u64 rows  u64 cols  f64[rows*cols] column-major
//   Dictionary:  "FLDICT1\0"   u64 d  u64 K  u64 L  u32[K] labels  f64[d*K] column-major

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "lrrfuse/sparse_coding.hpp"

namespace lrrfuse {

std::vector<std::uint8_t> encode_matrix(const Eigen::MatrixXd& m);
/// Throws FormatError on a bad magic or inconsistent sizes, IoError when truncated.
Eigen::MatrixXd decode_matrix(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encode_dictionary(const Dictionary& dictionary);
Dictionary decode_dictionary(const std::vector<std::uint8_t>& bytes);

void write_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);
void write_dictionary(const Dictionary& dictionary, const std::filesystem::path& path);
Dictionary read_dictionary(const std::filesystem::path& path);

}  // namespace lrrfuse
