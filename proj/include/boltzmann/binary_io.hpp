#pragma once

/**
 * @file binary_io.hpp
 * @brief Little binary envelope for cached matrices: 4 magic bytes, u32 version,
 *        u32 N, then matrices as (u64 rows, u64 cols, row-major f64 data).
 */

#include "tensor.hpp"

#include <array>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

namespace boltzmann::io {

struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

class BinaryWriter
{
 public:
  BinaryWriter(const std::string& path, const char (&magic)[5], std::uint32_t version, std::uint32_t N)
      : out_(path, std::ios::binary | std::ios::trunc)
  {
    if (!out_) throw IoError("cannot open '" + path + "' for writing");
    out_.write(magic, 4);
    write_u32(version);
    write_u32(N);
  }

  void write_u32(std::uint32_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void write_u64(std::uint64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }

  void write_matrix(const Matrix& A)
  {
    write_u64(static_cast<std::uint64_t>(A.rows()));
    write_u64(static_cast<std::uint64_t>(A.cols()));
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) {
        const double v = A(i, j);
        out_.write(reinterpret_cast<const char*>(&v), sizeof v);
      }
  }

  void finish()
  {
    out_.flush();
    if (!out_) throw IoError("write failed");
  }

 private:
  std::ofstream out_;
};

class BinaryReader
{
 public:
  BinaryReader(const std::string& path, const char (&magic)[5])
      : in_(path, std::ios::binary)
  {
    if (!in_) throw IoError("cannot open '" + path + "' for reading");
    std::array<char, 4> m{};
    in_.read(m.data(), 4);
    if (!in_ || std::string(m.data(), 4) != std::string(magic, 4))
      throw IoError("'" + path + "' has wrong magic bytes");
    version_ = read_u32();
    N_ = read_u32();
  }

  std::uint32_t version() const { return version_; }
  std::uint32_t N() const { return N_; }

  std::uint32_t read_u32()
  {
    std::uint32_t v = 0;
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in_) throw IoError("truncated file");
    return v;
  }

  std::uint64_t read_u64()
  {
    std::uint64_t v = 0;
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in_) throw IoError("truncated file");
    return v;
  }

  Matrix read_matrix()
  {
    const auto rows = read_u64();
    const auto cols = read_u64();
    if (rows > (1u << 24) || cols > (1u << 24)) throw IoError("implausible matrix dimensions");
    Matrix A(rows, cols);
    for (std::uint64_t i = 0; i < rows; ++i)
      for (std::uint64_t j = 0; j < cols; ++j) {
        double v = 0;
        in_.read(reinterpret_cast<char*>(&v), sizeof v);
        A(i, j) = v;
      }
    if (!in_) throw IoError("truncated file");
    return A;
  }

 private:
  std::ifstream in_;
  std::uint32_t version_ = 0;
  std::uint32_t N_ = 0;
};

}  // namespace boltzmann::io
