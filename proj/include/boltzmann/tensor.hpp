#pragma once

/**
 * @file tensor.hpp
 * @brief Axis-wise matrix application on dense 3-tensors.
 *
 * A 3-tensor X of extents (d0, d1, d2) is stored flat with axis 0 fastest.
 * apply_axes computes Y = (A0 x A1 x A2) X with Y of extents (r0, r1, r2),
 * where A_k is r_k x d_k. Each step is one GEMM on a matrix view of the
 * buffer; transposing the view rotates the axes, so after three steps the
 * original axis order is restored.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace boltzmann {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
using Vector = Eigen::VectorXd;

namespace detail {

/// Z = X^T A^T with X viewed as d x rest; result (rest x r) is the rotated tensor.
inline void rotate_apply(const Matrix& A, const double* in, Eigen::Index rest, double* out)
{
  const Eigen::Index d = A.cols();
  Eigen::Map<const Matrix> X(in, d, rest);
  Eigen::Map<Matrix> Z(out, rest, A.rows());
  Z.noalias() = X.transpose() * A.transpose();
}

}  // namespace detail

/// Scratch buffers for apply_axes; grown on demand, reused across calls.
struct TensorScratch
{
  std::vector<double> a, b;

  void reserve(std::size_t n)
  {
    if (a.size() < n) a.resize(n);
    if (b.size() < n) b.resize(n);
  }
};

/**
 * @brief out = (A0 x A1 x A2) in.
 *
 * @param in  tensor of extents (A0.cols(), A1.cols(), A2.cols())
 * @param out tensor of extents (A0.rows(), A1.rows(), A2.rows()); may not alias in
 */
inline void apply_axes(const Matrix& A0, const Matrix& A1, const Matrix& A2, const double* in, double* out,
                       TensorScratch& scratch)
{
  const Eigen::Index d1 = A1.cols(), d2 = A2.cols();
  const Eigen::Index r0 = A0.rows(), r1 = A1.rows();
  scratch.reserve(static_cast<std::size_t>(std::max(d1 * d2 * r0, d2 * r0 * r1)));
  detail::rotate_apply(A0, in, d1 * d2, scratch.a.data());               // (d1, d2, r0)
  detail::rotate_apply(A1, scratch.a.data(), d2 * r0, scratch.b.data());  // (d2, r0, r1)
  detail::rotate_apply(A2, scratch.b.data(), r0 * r1, out);               // (r0, r1, r2)
}

inline std::vector<double> apply_axes(const Matrix& A0, const Matrix& A1, const Matrix& A2,
                                      const std::vector<double>& in)
{
  if (static_cast<Eigen::Index>(in.size()) != A0.cols() * A1.cols() * A2.cols())
    throw std::invalid_argument("apply_axes: input size does not match matrix columns");
  std::vector<double> out(A0.rows() * A1.rows() * A2.rows());
  TensorScratch scratch;
  apply_axes(A0, A1, A2, in.data(), out.data(), scratch);
  return out;
}

}  // namespace boltzmann
