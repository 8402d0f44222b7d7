#pragma once

#include <cstddef>
#include <vector>

#include "vitprobe/types.hpp"

namespace vitprobe {

// Orthonormal DCT-II:
//   C[u,v] = a(u) a(v) sum_{m,n} X[m,n] cos(pi (2m+1) u / 2M) cos(pi (2n+1) v / 2N)
// with a(0) = sqrt(1/M), a(k>0) = sqrt(2/M) (and likewise for N).

// n x n matrix B with B[k, j] = a(k) cos(pi (2j+1) k / 2n); rows are orthonormal.
Matrix dct_basis(std::size_t n);

// Separable 2D transform: B_M * X * B_N^T. Throws DimensionError on empty input.
Matrix dct2(const Matrix& x);
// Inverse under the orthonormal convention: B_M^T * C * B_N.
Matrix idct2(const Matrix& coeffs);

struct CompressionShape {
  std::size_t rows = 256;
  std::size_t cols = 768;
  std::size_t block = 8;
};

/// Top-left block x block DCT coefficients, flattened row-major.
///
/// Only the first `block` basis rows are evaluated, so the cost is
/// O(block * rows * cols) rather than a full 2D transform. The grid must
/// match `shape` exactly (DimensionError otherwise).
std::vector<double> compress_patch_grid(const Matrix& grid, const CompressionShape& shape = {});

}  // namespace vitprobe
