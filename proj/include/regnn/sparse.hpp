#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "regnn/dense.hpp"

namespace regnn {

// CSR sparse matrix. Row offsets are nondecreasing and column indices are
// strictly increasing within each row (no duplicate coordinates).
struct SparseCSR {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_offsets;  // length rows + 1
  std::vector<std::size_t> col_indices;  // length nnz
  std::vector<double> values;            // length nnz

  SparseCSR() : row_offsets(1, 0) {}
  SparseCSR(std::size_t r, std::size_t c) : rows(r), cols(c), row_offsets(r + 1, 0) {}

  std::size_t nnz() const { return col_indices.size(); }

  static SparseCSR identity(std::size_t n);
  // Builds from (row, col, value) triples; duplicate coordinates are summed.
  static SparseCSR from_coo(std::size_t rows, std::size_t cols,
                            std::vector<std::pair<std::size_t, std::size_t>> coords,
                            double value = 1.0);

  void validate() const;  // throws on malformed structure

  SparseCSR transpose() const;
  DenseMatrix to_dense() const;
  bool same_pattern(const SparseCSR& o) const;
  bool structurally_symmetric() const;

  // y = A * x, rows of x indexed by this->cols.
  DenseMatrix multiply(const DenseMatrix& x) const;
  // y = A^T * x, without materializing the transpose.
  DenseMatrix multiply_transposed(const DenseMatrix& x) const;

  std::vector<double> row_sums() const;
};

// Sparse-sparse product a * b (row-merge algorithm).
SparseCSR spgemm(const SparseCSR& a, const SparseCSR& b);

// a + b over the union pattern.
SparseCSR sp_add(const SparseCSR& a, const SparseCSR& b);

}  // namespace regnn
