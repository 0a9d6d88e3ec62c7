#include "regnn/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace regnn {

SparseCSR SparseCSR::identity(std::size_t n) {
  SparseCSR s(n, n);
  s.col_indices.resize(n);
  s.values.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    s.col_indices[i] = i;
    s.row_offsets[i + 1] = i + 1;
  }
  return s;
}

SparseCSR SparseCSR::from_coo(std::size_t rows, std::size_t cols,
                              std::vector<std::pair<std::size_t, std::size_t>> coords,
                              double value) {
  for (const auto& [r, c] : coords) {
    if (r >= rows || c >= cols)
      throw std::out_of_range("from_coo: coordinate (" + std::to_string(r) + "," +
                              std::to_string(c) + ") outside " + std::to_string(rows) + "x" +
                              std::to_string(cols));
  }
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  SparseCSR s(rows, cols);
  s.col_indices.reserve(coords.size());
  s.values.assign(coords.size(), value);
  std::size_t k = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (k < coords.size() && coords[k].first == r) {
      s.col_indices.push_back(coords[k].second);
      ++k;
    }
    s.row_offsets[r + 1] = s.col_indices.size();
  }
  return s;
}

void SparseCSR::validate() const {
  if (row_offsets.size() != rows + 1) throw std::runtime_error("csr: bad row_offsets length");
  if (row_offsets.front() != 0 || row_offsets.back() != nnz())
    throw std::runtime_error("csr: offset endpoints");
  if (values.size() != col_indices.size()) throw std::runtime_error("csr: values length");
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_offsets[r] > row_offsets[r + 1]) throw std::runtime_error("csr: decreasing offsets");
    for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
      if (col_indices[k] >= cols) throw std::runtime_error("csr: column out of range");
      if (k > row_offsets[r] && col_indices[k] <= col_indices[k - 1])
        throw std::runtime_error("csr: columns not strictly increasing in row " + std::to_string(r));
    }
  }
  for (double v : values)
    if (!std::isfinite(v)) throw std::runtime_error("csr: non-finite value");
}

SparseCSR SparseCSR::transpose() const {
  SparseCSR t(cols, rows);
  std::vector<std::size_t> counts(cols, 0);
  for (std::size_t c : col_indices) counts[c]++;
  for (std::size_t c = 0; c < cols; ++c) t.row_offsets[c + 1] = t.row_offsets[c] + counts[c];
  t.col_indices.resize(nnz());
  t.values.resize(nnz());
  std::vector<std::size_t> cursor(t.row_offsets.begin(), t.row_offsets.end() - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
      std::size_t c = col_indices[k];
      t.col_indices[cursor[c]] = r;
      t.values[cursor[c]] = values[k];
      cursor[c]++;
    }
  }
  return t;
}

DenseMatrix SparseCSR::to_dense() const {
  DenseMatrix d(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k)
      d(r, col_indices[k]) += values[k];
  return d;
}

bool SparseCSR::same_pattern(const SparseCSR& o) const {
  return rows == o.rows && cols == o.cols && row_offsets == o.row_offsets &&
         col_indices == o.col_indices;
}

bool SparseCSR::structurally_symmetric() const {
  if (rows != cols) return false;
  return same_pattern(transpose());
}

DenseMatrix SparseCSR::multiply(const DenseMatrix& x) const {
  if (cols != x.rows())
    throw std::invalid_argument("csr multiply: " + std::to_string(cols) + " vs " +
                                std::to_string(x.rows()));
  DenseMatrix y(rows, x.cols());
  for (std::size_t r = 0; r < rows; ++r) {
    double* yrow = y.row_ptr(r);
    for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
      double v = values[k];
      const double* xrow = x.row_ptr(col_indices[k]);
      for (std::size_t j = 0; j < x.cols(); ++j) yrow[j] += v * xrow[j];
    }
  }
  return y;
}

DenseMatrix SparseCSR::multiply_transposed(const DenseMatrix& x) const {
  if (rows != x.rows())
    throw std::invalid_argument("csr multiply_transposed: " + std::to_string(rows) + " vs " +
                                std::to_string(x.rows()));
  DenseMatrix y(cols, x.cols());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xrow = x.row_ptr(r);
    for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
      double v = values[k];
      double* yrow = y.row_ptr(col_indices[k]);
      for (std::size_t j = 0; j < x.cols(); ++j) yrow[j] += v * xrow[j];
    }
  }
  return y;
}

std::vector<double> SparseCSR::row_sums() const {
  std::vector<double> s(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) s[r] += values[k];
  return s;
}

SparseCSR spgemm(const SparseCSR& a, const SparseCSR& b) {
  if (a.cols != b.rows) throw std::invalid_argument("spgemm: inner dims");
  SparseCSR c(a.rows, b.cols);
  std::vector<double> acc(b.cols, 0.0);
  std::vector<char> marked(b.cols, 0);
  std::vector<std::size_t> touched;
  touched.reserve(64);
  for (std::size_t r = 0; r < a.rows; ++r) {
    touched.clear();
    for (std::size_t ka = a.row_offsets[r]; ka < a.row_offsets[r + 1]; ++ka) {
      double av = a.values[ka];
      std::size_t mid = a.col_indices[ka];
      for (std::size_t kb = b.row_offsets[mid]; kb < b.row_offsets[mid + 1]; ++kb) {
        std::size_t c2 = b.col_indices[kb];
        if (!marked[c2]) {
          marked[c2] = 1;
          touched.push_back(c2);
        }
        acc[c2] += av * b.values[kb];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t c2 : touched) {
      c.col_indices.push_back(c2);
      c.values.push_back(acc[c2]);
      acc[c2] = 0.0;
      marked[c2] = 0;
    }
    c.row_offsets[r + 1] = c.col_indices.size();
  }
  return c;
}

SparseCSR sp_add(const SparseCSR& a, const SparseCSR& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("sp_add: shape");
  SparseCSR c(a.rows, a.cols);
  for (std::size_t r = 0; r < a.rows; ++r) {
    std::size_t ka = a.row_offsets[r], kb = b.row_offsets[r];
    while (ka < a.row_offsets[r + 1] || kb < b.row_offsets[r + 1]) {
      std::size_t ca = ka < a.row_offsets[r + 1] ? a.col_indices[ka] : a.cols;
      std::size_t cb = kb < b.row_offsets[r + 1] ? b.col_indices[kb] : a.cols;
      if (ca < cb) {
        c.col_indices.push_back(ca);
        c.values.push_back(a.values[ka++]);
      } else if (cb < ca) {
        c.col_indices.push_back(cb);
        c.values.push_back(b.values[kb++]);
      } else {
        c.col_indices.push_back(ca);
        c.values.push_back(a.values[ka++] + b.values[kb++]);
      }
    }
    c.row_offsets[r + 1] = c.col_indices.size();
  }
  return c;
}

}  // namespace regnn
