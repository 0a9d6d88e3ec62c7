#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace regnn {

// Row-major dense matrix of doubles. All model/state math in this project is
// fp64; the verification tolerances (1e-8 .. 1e-12) do not survive fp32.
class DenseMatrix {
 public:
  DenseMatrix() : rows_(0), cols_(0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw std::invalid_argument("DenseMatrix: data length " + std::to_string(data_.size()) +
                                  " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }

  static DenseMatrix zeros(std::size_t r, std::size_t c) { return DenseMatrix(r, c, 0.0); }
  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static DenseMatrix uniform(std::size_t r, std::size_t c, double lo, double hi, std::mt19937_64& rng) {
    DenseMatrix m(r, c);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (auto& v : m.data_) v = dist(rng);
    return m;
  }
  static DenseMatrix gaussian(std::size_t r, std::size_t c, double mean, double stddev, std::mt19937_64& rng) {
    DenseMatrix m(r, c);
    std::normal_distribution<double> dist(mean, stddev);
    for (auto& v : m.data_) v = dist(rng);
    return m;
  }
  // Xavier-uniform: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
  static DenseMatrix xavier_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
    double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    return uniform(fan_in, fan_out, -a, a, rng);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const DenseMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  void add_inplace(const DenseMatrix& o, double scale = 1.0);
  void scale_inplace(double s);
  bool all_finite() const;
  void require_finite(const std::string& what) const;

  DenseMatrix transpose() const;

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// a^T * b without materializing the transpose.
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);
// a * b^T without materializing the transpose.
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
double max_abs(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double dot(const DenseMatrix& a, const DenseMatrix& b);

// Squared 2-norm of one row; the bound convention used by the expressivity checks.
double row_sq_norm(const DenseMatrix& m, std::size_t row);
// max_j ||column j||^2, the weight-bound convention.
double max_col_sq_norm(const DenseMatrix& m);

}  // namespace regnn
