#include <doctest.h>

#include <random>

#include "regnn/dense.hpp"
#include "regnn/sparse.hpp"

using namespace regnn;

TEST_CASE("dense matmul basics") {
  std::mt19937_64 rng(1);
  DenseMatrix b = DenseMatrix::gaussian(3, 4, 0.0, 1.0, rng);
  CHECK(max_abs_diff(matmul(DenseMatrix::identity(3), b), b) == 0.0);

  DenseMatrix a = DenseMatrix::gaussian(2, 3, 0.0, 1.0, rng);
  DenseMatrix c = matmul(a, b);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-14));
    }

  CHECK(max_abs_diff(matmul_at_b(a, c), matmul(a.transpose(), c)) < 1e-14);
  CHECK(max_abs_diff(matmul_a_bt(c, b), matmul(c, b.transpose())) < 1e-14);
  CHECK_THROWS_AS(matmul(a, a), std::invalid_argument);
}

TEST_CASE("norm helpers") {
  DenseMatrix m(2, 2, {3.0, 0.0, 4.0, 1.0});
  CHECK(row_sq_norm(m, 0) == 9.0);
  CHECK(row_sq_norm(m, 1) == 17.0);
  CHECK(max_col_sq_norm(m) == 25.0);  // column 0: 9 + 16
}

TEST_CASE("csr construction collapses duplicates and validates") {
  SparseCSR s = SparseCSR::from_coo(3, 3, {{0, 1}, {0, 1}, {2, 0}});
  CHECK(s.nnz() == 2);
  s.validate();
  CHECK(s.to_dense()(0, 1) == 1.0);
  CHECK_THROWS_AS(SparseCSR::from_coo(2, 2, {{2, 0}}), std::out_of_range);
}

TEST_CASE("csr multiply matches dense oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.3) coords.emplace_back(i, j);
    SparseCSR s = SparseCSR::from_coo(4, 4, coords);
    for (auto& v : s.values) v = std::normal_distribution<double>(0, 1)(rng);
    DenseMatrix x = DenseMatrix::gaussian(4, 3, 0.0, 1.0, rng);
    CHECK(max_abs_diff(s.multiply(x), matmul(s.to_dense(), x)) < 1e-12);
    CHECK(max_abs_diff(s.multiply_transposed(x), matmul(s.to_dense().transpose(), x)) < 1e-12);
  }
}

TEST_CASE("csr identity and empty rows") {
  SparseCSR id = SparseCSR::identity(3);
  std::mt19937_64 rng(3);
  DenseMatrix x = DenseMatrix::gaussian(3, 2, 0.0, 1.0, rng);
  CHECK(max_abs_diff(id.multiply(x), x) == 0.0);

  SparseCSR s = SparseCSR::from_coo(3, 3, {{0, 1}});  // rows 1, 2 empty
  DenseMatrix y = s.multiply(x);
  CHECK(y(1, 0) == 0.0);
  CHECK(y(2, 1) == 0.0);
}

TEST_CASE("spgemm and sp_add match dense oracles") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto rand_csr = [&](std::size_t n) {
      std::vector<std::pair<std::size_t, std::size_t>> coords;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.4) coords.emplace_back(i, j);
      SparseCSR s = SparseCSR::from_coo(n, n, coords);
      for (auto& v : s.values) v = std::normal_distribution<double>(0, 1)(rng);
      return s;
    };
    SparseCSR a = rand_csr(5), b = rand_csr(5);
    CHECK(max_abs_diff(spgemm(a, b).to_dense(), matmul(a.to_dense(), b.to_dense())) < 1e-12);
    CHECK(max_abs_diff(sp_add(a, b).to_dense(), add(a.to_dense(), b.to_dense())) < 1e-12);
    spgemm(a, b).validate();
    sp_add(a, b).validate();
  }
}

TEST_CASE("csr transpose round trip") {
  SparseCSR s = SparseCSR::from_coo(3, 4, {{0, 3}, {1, 0}, {2, 2}});
  CHECK(max_abs_diff(s.transpose().transpose().to_dense(), s.to_dense()) == 0.0);
  CHECK(s.transpose().rows == 4);
}
