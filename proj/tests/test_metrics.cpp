#include <doctest.h>

#include <cmath>
#include <random>

#include "regnn/metrics.hpp"

using namespace regnn;

TEST_CASE("f1 scores") {
  {
    std::vector<int> perfect{0, 1, 2, 1};
    std::vector<int> mask{0, 1, 2, 3};
    F1Scores s = evaluate_f1(perfect, perfect, mask, 3);
    CHECK(s.micro == 1.0);
    CHECK(s.macro == 1.0);
  }
  {
    // all predictions class 0, labels half and half
    std::vector<int> pred(10, 0);
    std::vector<int> labels{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    std::vector<int> mask;
    for (int i = 0; i < 10; ++i) mask.push_back(i);
    F1Scores s = evaluate_f1(pred, labels, mask, 2);
    CHECK(s.micro == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.macro == doctest::Approx(1.0 / 3.0).epsilon(1e-12));  // mean(2/3, 0)
  }
  {
    // a single sample is either all right or all wrong
    F1Scores hit = evaluate_f1(std::vector<int>{1}, std::vector<int>{1}, {0}, 2);
    CHECK(hit.micro == 1.0);
    F1Scores miss = evaluate_f1(std::vector<int>{0}, std::vector<int>{1}, {0}, 2);
    CHECK(miss.micro == 0.0);
    CHECK(miss.macro == 0.0);
  }
  CHECK_THROWS_AS(evaluate_f1(std::vector<int>{0}, std::vector<int>{0}, {}, 2),
                  std::invalid_argument);
}

TEST_CASE("argmax logits path") {
  DenseMatrix logits(2, 3, {0.1, 2.0, -1.0, 5.0, 0.0, 0.0});
  std::vector<int> labels{1, 0};
  F1Scores s = evaluate_f1(logits, labels, {0, 1}, 3);
  CHECK(s.micro == 1.0);
}

TEST_CASE("clustering metrics") {
  {
    std::vector<int> labels{0, 0, 1, 1, 2, 2};
    ClusterAgreement a = clustering_metrics(labels, labels);
    CHECK(a.nmi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.ari == doctest::Approx(1.0).epsilon(1e-12));

    // permutation invariance
    std::vector<int> permuted{2, 2, 0, 0, 1, 1};
    ClusterAgreement b = clustering_metrics(permuted, labels);
    CHECK(b.nmi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.ari == doctest::Approx(1.0).epsilon(1e-12));
  }
  {
    // random assignments against balanced labels: ARI concentrates at 0
    std::mt19937_64 rng(3);
    std::size_t n = 10000;
    std::vector<int> labels(n), assign(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(i % 2);
      assign[i] = static_cast<int>(rng() % 2);
    }
    ClusterAgreement a = clustering_metrics(assign, labels);
    CHECK(std::abs(a.ari) < 0.02);
    CHECK(a.nmi < 0.02);
  }
  CHECK_THROWS_AS(clustering_metrics({0, 1}, {0}), std::invalid_argument);
}

TEST_CASE("kmeans on separated clouds") {
  std::mt19937_64 rng(5);
  std::size_t n = 60;
  DenseMatrix pts(n, 2);
  std::vector<int> truth(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = static_cast<int>(i % 2);
    double cx = truth[i] == 0 ? -5.0 : 5.0;
    pts(i, 0) = cx + std::normal_distribution<double>(0, 0.5)(rng);
    pts(i, 1) = std::normal_distribution<double>(0, 0.5)(rng);
  }
  std::vector<int> assign = kmeans_cluster(pts, 2, 10, 77);
  ClusterAgreement a = clustering_metrics(assign, truth);
  CHECK(a.nmi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.ari == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kmeans determinism and edge cases") {
  std::mt19937_64 rng(9);
  DenseMatrix pts = DenseMatrix::gaussian(12, 3, 0.0, 1.0, rng);
  CHECK(kmeans_cluster(pts, 3, 10, 42) == kmeans_cluster(pts, 3, 10, 42));
  CHECK_THROWS_AS(kmeans_cluster(pts, 13, 10, 1), std::invalid_argument);

  // k = N: singleton clusters, zero inertia, all assignments distinct
  std::vector<int> assign = kmeans_cluster(pts, 12, 3, 5);
  std::vector<int> sorted = assign;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == static_cast<int>(i));
}
