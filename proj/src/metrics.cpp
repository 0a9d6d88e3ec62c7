#include "regnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace regnn {

std::vector<int> argmax_rows(const DenseMatrix& logits) {
  std::vector<int> out(logits.rows());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const double* row = logits.row_ptr(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < logits.cols(); ++j)
      if (row[j] > row[best]) best = j;
    out[i] = static_cast<int>(best);
  }
  return out;
}

F1Scores evaluate_f1(const std::vector<int>& predictions, const std::vector<int>& labels,
                     const std::vector<int>& mask, int num_classes) {
  if (mask.empty()) throw std::invalid_argument("evaluate_f1: empty mask");
  std::vector<long> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  for (int i : mask) {
    int p = predictions.at(i), y = labels.at(i);
    if (p < 0 || p >= num_classes || y < 0 || y >= num_classes)
      throw std::out_of_range("evaluate_f1: class id out of range");
    if (p == y)
      tp[y]++;
    else {
      fp[p]++;
      fn[y]++;
    }
  }
  F1Scores s;
  long tp_all = 0, fp_all = 0, fn_all = 0;
  double macro_sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    tp_all += tp[c];
    fp_all += fp[c];
    fn_all += fn[c];
    double denom = 2.0 * tp[c] + fp[c] + fn[c];
    macro_sum += denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
  }
  double micro_denom = tp_all + 0.5 * (fp_all + fn_all);
  s.micro = micro_denom > 0.0 ? tp_all / micro_denom : 0.0;
  s.macro = macro_sum / num_classes;
  return s;
}

F1Scores evaluate_f1(const DenseMatrix& logits, const std::vector<int>& labels,
                     const std::vector<int>& mask, int num_classes) {
  return evaluate_f1(argmax_rows(logits), labels, mask, num_classes);
}

namespace {

std::vector<std::vector<long>> contingency(const std::vector<int>& a, const std::vector<int>& b,
                                           int& ka, int& kb) {
  ka = 0;
  kb = 0;
  for (int x : a) ka = std::max(ka, x + 1);
  for (int x : b) kb = std::max(kb, x + 1);
  std::vector<std::vector<long>> n(ka, std::vector<long>(kb, 0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || b[i] < 0) throw std::invalid_argument("clustering_metrics: negative label");
    n[a[i]][b[i]]++;
  }
  return n;
}

double comb2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

ClusterAgreement clustering_metrics(const std::vector<int>& assignments,
                                    const std::vector<int>& labels) {
  if (assignments.size() != labels.size())
    throw std::invalid_argument("clustering_metrics: length mismatch");
  if (assignments.size() < 2) throw std::invalid_argument("clustering_metrics: need >= 2 points");
  int ka = 0, kb = 0;
  auto n = contingency(assignments, labels, ka, kb);
  double N = static_cast<double>(assignments.size());
  std::vector<long> a(ka, 0), b(kb, 0);
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) {
      a[i] += n[i][j];
      b[j] += n[i][j];
    }

  double mi = 0.0, ha = 0.0, hb = 0.0;
  for (int i = 0; i < ka; ++i)
    if (a[i] > 0) ha -= (a[i] / N) * std::log(a[i] / N);
  for (int j = 0; j < kb; ++j)
    if (b[j] > 0) hb -= (b[j] / N) * std::log(b[j] / N);
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j)
      if (n[i][j] > 0) mi += (n[i][j] / N) * std::log(N * n[i][j] / (static_cast<double>(a[i]) * b[j]));

  ClusterAgreement out;
  if (ha == 0.0 && hb == 0.0)
    out.nmi = 1.0;  // two trivial single-cluster partitions agree completely
  else if (ha == 0.0 || hb == 0.0)
    out.nmi = 0.0;
  else
    out.nmi = mi / (0.5 * (ha + hb));

  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) sum_ij += comb2(static_cast<double>(n[i][j]));
  for (int i = 0; i < ka; ++i) sum_a += comb2(static_cast<double>(a[i]));
  for (int j = 0; j < kb; ++j) sum_b += comb2(static_cast<double>(b[j]));
  double expected = sum_a * sum_b / comb2(N);
  double max_index = 0.5 * (sum_a + sum_b);
  out.ari = max_index == expected ? 1.0 : (sum_ij - expected) / (max_index - expected);
  return out;
}

namespace {

double sq_dist(const DenseMatrix& pts, std::size_t i, const std::vector<double>& center) {
  const double* p = pts.row_ptr(i);
  double d = 0.0;
  for (std::size_t j = 0; j < pts.cols(); ++j) {
    double diff = p[j] - center[j];
    d += diff * diff;
  }
  return d;
}

struct KMeansRun {
  std::vector<int> assign;
  double inertia = std::numeric_limits<double>::infinity();
};

KMeansRun lloyd_once(const DenseMatrix& pts, std::size_t k, std::mt19937_64& rng) {
  std::size_t n = pts.rows(), d = pts.cols();
  std::vector<std::vector<double>> centers(k, std::vector<double>(d, 0.0));

  // k-means++ seeding
  std::uniform_int_distribution<std::size_t> uni(0, n - 1);
  std::size_t first = uni(rng);
  for (std::size_t j = 0; j < d; ++j) centers[0][j] = pts(first, j);
  std::vector<double> dist(n);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t cc = 0; cc < c; ++cc) best = std::min(best, sq_dist(pts, i, centers[cc]));
      dist[i] = best;
      total += best;
    }
    std::size_t pick;
    if (total <= 0.0) {
      pick = uni(rng);
    } else {
      std::uniform_real_distribution<double> ur(0.0, total);
      double target = ur(rng), acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    }
    for (std::size_t j = 0; j < d; ++j) centers[c][j] = pts(pick, j);
  }

  KMeansRun run;
  run.assign.assign(n, -1);
  for (int iter = 0; iter < 200; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int bc = 0;
      for (std::size_t c = 0; c < k; ++c) {
        double dd = sq_dist(pts, i, centers[c]);
        if (dd < best) {
          best = dd;
          bc = static_cast<int>(c);
        }
      }
      if (run.assign[i] != bc) {
        run.assign[i] = bc;
        changed = true;
      }
    }
    std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      counts[run.assign[i]]++;
      const double* p = pts.row_ptr(i);
      for (std::size_t j = 0; j < d; ++j) sums[run.assign[i]][j] += p[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // reseed to the point farthest from its assigned centroid
        double worst = -1.0;
        std::size_t pick = 0;
        for (std::size_t i = 0; i < n; ++i) {
          double dd = sq_dist(pts, i, centers[run.assign[i]]);
          if (dd > worst) {
            worst = dd;
            pick = i;
          }
        }
        for (std::size_t j = 0; j < d; ++j) centers[c][j] = pts(pick, j);
        changed = true;
      } else {
        for (std::size_t j = 0; j < d; ++j) centers[c][j] = sums[c][j] / counts[c];
      }
    }
    if (!changed) break;
  }
  run.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) run.inertia += sq_dist(pts, i, centers[run.assign[i]]);
  return run;
}

}  // namespace

std::vector<int> kmeans_cluster(const DenseMatrix& points, std::size_t k, std::size_t restarts,
                                std::uint64_t seed) {
  if (k == 0 || k > points.rows())
    throw std::invalid_argument("kmeans: k must be in [1, n], got k=" + std::to_string(k) +
                                ", n=" + std::to_string(points.rows()));
  std::mt19937_64 master(seed);
  KMeansRun best;
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    std::mt19937_64 rng(master());
    KMeansRun run = lloyd_once(points, k, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best.assign;
}

}  // namespace regnn
