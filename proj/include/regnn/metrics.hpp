#pragma once

#include <vector>

#include "regnn/dense.hpp"

namespace regnn {

struct F1Scores {
  double macro = 0.0;
  double micro = 0.0;
};

// Pooled-count micro F1 and unweighted per-class macro F1 over the masked
// rows. Classes absent from both predictions and labels count as F1 = 0.
F1Scores evaluate_f1(const std::vector<int>& predictions, const std::vector<int>& labels,
                     const std::vector<int>& mask, int num_classes);
// Argmax of logit rows, then as above; mask indexes logit rows.
F1Scores evaluate_f1(const DenseMatrix& logits, const std::vector<int>& labels,
                     const std::vector<int>& mask, int num_classes);

std::vector<int> argmax_rows(const DenseMatrix& logits);

struct ClusterAgreement {
  double nmi = 0.0;  // arithmetic-mean normalization
  double ari = 0.0;
};

ClusterAgreement clustering_metrics(const std::vector<int>& assignments,
                                    const std::vector<int>& labels);

// Lloyd's algorithm with k-means++ seeding; the best-inertia restart wins.
// Empty clusters are reseeded to the point farthest from its centroid.
std::vector<int> kmeans_cluster(const DenseMatrix& points, std::size_t k, std::size_t restarts,
                                std::uint64_t seed);

}  // namespace regnn
