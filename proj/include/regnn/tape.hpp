#pragma once

#include <functional>
#include <random>
#include <vector>

#include "regnn/dense.hpp"
#include "regnn/sparse.hpp"

namespace regnn {

// Handle to a node on a Tape.
struct Var {
  std::size_t idx = static_cast<std::size_t>(-1);
  bool valid() const { return idx != static_cast<std::size_t>(-1); }
};

// Append-only record of a forward computation over dense matrices. backward()
// walks the record once in reverse, accumulating adjoints; the record order is
// the topological order by construction. Single-threaded: one builder, one
// backward pass, fixed accumulation order.
class Tape {
 public:
  Var constant(DenseMatrix v) { return make_leaf(std::move(v), false); }
  Var param(DenseMatrix v) { return make_leaf(std::move(v), true); }

  const DenseMatrix& value(Var v) const { return nodes_.at(v.idx).value; }
  // Zero until backward() has run; parameters untouched by the loss keep zero.
  const DenseMatrix& grad(Var v) const { return nodes_.at(v.idx).grad; }
  bool requires_grad(Var v) const { return nodes_.at(v.idx).requires_grad; }

  Var matmul(Var a, Var b);
  Var spmm(SparseCSR s, Var h);  // s is a constant of the graph
  Var add(Var a, Var b);
  Var scale(Var a, double c);
  // (offset + s) * h with s a 1x1 Var; used for GIN-style self terms.
  Var scale_by_scalar(Var h, Var s, double offset);
  Var add_row_vector(Var a, Var row);  // row broadcast over all rows of a
  Var relu(Var x);
  Var leaky_relu(Var x, double slope);
  // Inverted dropout; identity when !training or rate == 0. The keep mask is
  // drawn once here and reused by the backward pass.
  Var dropout(Var x, double rate, bool training, std::mt19937_64& rng);
  Var row_slice(Var x, std::size_t begin, std::size_t end);
  Var stack_rows(const std::vector<Var>& parts);
  Var concat_cols(const std::vector<Var>& parts);
  Var sum(Var x);          // 1x1
  Var sum_squares(Var x);  // 1x1
  // Mean over masked rows of -log softmax(logits)[label]; row-max stabilized.
  Var softmax_cross_entropy(Var logits, const std::vector<int>& labels,
                            const std::vector<int>& mask_rows);

  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

  // Used by fused ops defined outside this class (relation aggregation, GTN).
  Var make_node(DenseMatrix value, std::function<void(Tape&, std::size_t)> backward_fn);
  DenseMatrix& grad_ref(std::size_t idx) { return nodes_[idx].grad; }
  void accumulate_grad(Var v, const DenseMatrix& g);

 private:
  struct Node {
    DenseMatrix value;
    DenseMatrix grad;
    bool requires_grad = false;
    std::function<void(Tape&, std::size_t)> backward_fn;  // empty for leaves
  };

  Var make_leaf(DenseMatrix v, bool requires_grad);
  void check_shape(Var a, Var b, const char* op) const;

  std::vector<Node> nodes_;
};

// Central finite differences of a scalar function against analytic gradients.
// Returns the max relative error over all coordinates of all parameters, with
// denominator max(|analytic|, |numeric|, 1e-8).
double finite_diff_check(const std::function<double()>& f, const std::vector<DenseMatrix*>& params,
                         const std::vector<const DenseMatrix*>& analytic_grads, double h);

}  // namespace regnn
