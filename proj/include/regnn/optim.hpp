#pragma once

#include <string>
#include <vector>

#include "regnn/dense.hpp"

namespace regnn {

enum class OptKind { SGD, Momentum, Nesterov, Adagrad, Adam };

std::string to_string(OptKind k);
OptKind optkind_from_string(const std::string& s);
bool is_adaptive(OptKind k);  // Adagrad/Adam scale-invariant family

struct OptimizerConfig {
  OptKind kind = OptKind::Adam;
  double lr = 0.001;
  double weight_decay = 0.0;  // applied as an L2 gradient term before the update
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One optimizer owns one ordered parameter list; buffers are keyed by position
// and shaped on first use.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg) {}

  // params[i] is updated in place from grads[i]. decay_mask, when provided,
  // disables weight decay per parameter (0 = exempt).
  void step(const std::vector<DenseMatrix*>& params, const std::vector<const DenseMatrix*>& grads,
            const std::vector<char>* decay_mask = nullptr);

  const OptimizerConfig& config() const { return cfg_; }
  long step_count() const { return t_; }

  // Buffer inspection for the scaling-identity checks.
  const DenseMatrix& velocity(std::size_t i) const { return buf1_.at(i); }
  const DenseMatrix& accumulator(std::size_t i) const { return buf2_.at(i); }
  const DenseMatrix& first_moment(std::size_t i) const { return buf1_.at(i); }
  const DenseMatrix& second_moment(std::size_t i) const { return buf2_.at(i); }

 private:
  OptimizerConfig cfg_;
  long t_ = 0;
  std::vector<DenseMatrix> buf1_;  // velocity / first moment
  std::vector<DenseMatrix> buf2_;  // squared-grad accumulator / second moment
};

// Two parallel trajectories over a shared gradient trace: the scaled-embedding
// path sees lambda * g_t, the direct path sees g_t. Expected per-step update
// relation: SGD/Momentum/Nesterov scale by lambda; Adagrad/Adam (eps = 0) are
// unchanged. The induced weight modifications follow as lambda^2 / lambda.
struct ScalingReport {
  OptKind kind = OptKind::SGD;
  double lambda = 1.0;
  double eps = 0.0;
  std::vector<double> observed_update_ratio;  // per step, scaled/direct update
  std::vector<double> observed_alpha_ratio;   // per step, induced weight-change ratio
  double expected_update_ratio = 1.0;
  double expected_alpha_ratio = 1.0;
  double max_deviation = 0.0;  // relative, against the expected update relation
  bool pass = false;
};

ScalingReport verify_scaling_identity(OptKind kind, double lambda,
                                      const std::vector<DenseMatrix>& gradient_trace,
                                      double lr = 0.001, double eps = 0.0,
                                      double tolerance = 1e-9);

}  // namespace regnn
