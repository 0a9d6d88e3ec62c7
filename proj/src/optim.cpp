#include "regnn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace regnn {

std::string to_string(OptKind k) {
  switch (k) {
    case OptKind::SGD: return "sgd";
    case OptKind::Momentum: return "momentum";
    case OptKind::Nesterov: return "nesterov";
    case OptKind::Adagrad: return "adagrad";
    case OptKind::Adam: return "adam";
  }
  return "?";
}

OptKind optkind_from_string(const std::string& s) {
  if (s == "sgd") return OptKind::SGD;
  if (s == "momentum") return OptKind::Momentum;
  if (s == "nesterov") return OptKind::Nesterov;
  if (s == "adagrad") return OptKind::Adagrad;
  if (s == "adam") return OptKind::Adam;
  throw std::invalid_argument("unknown optimizer kind: " + s);
}

bool is_adaptive(OptKind k) { return k == OptKind::Adagrad || k == OptKind::Adam; }

void Optimizer::step(const std::vector<DenseMatrix*>& params,
                     const std::vector<const DenseMatrix*>& grads,
                     const std::vector<char>* decay_mask) {
  if (params.size() != grads.size()) throw std::invalid_argument("optimizer: params/grads mismatch");
  if (cfg_.lr < 0.0) throw std::invalid_argument("optimizer: negative learning rate");
  if (buf1_.empty()) {
    for (const auto* p : params) {
      buf1_.emplace_back(p->rows(), p->cols(), 0.0);
      buf2_.emplace_back(p->rows(), p->cols(), 0.0);
    }
  }
  if (buf1_.size() != params.size()) throw std::invalid_argument("optimizer: parameter set changed");
  ++t_;
  for (std::size_t i = 0; i < params.size(); ++i) {
    DenseMatrix& theta = *params[i];
    const DenseMatrix& g = *grads[i];
    if (!theta.same_shape(g)) throw std::invalid_argument("optimizer: grad shape mismatch");
    bool decay = cfg_.weight_decay != 0.0 && (!decay_mask || (*decay_mask)[i]);
    for (std::size_t j = 0; j < theta.size(); ++j) {
      double grad = g.data()[j];
      if (decay) grad += cfg_.weight_decay * theta.data()[j];
      double& x = theta.data()[j];
      switch (cfg_.kind) {
        case OptKind::SGD:
          x -= cfg_.lr * grad;
          break;
        case OptKind::Momentum: {
          double& v = buf1_[i].data()[j];
          v = cfg_.momentum * v + grad;
          x -= cfg_.lr * v;
          break;
        }
        case OptKind::Nesterov: {
          double& v = buf1_[i].data()[j];
          v = cfg_.momentum * v + grad;
          x -= cfg_.lr * (grad + cfg_.momentum * v);
          break;
        }
        case OptKind::Adagrad: {
          double& acc = buf2_[i].data()[j];
          acc += grad * grad;
          x -= cfg_.lr * grad / (std::sqrt(acc) + cfg_.eps);
          break;
        }
        case OptKind::Adam: {
          double& m = buf1_[i].data()[j];
          double& v = buf2_[i].data()[j];
          m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * grad;
          v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * grad * grad;
          double mhat = m / (1.0 - std::pow(cfg_.beta1, static_cast<double>(t_)));
          double vhat = v / (1.0 - std::pow(cfg_.beta2, static_cast<double>(t_)));
          x -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
          break;
        }
      }
    }
  }
}

ScalingReport verify_scaling_identity(OptKind kind, double lambda,
                                      const std::vector<DenseMatrix>& gradient_trace, double lr,
                                      double eps, double tolerance) {
  if (gradient_trace.empty()) throw std::invalid_argument("verify_scaling_identity: empty trace");
  ScalingReport rep;
  rep.kind = kind;
  rep.lambda = lambda;
  rep.eps = eps;
  bool adaptive = is_adaptive(kind);
  rep.expected_update_ratio = adaptive ? 1.0 : lambda;
  rep.expected_alpha_ratio = adaptive ? lambda : lambda * lambda;

  // Identity verification isolates the pure gradient path: no weight decay,
  // and eps as given (0 in exact mode).
  OptimizerConfig cfg;
  cfg.kind = kind;
  cfg.lr = lr;
  cfg.weight_decay = 0.0;
  cfg.eps = eps;
  Optimizer scaled(cfg), direct(cfg);

  std::size_t r = gradient_trace[0].rows(), c = gradient_trace[0].cols();
  // None of the verified update rules read the parameter value (decay is off),
  // so zeroing theta before each step measures the per-step modification
  // exactly while the optimizer buffers still accumulate the full trajectory.
  DenseMatrix theta_scaled(r, c, 0.0);
  DenseMatrix theta_direct(r, c, 0.0);
  double worst = 0.0;
  for (const DenseMatrix& g : gradient_trace) {
    DenseMatrix g_scaled = g;
    g_scaled.scale_inplace(lambda);
    std::fill(theta_scaled.data().begin(), theta_scaled.data().end(), 0.0);
    std::fill(theta_direct.data().begin(), theta_direct.data().end(), 0.0);
    {
      std::vector<DenseMatrix*> ps{&theta_scaled};
      std::vector<const DenseMatrix*> gs{&g_scaled};
      scaled.step(ps, gs);
    }
    {
      std::vector<DenseMatrix*> ps{&theta_direct};
      std::vector<const DenseMatrix*> gs{&g};
      direct.step(ps, gs);
    }
    double ratio_num = 0.0, ratio_den = 0.0;
    for (std::size_t j = 0; j < theta_scaled.size(); ++j) {
      double de_scaled = theta_scaled.data()[j];
      double de_direct = theta_direct.data()[j];
      double expected = rep.expected_update_ratio * de_direct;
      double denom = std::max({std::abs(expected), std::abs(de_scaled), 1e-12});
      worst = std::max(worst, std::abs(de_scaled - expected) / denom);
      if (std::abs(ratio_den) < std::abs(de_direct)) {
        ratio_num = de_scaled;
        ratio_den = de_direct;
      }
    }
    double ratio = ratio_den != 0.0 ? ratio_num / ratio_den : 0.0;
    rep.observed_update_ratio.push_back(ratio);
    rep.observed_alpha_ratio.push_back(lambda * ratio);
  }
  rep.max_deviation = worst;
  rep.pass = worst < tolerance;
  return rep;
}

}  // namespace regnn
