#include "regnn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace regnn {

Var Tape::make_leaf(DenseMatrix v, bool requires_grad) {
  Node n;
  n.grad = DenseMatrix::zeros(v.rows(), v.cols());
  n.value = std::move(v);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::make_node(DenseMatrix value, std::function<void(Tape&, std::size_t)> backward_fn) {
  Node n;
  n.grad = DenseMatrix::zeros(value.rows(), value.cols());
  n.value = std::move(value);
  n.requires_grad = true;
  n.backward_fn = std::move(backward_fn);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

void Tape::accumulate_grad(Var v, const DenseMatrix& g) { nodes_[v.idx].grad.add_inplace(g); }

void Tape::check_shape(Var a, Var b, const char* op) const {
  if (!value(a).same_shape(value(b)))
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                std::to_string(value(a).rows()) + "x" + std::to_string(value(a).cols()) +
                                " vs " + std::to_string(value(b).rows()) + "x" +
                                std::to_string(value(b).cols()));
}

Var Tape::matmul(Var a, Var b) {
  DenseMatrix out = regnn::matmul(value(a), value(b));
  std::size_t ia = a.idx, ib = b.idx;
  return make_node(std::move(out), [ia, ib](Tape& t, std::size_t self) {
    const DenseMatrix& g = t.nodes_[self].grad;
    t.nodes_[ia].grad.add_inplace(matmul_a_bt(g, t.nodes_[ib].value));
    t.nodes_[ib].grad.add_inplace(matmul_at_b(t.nodes_[ia].value, g));
  });
}

Var Tape::spmm(SparseCSR s, Var h) {
  if (s.cols != value(h).rows()) throw std::invalid_argument("spmm: shape mismatch");
  DenseMatrix out = s.multiply(value(h));
  std::size_t ih = h.idx;
  auto sp = std::make_shared<SparseCSR>(std::move(s));
  return make_node(std::move(out), [ih, sp](Tape& t, std::size_t self) {
    t.nodes_[ih].grad.add_inplace(sp->multiply_transposed(t.nodes_[self].grad));
  });
}

Var Tape::add(Var a, Var b) {
  check_shape(a, b, "add");
  DenseMatrix out = regnn::add(value(a), value(b));
  std::size_t ia = a.idx, ib = b.idx;
  return make_node(std::move(out), [ia, ib](Tape& t, std::size_t self) {
    t.nodes_[ia].grad.add_inplace(t.nodes_[self].grad);
    t.nodes_[ib].grad.add_inplace(t.nodes_[self].grad);
  });
}

Var Tape::scale(Var a, double c) {
  DenseMatrix out = value(a);
  out.scale_inplace(c);
  std::size_t ia = a.idx;
  return make_node(std::move(out), [ia, c](Tape& t, std::size_t self) {
    t.nodes_[ia].grad.add_inplace(t.nodes_[self].grad, c);
  });
}

Var Tape::scale_by_scalar(Var h, Var s, double offset) {
  if (value(s).rows() != 1 || value(s).cols() != 1)
    throw std::invalid_argument("scale_by_scalar: s must be 1x1");
  double factor = offset + value(s)(0, 0);
  DenseMatrix out = value(h);
  out.scale_inplace(factor);
  std::size_t ih = h.idx, is = s.idx;
  return make_node(std::move(out), [ih, is, factor](Tape& t, std::size_t self) {
    const DenseMatrix& g = t.nodes_[self].grad;
    t.nodes_[ih].grad.add_inplace(g, factor);
    t.nodes_[is].grad(0, 0) += dot(g, t.nodes_[ih].value);
  });
}

Var Tape::add_row_vector(Var a, Var row) {
  const DenseMatrix& va = value(a);
  const DenseMatrix& vr = value(row);
  if (vr.rows() != 1 || vr.cols() != va.cols())
    throw std::invalid_argument("add_row_vector: row must be 1x" + std::to_string(va.cols()));
  DenseMatrix out = va;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += vr(0, j);
  std::size_t ia = a.idx, ir = row.idx;
  return make_node(std::move(out), [ia, ir](Tape& t, std::size_t self) {
    const DenseMatrix& g = t.nodes_[self].grad;
    t.nodes_[ia].grad.add_inplace(g);
    DenseMatrix& rg = t.nodes_[ir].grad;
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) rg(0, j) += g(i, j);
  });
}

// Subgradient at 0 is the positive-branch derivative (1) for both variants.
Var Tape::relu(Var x) { return leaky_relu(x, 0.0); }

Var Tape::leaky_relu(Var x, double slope) {
  if (slope < 0.0 || slope >= 1.0) throw std::invalid_argument("leaky_relu: slope outside [0,1)");
  DenseMatrix out = value(x);
  for (auto& v : out.data()) v = v >= 0.0 ? v : slope * v;
  std::size_t ix = x.idx;
  return make_node(std::move(out), [ix, slope](Tape& t, std::size_t self) {
    const DenseMatrix& g = t.nodes_[self].grad;
    const DenseMatrix& vx = t.nodes_[ix].value;
    DenseMatrix& xg = t.nodes_[ix].grad;
    for (std::size_t i = 0; i < g.data().size(); ++i)
      xg.data()[i] += g.data()[i] * (vx.data()[i] >= 0.0 ? 1.0 : slope);
  });
}

Var Tape::dropout(Var x, double rate, bool training, std::mt19937_64& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate outside [0,1)");
  if (!training || rate == 0.0) return x;
  const DenseMatrix& vx = value(x);
  double keep = 1.0 - rate;
  auto mask = std::make_shared<std::vector<char>>(vx.size());
  std::bernoulli_distribution coin(keep);
  DenseMatrix out = vx;
  for (std::size_t i = 0; i < out.size(); ++i) {
    (*mask)[i] = coin(rng) ? 1 : 0;
    out.data()[i] = (*mask)[i] ? out.data()[i] / keep : 0.0;
  }
  std::size_t ix = x.idx;
  return make_node(std::move(out), [ix, mask, keep](Tape& t, std::size_t self) {
    const DenseMatrix& g = t.nodes_[self].grad;
    DenseMatrix& xg = t.nodes_[ix].grad;
    for (std::size_t i = 0; i < g.data().size(); ++i)
      if ((*mask)[i]) xg.data()[i] += g.data()[i] / keep;
  });
}

Var Tape::row_slice(Var x, std::size_t begin, std::size_t end) {
  const DenseMatrix& vx = value(x);
  if (begin > end || end > vx.rows()) throw std::invalid_argument("row_slice: bad range");
  DenseMatrix out(end - begin, vx.cols());
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t j = 0; j < vx.cols(); ++j) out(i - begin, j) = vx(i, j);
  std::size_t ix = x.idx;
  return make_node(std::move(out), [ix, begin](Tape& t, std::size_t self) {
    const DenseMatrix& g = t.nodes_[self].grad;
    DenseMatrix& xg = t.nodes_[ix].grad;
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) xg(begin + i, j) += g(i, j);
  });
}

Var Tape::stack_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("stack_rows: no parts");
  std::size_t cols = value(parts[0]).cols(), rows = 0;
  for (Var p : parts) {
    if (value(p).cols() != cols) throw std::invalid_argument("stack_rows: column mismatch");
    rows += value(p).rows();
  }
  DenseMatrix out(rows, cols);
  std::size_t at = 0;
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // (node idx, start row)
  for (Var p : parts) {
    const DenseMatrix& vp = value(p);
    spans.emplace_back(p.idx, at);
    for (std::size_t i = 0; i < vp.rows(); ++i)
      for (std::size_t j = 0; j < cols; ++j) out(at + i, j) = vp(i, j);
    at += vp.rows();
  }
  return make_node(std::move(out), [spans](Tape& t, std::size_t self) {
    const DenseMatrix& g = t.nodes_[self].grad;
    for (const auto& [idx, start] : spans) {
      DenseMatrix& pg = t.nodes_[idx].grad;
      for (std::size_t i = 0; i < pg.rows(); ++i)
        for (std::size_t j = 0; j < pg.cols(); ++j) pg(i, j) += g(start + i, j);
    }
  });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
  std::size_t rows = value(parts[0]).rows(), cols = 0;
  for (Var p : parts) {
    if (value(p).rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
    cols += value(p).cols();
  }
  DenseMatrix out(rows, cols);
  std::size_t at = 0;
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (Var p : parts) {
    const DenseMatrix& vp = value(p);
    spans.emplace_back(p.idx, at);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < vp.cols(); ++j) out(i, at + j) = vp(i, j);
    at += vp.cols();
  }
  return make_node(std::move(out), [spans](Tape& t, std::size_t self) {
    const DenseMatrix& g = t.nodes_[self].grad;
    for (const auto& [idx, start] : spans) {
      DenseMatrix& pg = t.nodes_[idx].grad;
      for (std::size_t i = 0; i < pg.rows(); ++i)
        for (std::size_t j = 0; j < pg.cols(); ++j) pg(i, j) += g(i, start + j);
    }
  });
}

Var Tape::sum(Var x) {
  double s = 0.0;
  for (double v : value(x).data()) s += v;
  std::size_t ix = x.idx;
  return make_node(DenseMatrix(1, 1, {s}), [ix](Tape& t, std::size_t self) {
    double g = t.nodes_[self].grad(0, 0);
    for (auto& v : t.nodes_[ix].grad.data()) v += g;
  });
}

Var Tape::sum_squares(Var x) {
  double s = 0.0;
  for (double v : value(x).data()) s += v * v;
  std::size_t ix = x.idx;
  return make_node(DenseMatrix(1, 1, {s}), [ix](Tape& t, std::size_t self) {
    double g = t.nodes_[self].grad(0, 0);
    const DenseMatrix& vx = t.nodes_[ix].value;
    DenseMatrix& xg = t.nodes_[ix].grad;
    for (std::size_t i = 0; i < vx.data().size(); ++i) xg.data()[i] += 2.0 * vx.data()[i] * g;
  });
}

Var Tape::softmax_cross_entropy(Var logits, const std::vector<int>& labels,
                                const std::vector<int>& mask_rows) {
  const DenseMatrix& z = value(logits);
  if (mask_rows.empty()) throw std::invalid_argument("softmax_cross_entropy: empty mask");
  std::size_t classes = z.cols();
  auto probs = std::make_shared<DenseMatrix>(mask_rows.size(), classes);
  auto rows = std::make_shared<std::vector<int>>(mask_rows);
  auto labs = std::make_shared<std::vector<int>>();
  double loss = 0.0;
  for (std::size_t m = 0; m < mask_rows.size(); ++m) {
    int r = mask_rows[m];
    if (r < 0 || static_cast<std::size_t>(r) >= z.rows())
      throw std::out_of_range("softmax_cross_entropy: mask row " + std::to_string(r));
    int y = labels.at(r);
    if (y < 0 || static_cast<std::size_t>(y) >= classes)
      throw std::out_of_range("softmax_cross_entropy: label " + std::to_string(y) + " at row " +
                              std::to_string(r));
    labs->push_back(y);
    const double* zr = z.row_ptr(r);
    double mx = zr[0];
    for (std::size_t c = 1; c < classes; ++c) mx = std::max(mx, zr[c]);
    double denom = 0.0;
    for (std::size_t c = 0; c < classes; ++c) denom += std::exp(zr[c] - mx);
    for (std::size_t c = 0; c < classes; ++c) (*probs)(m, c) = std::exp(zr[c] - mx) / denom;
    loss += -(zr[y] - mx - std::log(denom));
  }
  loss /= static_cast<double>(mask_rows.size());
  std::size_t iz = logits.idx;
  return make_node(DenseMatrix(1, 1, {loss}), [iz, probs, rows, labs](Tape& t, std::size_t self) {
    double g = t.nodes_[self].grad(0, 0);
    DenseMatrix& zg = t.nodes_[iz].grad;
    double inv = g / static_cast<double>(rows->size());
    for (std::size_t m = 0; m < rows->size(); ++m) {
      int r = (*rows)[m];
      for (std::size_t c = 0; c < zg.cols(); ++c)
        zg(r, c) += inv * ((*probs)(m, c) - (c == static_cast<std::size_t>((*labs)[m]) ? 1.0 : 0.0));
    }
  });
}

void Tape::backward(Var loss) {
  const DenseMatrix& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) throw std::invalid_argument("backward: loss is not scalar");
  for (auto& n : nodes_) std::fill(n.grad.data().begin(), n.grad.data().end(), 0.0);
  nodes_[loss.idx].grad(0, 0) = 1.0;
  for (std::size_t i = loss.idx + 1; i-- > 0;) {
    if (nodes_[i].backward_fn) nodes_[i].backward_fn(*this, i);
  }
}

double finite_diff_check(const std::function<double()>& f, const std::vector<DenseMatrix*>& params,
                         const std::vector<const DenseMatrix*>& analytic_grads, double h) {
  if (params.size() != analytic_grads.size())
    throw std::invalid_argument("finite_diff_check: params/grads length mismatch");
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    DenseMatrix& theta = *params[p];
    const DenseMatrix& ag = *analytic_grads[p];
    if (!theta.same_shape(ag)) throw std::invalid_argument("finite_diff_check: grad shape mismatch");
    for (std::size_t i = 0; i < theta.data().size(); ++i) {
      double saved = theta.data()[i];
      theta.data()[i] = saved + h;
      double fp = f();
      theta.data()[i] = saved - h;
      double fm = f();
      theta.data()[i] = saved;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw std::runtime_error("finite_diff_check: non-finite evaluation");
      double numeric = (fp - fm) / (2.0 * h);
      double analytic = ag.data()[i];
      double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace regnn
