#include "erg/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace erg::ad {

namespace {

[[noreturn]] void shape_error(const std::string& op, const TensorData& a,
                              const TensorData& b) {
  throw std::invalid_argument(op + ": incompatible shapes " + a.shape_str() +
                              " and " + b.shape_str());
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::string TensorData::shape_str() const {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

Tensor tensor(std::size_t rows, std::size_t cols, bool requires_grad) {
  auto t = std::make_shared<TensorData>();
  t->rows = rows;
  t->cols = cols;
  t->values.assign(rows * cols, 0.0);
  t->grad.assign(rows * cols, 0.0);
  t->requires_grad = requires_grad;
  return t;
}

Tensor tensor(std::size_t rows, std::size_t cols, std::vector<double> values,
              bool requires_grad) {
  if (values.size() != rows * cols) {
    throw std::invalid_argument("tensor: " + std::to_string(values.size()) +
                                " values for shape " + std::to_string(rows) +
                                "x" + std::to_string(cols));
  }
  auto t = std::make_shared<TensorData>();
  t->rows = rows;
  t->cols = cols;
  t->values = std::move(values);
  t->grad.assign(rows * cols, 0.0);
  t->requires_grad = requires_grad;
  return t;
}

Tensor scalar(double value, bool requires_grad) {
  return tensor(1, 1, {value}, requires_grad);
}

Tensor row_vector(std::vector<double> values, bool requires_grad) {
  const std::size_t n = values.size();
  return tensor(1, n, std::move(values), requires_grad);
}

void zero_grads(const std::vector<Tensor>& params) {
  for (const auto& p : params) {
    p->zero_grad();
  }
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  if (a->cols != b->rows) {
    shape_error("matmul", *a, *b);
  }
  const std::size_t n = a->rows, k = a->cols, m = b->cols;
  Tensor out = tensor(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a->at(i, p);
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        out->at(i, j) += av * b->at(p, j);
      }
    }
  }
  records_.push_back(Record{out, [a, b, out, n, k, m] {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          acc += out->grad_at(i, j) * b->at(p, j);
        }
        a->grad_at(i, p) += acc;
      }
    }
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t j = 0; j < m; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += a->at(i, p) * out->grad_at(i, j);
        }
        b->grad_at(p, j) += acc;
      }
    }
  }});
  return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  const bool same = a->rows == b->rows && a->cols == b->cols;
  const bool row_broadcast = b->rows == 1 && a->cols == b->cols;
  if (!same && !row_broadcast) {
    shape_error("add", *a, *b);
  }
  Tensor out = tensor(a->rows, a->cols);
  for (std::size_t i = 0; i < a->rows; ++i) {
    for (std::size_t j = 0; j < a->cols; ++j) {
      out->at(i, j) = a->at(i, j) + (same ? b->at(i, j) : b->at(0, j));
    }
  }
  records_.push_back(Record{out, [a, b, out, same] {
    for (std::size_t i = 0; i < a->rows; ++i) {
      for (std::size_t j = 0; j < a->cols; ++j) {
        const double g = out->grad_at(i, j);
        a->grad_at(i, j) += g;
        if (same) {
          b->grad_at(i, j) += g;
        } else {
          b->grad_at(0, j) += g;
        }
      }
    }
  }});
  return out;
}

Tensor Tape::concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) {
    throw std::invalid_argument("concat_rows: no operands");
  }
  const std::size_t cols = parts.front()->cols;
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p->cols != cols) {
      shape_error("concat_rows", *parts.front(), *p);
    }
    rows += p->rows;
  }
  Tensor out = tensor(rows, cols);
  std::size_t r0 = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p->rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        out->at(r0 + i, j) = p->at(i, j);
      }
    }
    r0 += p->rows;
  }
  auto held = parts;
  records_.push_back(Record{out, [held, out, cols] {
    std::size_t r0 = 0;
    for (const auto& p : held) {
      for (std::size_t i = 0; i < p->rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
          p->grad_at(i, j) += out->grad_at(r0 + i, j);
        }
      }
      r0 += p->rows;
    }
  }});
  return out;
}

Tensor Tape::concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) {
    throw std::invalid_argument("concat_cols: no operands");
  }
  const std::size_t rows = parts.front()->rows;
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p->rows != rows) {
      shape_error("concat_cols", *parts.front(), *p);
    }
    cols += p->cols;
  }
  Tensor out = tensor(rows, cols);
  std::size_t c0 = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < p->cols; ++j) {
        out->at(i, c0 + j) = p->at(i, j);
      }
    }
    c0 += p->cols;
  }
  auto held = parts;
  records_.push_back(Record{out, [held, out, rows] {
    std::size_t c0 = 0;
    for (const auto& p : held) {
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < p->cols; ++j) {
          p->grad_at(i, j) += out->grad_at(i, c0 + j);
        }
      }
      c0 += p->cols;
    }
  }});
  return out;
}

Tensor Tape::row_softmax(const Tensor& x) {
  Tensor out = tensor(x->rows, x->cols);
  for (std::size_t i = 0; i < x->rows; ++i) {
    double mx = x->at(i, 0);
    for (std::size_t j = 1; j < x->cols; ++j) {
      mx = std::max(mx, x->at(i, j));
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < x->cols; ++j) {
      const double e = std::exp(x->at(i, j) - mx);
      out->at(i, j) = e;
      denom += e;
    }
    for (std::size_t j = 0; j < x->cols; ++j) {
      out->at(i, j) /= denom;
    }
  }
  records_.push_back(Record{out, [x, out] {
    for (std::size_t i = 0; i < x->rows; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < x->cols; ++j) {
        dot += out->grad_at(i, j) * out->at(i, j);
      }
      for (std::size_t j = 0; j < x->cols; ++j) {
        x->grad_at(i, j) += out->at(i, j) * (out->grad_at(i, j) - dot);
      }
    }
  }});
  return out;
}

Tensor Tape::leaky_relu(const Tensor& x, double slope) {
  Tensor out = tensor(x->rows, x->cols);
  for (std::size_t i = 0; i < x->size(); ++i) {
    const double v = x->values[i];
    out->values[i] = v > 0.0 ? v : slope * v;
  }
  records_.push_back(Record{out, [x, out, slope] {
    for (std::size_t i = 0; i < x->size(); ++i) {
      x->grad[i] += out->grad[i] * (x->values[i] > 0.0 ? 1.0 : slope);
    }
  }});
  return out;
}

Tensor Tape::tanh(const Tensor& x) {
  Tensor out = tensor(x->rows, x->cols);
  for (std::size_t i = 0; i < x->size(); ++i) {
    out->values[i] = std::tanh(x->values[i]);
  }
  records_.push_back(Record{out, [x, out] {
    for (std::size_t i = 0; i < x->size(); ++i) {
      const double y = out->values[i];
      x->grad[i] += out->grad[i] * (1.0 - y * y);
    }
  }});
  return out;
}

Tensor Tape::sigmoid(const Tensor& x) {
  Tensor out = tensor(x->rows, x->cols);
  for (std::size_t i = 0; i < x->size(); ++i) {
    out->values[i] = stable_sigmoid(x->values[i]);
  }
  records_.push_back(Record{out, [x, out] {
    for (std::size_t i = 0; i < x->size(); ++i) {
      const double y = out->values[i];
      x->grad[i] += out->grad[i] * y * (1.0 - y);
    }
  }});
  return out;
}

Tensor Tape::elementwise_mul(const Tensor& a, const Tensor& b) {
  if (a->rows != b->rows || a->cols != b->cols) {
    shape_error("elementwise_mul", *a, *b);
  }
  Tensor out = tensor(a->rows, a->cols);
  for (std::size_t i = 0; i < a->size(); ++i) {
    out->values[i] = a->values[i] * b->values[i];
  }
  records_.push_back(Record{out, [a, b, out] {
    for (std::size_t i = 0; i < a->size(); ++i) {
      a->grad[i] += out->grad[i] * b->values[i];
      b->grad[i] += out->grad[i] * a->values[i];
    }
  }});
  return out;
}

Tensor Tape::scalar_mul(const Tensor& x, double c) {
  Tensor out = tensor(x->rows, x->cols);
  for (std::size_t i = 0; i < x->size(); ++i) {
    out->values[i] = c * x->values[i];
  }
  records_.push_back(Record{out, [x, out, c] {
    for (std::size_t i = 0; i < x->size(); ++i) {
      x->grad[i] += c * out->grad[i];
    }
  }});
  return out;
}

Tensor Tape::sum(const Tensor& x) {
  double total = 0.0;
  for (const double v : x->values) {
    total += v;
  }
  Tensor out = tensor(1, 1, {total});
  records_.push_back(Record{out, [x, out] {
    const double g = out->grad[0];
    for (std::size_t i = 0; i < x->size(); ++i) {
      x->grad[i] += g;
    }
  }});
  return out;
}

Tensor Tape::mean(const Tensor& x) {
  if (x->size() == 0) {
    throw std::invalid_argument("mean: empty tensor");
  }
  double total = 0.0;
  for (const double v : x->values) {
    total += v;
  }
  const double inv = 1.0 / static_cast<double>(x->size());
  Tensor out = tensor(1, 1, {total * inv});
  records_.push_back(Record{out, [x, out, inv] {
    const double g = out->grad[0] * inv;
    for (std::size_t i = 0; i < x->size(); ++i) {
      x->grad[i] += g;
    }
  }});
  return out;
}

Tensor Tape::cross_entropy_rows(const Tensor& target, const Tensor& predicted) {
  if (target->rows != predicted->rows || target->cols != predicted->cols) {
    shape_error("cross_entropy_rows", *target, *predicted);
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < target->size(); ++i) {
    loss -= target->values[i] * std::log(std::max(predicted->values[i], kLogFloor));
  }
  Tensor out = tensor(1, 1, {loss});
  records_.push_back(Record{out, [target, predicted, out] {
    const double g = out->grad[0];
    for (std::size_t i = 0; i < target->size(); ++i) {
      const double p = predicted->values[i];
      target->grad[i] += g * (-std::log(std::max(p, kLogFloor)));
      if (p > kLogFloor) {
        predicted->grad[i] += g * (-target->values[i] / p);
      }
    }
  }});
  return out;
}

Tensor Tape::select_row(const Tensor& m, std::size_t r) {
  if (r >= m->rows) {
    throw std::invalid_argument("select_row: row " + std::to_string(r) +
                                " out of range for " + m->shape_str());
  }
  Tensor picker = tensor(1, m->rows);
  picker->at(0, r) = 1.0;
  return matmul(picker, m);
}

Tensor Tape::select_col(const Tensor& m, std::size_t c) {
  if (c >= m->cols) {
    throw std::invalid_argument("select_col: col " + std::to_string(c) +
                                " out of range for " + m->shape_str());
  }
  Tensor picker = tensor(m->cols, 1);
  picker->at(c, 0) = 1.0;
  return matmul(m, picker);
}

Tensor Tape::dot(const Tensor& a, const Tensor& b) {
  return sum(elementwise_mul(a, b));
}

Tensor Tape::affine(const Tensor& x, const Tensor& w, const Tensor& b) {
  return add(matmul(x, w), b);
}

void Tape::backward(const Tensor& loss) {
  if (!loss->is_scalar()) {
    throw std::invalid_argument("backward: loss must be scalar, got " +
                                loss->shape_str());
  }
  if (records_.empty()) {
    throw std::invalid_argument("backward: empty tape");
  }
  loss->grad[0] += 1.0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    it->backprop();
  }
  records_.clear();
}

}  // namespace erg::ad
