#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace erg::ad {

// Dense row-major 64-bit matrix with a same-shape gradient buffer.
struct TensorData {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<double> grad;
  bool requires_grad = false;

  std::size_t size() const { return rows * cols; }
  bool is_scalar() const { return rows == 1 && cols == 1; }
  double scalar_value() const { return values[0]; }

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& grad_at(std::size_t r, std::size_t c) { return grad[r * cols + c]; }
  double grad_at(std::size_t r, std::size_t c) const { return grad[r * cols + c]; }

  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
  std::string shape_str() const;
};

using Tensor = std::shared_ptr<TensorData>;

Tensor tensor(std::size_t rows, std::size_t cols, bool requires_grad = false);
Tensor tensor(std::size_t rows, std::size_t cols, std::vector<double> values,
              bool requires_grad = false);
Tensor scalar(double value, bool requires_grad = false);
Tensor row_vector(std::vector<double> values, bool requires_grad = false);

void zero_grads(const std::vector<Tensor>& params);

// Define-by-run record of executed primitives. Results are appended in
// execution order, so a single reverse sweep visits each record once with
// all downstream gradients already accumulated. backward() clears the tape;
// a new forward pass rebuilds it.
class Tape {
 public:
  // primitives
  Tensor matmul(const Tensor& a, const Tensor& b);
  // elementwise when shapes match; also accepts a 1 x C right operand
  // broadcast over the rows of an R x C left operand
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor concat_rows(const std::vector<Tensor>& parts);
  Tensor concat_cols(const std::vector<Tensor>& parts);
  Tensor row_softmax(const Tensor& x);
  Tensor leaky_relu(const Tensor& x, double slope = 0.2);
  Tensor tanh(const Tensor& x);
  Tensor sigmoid(const Tensor& x);
  Tensor elementwise_mul(const Tensor& a, const Tensor& b);
  Tensor scalar_mul(const Tensor& x, double c);
  Tensor sum(const Tensor& x);
  Tensor mean(const Tensor& x);
  // -sum_ij target_ij * ln(max(predicted_ij, kLogFloor)); scalar result
  Tensor cross_entropy_rows(const Tensor& target, const Tensor& predicted);

  // compositions of the primitives above
  Tensor select_row(const Tensor& m, std::size_t r);
  Tensor select_col(const Tensor& m, std::size_t c);
  Tensor dot(const Tensor& a, const Tensor& b);  // 1xN rows -> 1x1
  Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b);

  // Accumulates d(loss)/d(t) into every tensor reached from loss, then
  // clears the tape. loss must be scalar and the tape non-empty.
  void backward(const Tensor& loss);

  std::size_t size() const { return records_.size(); }
  void clear() { records_.clear(); }

  // soft targets can meet zero predictions early in training
  static constexpr double kLogFloor = 1e-12;

 private:
  struct Record {
    Tensor result;
    std::function<void()> backprop;
  };

  std::vector<Record> records_;
};

}  // namespace erg::ad
