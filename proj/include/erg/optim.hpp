#pragma once

#include <cstdint>
#include <vector>

#include "erg/tensor.hpp"

namespace erg::ad {

// rate(t) = lr0 * max(0, 1 - t/T); rate(0) = lr0, rate(T) = 0.
struct LinearSchedule {
  double lr0 = 1e-3;
  std::int64_t total_steps = 0;

  double rate(std::int64_t t) const {
    if (total_steps <= 0) {
      return lr0;
    }
    const double f = 1.0 - static_cast<double>(t) / static_cast<double>(total_steps);
    return lr0 * (f > 0.0 ? f : 0.0);
  }
};

struct AdamWConfig {
  double lr0 = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
};

// Decoupled weight decay is applied to the parameter before the adaptive
// update; gradients are zeroed after each step.
class AdamW {
 public:
  AdamW(std::vector<Tensor> params, AdamWConfig cfg);

  void step(double rate);
  std::int64_t steps_taken() const { return step_count_; }
  const AdamWConfig& config() const { return cfg_; }

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };

  std::vector<Tensor> params_;
  std::vector<Moments> moments_;
  AdamWConfig cfg_;
  std::int64_t step_count_ = 0;
};

}  // namespace erg::ad
