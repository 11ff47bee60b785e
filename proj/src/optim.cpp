#include "erg/optim.hpp"

#include <cmath>

namespace erg::ad {

AdamW::AdamW(std::vector<Tensor> params, AdamWConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  moments_.reserve(params_.size());
  for (const auto& p : params_) {
    Moments m;
    m.m.assign(p->size(), 0.0);
    m.v.assign(p->size(), 0.0);
    moments_.push_back(std::move(m));
  }
}

void AdamW::step(double rate) {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto& p = *params_[k];
    auto& mom = moments_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      p.values[i] -= rate * cfg_.weight_decay * p.values[i];
      const double g = p.grad[i];
      mom.m[i] = cfg_.beta1 * mom.m[i] + (1.0 - cfg_.beta1) * g;
      mom.v[i] = cfg_.beta2 * mom.v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = mom.m[i] / bc1;
      const double vhat = mom.v[i] / bc2;
      p.values[i] -= rate * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    p.zero_grad();
  }
}

}  // namespace erg::ad
