#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "posegait/error.hpp"
#include "posegait/model/units.hpp"

namespace posegait::engine {

enum class OptimizerKind { adam, adamw };

OptimizerKind optimizer_kind_from_string(const std::string& s);
std::string to_string(OptimizerKind k);

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // adamw: decoupled decay; adam: ignored unless > 0,
                              // then classic L2 added to the gradient
};

/// Adam / AdamW over a fixed parameter list. Moment buffers are keyed by
/// parameter order, which the model keeps stable; step count t drives the
/// bias correction.
template <class T>
class Optimizer {
 public:
  Optimizer(OptimizerSpec spec, const std::vector<model::ParamRef<T>>& params)
      : spec_(spec) {
    for (const auto& p : params) {
      m_.emplace_back(p.value->size(), T(0));
      v_.emplace_back(p.value->size(), T(0));
    }
  }

  std::int64_t step_count() const { return t_; }

  void step(std::vector<model::ParamRef<T>>& params, double lr) {
    if (params.size() != m_.size())
      throw Error(errc::shape, "optimizer was built for a different parameter list");
    ++t_;
    const double b1 = spec_.beta1, b2 = spec_.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
      auto& value = *params[pi].value;
      auto& grad = *params[pi].grad;
      auto& m = m_[pi];
      auto& v = v_[pi];
      for (std::size_t i = 0; i < value.size(); ++i) {
        double g = static_cast<double>(grad[i]);
        if (spec_.kind == OptimizerKind::adam && spec_.weight_decay > 0.0)
          g += spec_.weight_decay * static_cast<double>(value[i]);
        const double mi = b1 * static_cast<double>(m[i]) + (1.0 - b1) * g;
        const double vi = b2 * static_cast<double>(v[i]) + (1.0 - b2) * g * g;
        m[i] = static_cast<T>(mi);
        v[i] = static_cast<T>(vi);
        const double mhat = mi / bc1;
        const double vhat = vi / bc2;
        double update = lr * mhat / (std::sqrt(vhat) + spec_.eps);
        if (spec_.kind == OptimizerKind::adamw && spec_.weight_decay > 0.0)
          update += lr * spec_.weight_decay * static_cast<double>(value[i]);
        value[i] = static_cast<T>(static_cast<double>(value[i]) - update);
      }
    }
  }

  const std::vector<std::vector<T>>& first_moments() const { return m_; }
  const std::vector<std::vector<T>>& second_moments() const { return v_; }
  std::vector<std::vector<T>>& first_moments() { return m_; }
  std::vector<std::vector<T>>& second_moments() { return v_; }
  void set_step_count(std::int64_t t) { t_ = t; }
  const OptimizerSpec& spec() const { return spec_; }

 private:
  OptimizerSpec spec_;
  std::int64_t t_ = 0;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
};

}  // namespace posegait::engine
