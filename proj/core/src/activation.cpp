#include "normprop/activation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "normprop/errors.hpp"
#include "normprop/special.hpp"

namespace normprop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double Activation::zero_mass_probability(double sigma) const {
  if (sigma < 0.0) throw DomainError("negative pre-activation std");
  if (sigma == 0.0) return forward(0.0) == 0.0 ? 1.0 : 0.0;
  if (!invertible()) {
    throw StateError("activation '" + name + "' has no generalized inverse");
  }
  const auto& lower = lower_inverse ? lower_inverse : generalized_inverse;
  return special::std_normal_cdf(generalized_inverse(0.0) / sigma) -
         special::std_normal_cdf(lower(0.0) / sigma);
}

Activation Activation::relu() {
  Activation a;
  a.kind = ActivationKind::relu;
  a.name = "relu";
  a.forward = [](double x) { return x > 0.0 ? x : 0.0; };
  a.generalized_inverse = [](double u) { return u >= 0.0 ? u : -kInf; };
  a.lower_inverse = [](double u) { return u > 0.0 ? u : -kInf; };
  return a;
}

Activation Activation::identity() {
  Activation a;
  a.kind = ActivationKind::identity;
  a.name = "identity";
  a.forward = [](double x) { return x; };
  a.generalized_inverse = [](double u) { return u; };
  a.lower_inverse = a.generalized_inverse;
  return a;
}

Activation Activation::leaky_relu(double negative_slope) {
  if (!(negative_slope > 0.0)) {
    throw DomainError("leaky_relu slope must be positive (use relu for 0)");
  }
  Activation a;
  a.kind = ActivationKind::leaky_relu;
  a.name = "leaky_relu:" + std::to_string(negative_slope);
  a.forward = [negative_slope](double x) { return x > 0.0 ? x : negative_slope * x; };
  a.generalized_inverse = [negative_slope](double u) { return u >= 0.0 ? u : u / negative_slope; };
  a.lower_inverse = a.generalized_inverse;
  return a;
}

Activation Activation::tanh() {
  Activation a;
  a.kind = ActivationKind::tanh;
  a.name = "tanh";
  a.forward = [](double x) { return std::tanh(x); };
  a.generalized_inverse = [](double u) {
    if (u >= 1.0) return kInf;
    if (u <= -1.0) return -kInf;
    return std::atanh(u);
  };
  a.lower_inverse = a.generalized_inverse;
  return a;
}

Activation Activation::hard_tanh() {
  Activation a;
  a.kind = ActivationKind::hard_tanh;
  a.name = "hard_tanh";
  a.forward = [](double x) { return std::clamp(x, -1.0, 1.0); };
  a.generalized_inverse = [](double u) {
    if (u >= 1.0) return kInf;
    if (u < -1.0) return -kInf;
    return u;
  };
  a.lower_inverse = [](double u) {
    if (u <= -1.0) return -kInf;
    if (u > 1.0) return kInf;
    return u;
  };
  return a;
}

Activation Activation::custom(std::string name, std::function<double(double)> forward) {
  Activation a;
  a.kind = ActivationKind::custom;
  a.name = std::move(name);
  a.forward = std::move(forward);
  return a;
}

Activation Activation::from_name(const std::string& name) {
  if (name == "relu") return relu();
  if (name == "identity" || name == "linear") return identity();
  if (name == "tanh") return tanh();
  if (name == "hard_tanh") return hard_tanh();
  if (name == "leaky_relu") return leaky_relu(0.01);
  if (name.rfind("leaky_relu:", 0) == 0) {
    try {
      return leaky_relu(std::stod(name.substr(11)));
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad leaky_relu slope in '" + name + "'");
    }
  }
  throw ConfigError("unknown activation '" + name + "'");
}

}  // namespace normprop
