#ifndef NORMPROP_ACTIVATION_HPP_
#define NORMPROP_ACTIVATION_HPP_

#include <functional>
#include <string>

namespace normprop {

enum class ActivationKind { relu, identity, leaky_relu, tanh, hard_tanh, custom };

/// A nondecreasing activation phi together with its generalized inverses.
///
/// `generalized_inverse(u)` is sup{x : phi(x) <= u}, so P(phi(h) <= u) = Phi(inv(u) / sigma)
/// for h ~ N(0, sigma^2). `lower_inverse(u)` is inf{x : phi(x) >= u}, giving the strict
/// version P(phi(h) < u). Both may be empty for black-box activations, in which case the
/// generic kernel falls back to sampling.
struct Activation {
  ActivationKind kind = ActivationKind::custom;
  std::string name;
  std::function<double(double)> forward;
  std::function<double(double)> generalized_inverse;
  std::function<double(double)> lower_inverse;

  bool invertible() const noexcept { return static_cast<bool>(generalized_inverse); }
  bool is_relu() const noexcept { return kind == ActivationKind::relu; }

  /// P(phi(h) = 0) for h ~ N(0, sigma^2). Requires invertible() unless sigma == 0.
  double zero_mass_probability(double sigma) const;

  static Activation relu();
  static Activation identity();
  static Activation leaky_relu(double negative_slope);
  static Activation tanh();
  static Activation hard_tanh();
  /// Black-box activation; only `forward` is known.
  static Activation custom(std::string name, std::function<double(double)> forward);

  /// "relu", "identity", "tanh", "hard_tanh", "leaky_relu" or "leaky_relu:<slope>".
  static Activation from_name(const std::string& name);
};

}  // namespace normprop

#endif  // NORMPROP_ACTIVATION_HPP_
