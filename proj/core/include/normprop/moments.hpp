#ifndef NORMPROP_MOMENTS_HPP_
#define NORMPROP_MOMENTS_HPP_

#include <vector>

#include <nlohmann/json.hpp>

#include "normprop/operator.hpp"

namespace normprop {

struct ComponentMoments {
  double mean = 0.0;
  double variance = 0.0;
};

struct MomentReport {
  double x0_sq = 0.0;
  /// E(|x^(l)|^2 | |x^(0)|^2) for l = 0..L.
  std::vector<double> expected_sq_norm;
  /// Jensen upper bound on E(x_i^(L)) and the stated last-layer variance.
  ComponentMoments final_component;
  NetworkSpec net;
};

/// E_l = (sigma_w^2 E_{l-1} + sigma_b^2) N_l / 2 from E_0 = x0_sq. ReLU layers only.
MomentReport expected_sq_norm(const NetworkSpec& net, double x0_sq);

/// Same quantity at the last layer from the expanded product-sum form.
double expected_sq_norm_closed_form(const NetworkSpec& net, double x0_sq);

/// Mean sigma_y / sqrt(2 pi) and variance (pi - 1) / (2 pi) sigma_y^2 of one ReLU
/// component given |x_prev|^2 = y.
ComponentMoments component_moments(const LayerSpec& layer, double y);

/// component_moments of the last layer evaluated at y = E_{L-1}; by Jensen the mean is an
/// upper bound for the unconditional component mean.
ComponentMoments final_component_bound(const NetworkSpec& net, double x0_sq);

/// sigma_w of layer 1 that keeps E_2 = E_0 for a two-layer sigma_b = 0 chain with widths
/// N1, N2 and second-layer weight std sigma_w2.
double compensating_sigma(int n1, int n2, double sigma_w2);

nlohmann::json to_json(const MomentReport& report);

}  // namespace normprop

#endif  // NORMPROP_MOMENTS_HPP_
