#include "normprop/moments.hpp"

#include <cmath>
#include <numbers>

#include "normprop/errors.hpp"

namespace normprop {

namespace {

void require_relu(const NetworkSpec& net) {
  net.validate();
  for (const auto& layer : net.layers) {
    if (!layer.activation.is_relu()) throw DomainError("moment formulas are derived for ReLU layers");
  }
}

double gain(const LayerSpec& layer) { return 0.5 * layer.width * layer.sigma_w * layer.sigma_w; }

}  // namespace

MomentReport expected_sq_norm(const NetworkSpec& net, double x0_sq) {
  require_relu(net);
  if (!(x0_sq >= 0.0)) throw DomainError("input squared norm must be nonnegative");
  MomentReport report;
  report.x0_sq = x0_sq;
  report.net = net;
  report.expected_sq_norm.push_back(x0_sq);
  for (const auto& layer : net.layers) {
    const double previous = report.expected_sq_norm.back();
    report.expected_sq_norm.push_back(gain(layer) * previous + 0.5 * layer.width * layer.sigma_b * layer.sigma_b);
  }
  report.final_component = final_component_bound(net, x0_sq);
  return report;
}

double expected_sq_norm_closed_form(const NetworkSpec& net, double x0_sq) {
  require_relu(net);
  const auto& layers = net.layers;
  double product = x0_sq;
  for (const auto& layer : layers) product *= gain(layer);
  double bias_terms = 0.0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    double term = 0.5 * layers[l].width * layers[l].sigma_b * layers[l].sigma_b;
    for (std::size_t j = l + 1; j < layers.size(); ++j) term *= gain(layers[j]);
    bias_terms += term;
  }
  return product + bias_terms;
}

ComponentMoments component_moments(const LayerSpec& layer, double y) {
  if (!layer.activation.is_relu()) throw DomainError("component moments are derived for ReLU");
  const double sigma = pre_activation_std(layer, y);
  return {sigma / std::sqrt(2.0 * std::numbers::pi),
          (std::numbers::pi - 1.0) / (2.0 * std::numbers::pi) * sigma * sigma};
}

ComponentMoments final_component_bound(const NetworkSpec& net, double x0_sq) {
  require_relu(net);
  NetworkSpec head = net;
  head.layers.pop_back();
  const double previous = head.layers.empty() ? x0_sq : expected_sq_norm_closed_form(head, x0_sq);
  return component_moments(net.layers.back(), previous);
}

double compensating_sigma(int n1, int n2, double sigma_w2) {
  if (n1 < 1 || n2 < 1 || !(sigma_w2 > 0.0)) throw DomainError("widths and sigma_w2 must be positive");
  return 2.0 / (sigma_w2 * std::sqrt(static_cast<double>(n1) * static_cast<double>(n2)));
}

nlohmann::json to_json(const MomentReport& report) {
  auto layers = nlohmann::json::array();
  for (const auto& layer : report.net.layers) {
    layers.push_back({{"width", layer.width}, {"sigma_w", layer.sigma_w}, {"sigma_b", layer.sigma_b}});
  }
  return {{"x0_sq", report.x0_sq},
          {"input_width", report.net.input_width},
          {"layers", layers},
          {"expected_sq_norm", report.expected_sq_norm},
          {"final_component_mean_bound", report.final_component.mean},
          {"final_component_variance", report.final_component.variance}};
}

}  // namespace normprop
