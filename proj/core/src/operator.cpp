#include "normprop/operator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "normprop/errors.hpp"
#include "normprop/special.hpp"
#include "transition.hpp"

namespace normprop {

void NetworkSpec::validate() const {
  if (input_width < 1) throw ConfigError("input width must be >= 1");
  if (layers.empty()) throw ConfigError("network needs at least one layer");
  for (const auto& layer : layers) layer.validate();
}

NetworkSpec NetworkSpec::uniform(int input_width, const LayerSpec& layer, std::size_t depth) {
  NetworkSpec net;
  net.input_width = input_width;
  net.layers.assign(depth, layer);
  return net;
}

LayerSummary summarize(const MixedDensity& d) {
  return {mean(d), variance(d), d.atom0(), d.leaked()};
}

MixedDensity apply(const ConditionalKernel& kernel, const MixedDensity& p) {
  if (!(kernel.grid() == p.grid())) throw DomainError("kernel and density live on different grids");
  const auto n = static_cast<Eigen::Index>(p.grid().size());
  Eigen::VectorXd weights(n + 1);
  weights(0) = p.atom0();
  weights.tail(n) = Eigen::Map<const Eigen::VectorXd>(p.density().data(), n) * p.grid().delta();

  const Eigen::VectorXd density = detail::density_matrix(kernel).transpose() * weights;
  double atom = 0.0;
  double leaked = p.leaked();
  for (Eigen::Index r = 0; r <= n; ++r) {
    atom += kernel.atom(static_cast<std::size_t>(r)) * weights(r);
    leaked += kernel.leaked(static_cast<std::size_t>(r)) * weights(r);
  }
  return MixedDensity(p.grid(), atom, std::vector<double>(density.begin(), density.end()), leaked);
}

std::shared_ptr<const ConditionalKernel> KernelCache::get(const LayerSpec& layer, const Grid& grid) {
  std::ostringstream key;
  key.precision(17);
  key << layer.signature() << "|n=" << grid.size() << "|zmax=" << grid.z_max();
  std::lock_guard lock(mutex_);
  auto& slot = kernels_[key.str()];
  if (!slot) slot = std::make_shared<const ConditionalKernel>(kernel_matrix(layer, grid, options_, workers_));
  return slot;
}

std::size_t KernelCache::size() const {
  std::lock_guard lock(mutex_);
  return kernels_.size();
}

PropagationTrace propagate(const NetworkSpec& net, const MixedDensity& p0, KernelCache& cache) {
  net.validate();
  PropagationTrace trace;
  trace.densities.reserve(net.depth() + 1);
  trace.densities.push_back(p0);
  for (const auto& layer : net.layers) {
    const auto kernel = cache.get(layer, p0.grid());
    trace.densities.push_back(apply(*kernel, trace.densities.back()));
  }
  for (const auto& d : trace.densities) trace.summaries.push_back(summarize(d));
  return trace;
}

PropagationTrace propagate(const NetworkSpec& net, const MixedDensity& p0) {
  KernelCache cache;
  return propagate(net, p0, cache);
}

double component_cdf(const MixedDensity& p_prev, const LayerSpec& layer, double x) {
  layer.validate();
  const auto& phi = layer.activation;
  if (!phi.invertible()) throw DomainError("component cdf needs an invertible activation");
  const double inverse = phi.generalized_inverse(x);
  const auto conditional = [&](double y) {
    const double sigma = pre_activation_std(layer, y);
    if (sigma == 0.0) return phi.forward(0.0) <= x ? 1.0 : 0.0;
    return special::std_normal_cdf(inverse / sigma);
  };
  const Grid& grid = p_prev.grid();
  double acc = p_prev.atom0() * conditional(0.0);
  const auto density = p_prev.density();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (density[i] > 0.0) acc += density[i] * grid.delta() * conditional(grid.center(i));
  }
  acc += p_prev.leaked() * conditional(grid.z_max());
  return std::clamp(acc, 0.0, 1.0);
}

void write_trace_csv(const std::filesystem::path& directory, const PropagationTrace& trace) {
  std::filesystem::create_directories(directory);
  for (std::size_t l = 0; l < trace.densities.size(); ++l) {
    const auto path = directory / ("layer_" + std::to_string(l) + ".csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv(out, trace.densities[l]);
  }
}

nlohmann::json trace_summary_json(const PropagationTrace& trace) {
  auto layers = nlohmann::json::array();
  for (std::size_t l = 0; l < trace.summaries.size(); ++l) {
    const auto& s = trace.summaries[l];
    layers.push_back({{"layer", l}, {"mean", s.mean}, {"variance", s.variance}, {"atom0", s.atom0},
                      {"leaked", s.leaked}});
  }
  return {{"layers", layers}};
}

}  // namespace normprop
