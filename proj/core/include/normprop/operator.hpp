#ifndef NORMPROP_OPERATOR_HPP_
#define NORMPROP_OPERATOR_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "normprop/distributions.hpp"
#include "normprop/kernels.hpp"

namespace normprop {

/// Input width N_0 followed by the layers l = 1..L.
struct NetworkSpec {
  int input_width = 1;
  std::vector<LayerSpec> layers;

  void validate() const;
  std::size_t depth() const noexcept { return layers.size(); }

  /// L copies of the same layer.
  static NetworkSpec uniform(int input_width, const LayerSpec& layer, std::size_t depth);
};

struct LayerSummary {
  double mean = 0.0;
  double variance = 0.0;
  double atom0 = 0.0;
  double leaked = 0.0;
};

LayerSummary summarize(const MixedDensity& d);

/// p_0 .. p_L with p_l = T_l(p_{l-1}).
struct PropagationTrace {
  std::vector<MixedDensity> densities;
  std::vector<LayerSummary> summaries;
};

/// T(p) = atom0(p) row(0) + delta sum_i density_i(p) row(z_i). Leaked input mass stays leaked.
MixedDensity apply(const ConditionalKernel& kernel, const MixedDensity& p);

/// Kernels keyed by (layer signature, grid); layers with equal parameters share one matrix.
class KernelCache {
 public:
  explicit KernelCache(GenericKernelOptions options = {}, unsigned workers = 1)
      : options_(options), workers_(workers) {}

  std::shared_ptr<const ConditionalKernel> get(const LayerSpec& layer, const Grid& grid);
  std::size_t size() const;

 private:
  GenericKernelOptions options_;
  unsigned workers_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const ConditionalKernel>> kernels_;
};

PropagationTrace propagate(const NetworkSpec& net, const MixedDensity& p0, KernelCache& cache);
PropagationTrace propagate(const NetworkSpec& net, const MixedDensity& p0);

/// P(x_i <= x) for one component of layer `layer` given the previous squared-norm law.
/// Cells are integrated by the midpoint rule; leaked mass is evaluated at y = z_max,
/// the smallest value it can have.
double component_cdf(const MixedDensity& p_prev, const LayerSpec& layer, double x);

/// One `layer_<l>.csv` per density in distributions format.
void write_trace_csv(const std::filesystem::path& directory, const PropagationTrace& trace);
nlohmann::json trace_summary_json(const PropagationTrace& trace);

}  // namespace normprop

#endif  // NORMPROP_OPERATOR_HPP_
