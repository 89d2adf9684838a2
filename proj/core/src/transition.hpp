#ifndef NORMPROP_SRC_TRANSITION_HPP_
#define NORMPROP_SRC_TRANSITION_HPP_

#include <Eigen/Dense>

#include "normprop/kernels.hpp"

namespace normprop::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// The kernel's density block, rows() x grid.size(), viewed in place.
inline Eigen::Map<const RowMatrix> density_matrix(const ConditionalKernel& kernel) {
  return {kernel.density(0).data(), static_cast<Eigen::Index>(kernel.rows()),
          static_cast<Eigen::Index>(kernel.grid().size())};
}

/// Mass-vector step p' = P^T p over the states {atom, cell 0, ..., cell n-1}, where
/// P(i, j) is the mass kernel row i sends to state j. Mass that leaves the grid is dropped.
inline void push_forward(const ConditionalKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& in,
                         Eigen::Ref<Eigen::VectorXd> out) {
  const auto n = static_cast<Eigen::Index>(kernel.grid().size());
  double atom = 0.0;
  for (Eigen::Index r = 0; r <= n; ++r) atom += kernel.atom(static_cast<std::size_t>(r)) * in(r);
  out.tail(n).noalias() = kernel.grid().delta() * (density_matrix(kernel).transpose() * in);
  out(0) = atom;
}

}  // namespace normprop::detail

#endif  // NORMPROP_SRC_TRANSITION_HPP_
