#pragma once

// Exact forward propagation of the lattice chain: joint (i, j) mass at the
// terminal step under published kernels. Single-threaded with a fixed
// accumulation order so results are reproducible bit-for-bit.

#include <vector>

#include "srlattice/model.hpp"

namespace srl {

/// Joint mass over (i, j) at k = n; layout (i+n)*(2n+1) + (j+n).
std::vector<double> forward_joint_distribution(const LatticeSpec& spec,
                                               const HestonParams& p,
                                               const TruncationBounds& b,
                                               MeasureTag measure,
                                               const DriftFunctional& upsilon,
                                               ProjectionScheme scheme);

/// Marginal over the Phi index i from a joint terminal mass.
std::vector<double> marginal_phi(const std::vector<double>& joint, int n);

} // namespace srl
