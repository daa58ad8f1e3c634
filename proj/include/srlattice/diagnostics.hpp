#pragma once

// Machine-checkable probes of the lattice construction: moment matching,
// martingale identities, the density-moment boundedness probe, jump-size
// bounds and lattice-vs-SDE distributional distance.

#include <cstdint>
#include <span>
#include <vector>

#include "srlattice/model.hpp"

namespace srl {

struct KernelReport {
    long long nodes_total = 0;
    long long nodes_projected_phi = 0; // xi triple left [0,1] raw
    long long nodes_projected_psi = 0; // xihat triple left [0,1] raw
    double max_sum_residual = 0.0;        // |published sum - 1|, all nodes
    double max_drift_residual = 0.0;      // moment identity, unprojected coords
    double max_variance_residual = 0.0;   // moment identity, unprojected coords
    double max_cross_residual = 0.0;      // product form, both coords unprojected
    double max_martingale_residual = 0.0; // Q only: price-martingale identity
    double projected_mass = 0.0;          // forward mass reaching a projected node
};

/// Visits every node with a kernel (k < n), checks the published and raw
/// triples, and accumulates the forward mass that meets any projection.
KernelReport kernel_sweep(const LatticeSpec& spec, const HestonParams& p,
                          const TruncationBounds& b, MeasureTag measure,
                          const DriftFunctional& upsilon, ProjectionScheme scheme,
                          int threads = 0);

/// Max over nodes of |p_up e^a + p_mid + p_down e^{-a} - 1| for the xi
/// triple under the martingale kernel.
double q_price_martingale(const LatticeSpec& spec, const HestonParams& p,
                          const TruncationBounds& b, const DriftFunctional& upsilon,
                          ProjectionScheme scheme, int threads = 0);

/// E_{Q_n}[(dP_n/dQ_n)^q] by backward induction over (i, j). Throws when a
/// positive P-probability move has zero Q-probability (absolute continuity
/// can break after projection; reported, not hidden).
double density_moment(const LatticeSpec& spec, const HestonParams& p,
                      const TruncationBounds& b, const DriftFunctional& upsilon,
                      double q, ProjectionScheme scheme);

struct JumpBound {
    double a_n = 0.0;          // e^{sigma_tilde sqrt(T/n)} - 1
    double realized_max = 0.0; // largest relative price jump seen
    long long paths = 0;
};

/// Simulates lattice paths under P_n and checks the relative-jump bound.
JumpBound jump_bound_check(const LatticeSpec& spec, const HestonParams& p,
                           const TruncationBounds& b, long long paths,
                           std::uint64_t seed, ProjectionScheme scheme,
                           int threads = 0);

/// Exact terminal distribution of the Phi index.
std::vector<double> terminal_pmf(const LatticeSpec& spec, const HestonParams& p,
                                 const TruncationBounds& b, MeasureTag measure,
                                 const DriftFunctional& upsilon,
                                 ProjectionScheme scheme);

/// KS distance between the lattice terminal price law and an empirical
/// sample of S_T.
double ks_distance(std::span<const double> pmf, const LatticeSpec& spec,
                   const HestonParams& p, std::span<const double> terminal_prices);

} // namespace srl
