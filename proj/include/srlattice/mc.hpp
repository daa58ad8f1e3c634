#pragma once

// Monte Carlo references for the truncated and raw Heston SDEs: terminal
// laws, unhedged shortfall values and barrier exit-time probabilities.
// Paths use counter-based draws keyed by (seed, path, step), so results do
// not depend on the worker count.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "srlattice/model.hpp"

namespace srl {

struct McConfig {
    long long paths = 100000;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    bool antithetic = false;

    void validate(double maturity) const;
    /// dt is snapped to maturity/steps with steps = ceil(maturity/dt).
    long long steps(double maturity) const;
};

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long long paths = 0;
    std::uint64_t seed = 0;
};

McEstimate estimate_from(std::span<const double> values, std::uint64_t seed);

/// Terminal state and running variance extrema of one simulated path.
struct PathTerminal {
    double s = 0.0;
    double nu = 0.0;
    double nu_min = 0.0;
    double nu_max = 0.0;
};

/// Euler-Maruyama on the truncated model: log-coordinate stepping for S,
/// the clamp h applied inside drift and diffusion each step.
std::vector<PathTerminal> simulate_truncated(const HestonParams& p,
                                             const TruncationBounds& b,
                                             const McConfig& cfg, int threads = 0);

/// Euler with full truncation for the raw Heston variance.
std::vector<PathTerminal> simulate_raw(const HestonParams& p, const McConfig& cfg,
                                       int threads = 0);

struct ExitStats {
    McEstimate p_exit;    // P(Theta < T) on the simulation grid
    McEstimate p_no_exit; // P(Theta = T)
    McEstimate p_hit_lo;  // first exit through the lower barrier
    McEstimate p_hit_hi;  // first exit through the upper barrier
};

/// First-exit detection for sqrt(nu-hat) leaving (sigma_lo, sigma_hi),
/// on the Euler grid (no bridge correction).
ExitStats exit_stats(const HestonParams& p, const TruncationBounds& b,
                     const McConfig& cfg, int threads = 0);

struct AlphaExitStats {
    McEstimate p_lo; // P(inf sqrt(alpha) <= sigma_lo)
    std::vector<std::pair<double, McEstimate>> p_hi; // per upper barrier
    double tail_exponent = 0.0; // 2*kappa*theta/sigma^2 - 1
};

/// The measure-changed variance diffusion
/// d alpha = (kappa(theta - alpha) + sigma*rho*alpha) dt + sigma sqrt(alpha) dW.
AlphaExitStats alpha_exit_stats(const HestonParams& p, const TruncationBounds& b,
                                const McConfig& cfg,
                                std::span<const double> sigma_hi_grid,
                                int threads = 0);

/// -E[((S_T - K)^+ - x)^+] on truncated-model terminals.
McEstimate mc_unhedged(const HestonParams& p, const TruncationBounds& b,
                       const McConfig& cfg, double x, int threads = 0);

/// Same estimator on precomputed terminals (lets callers reuse one sweep).
McEstimate mc_unhedged_from(std::span<const PathTerminal> terminals, double strike,
                            double x, std::uint64_t seed);

} // namespace srl
