#pragma once

// Truncated Heston model on a recombining trinomial lattice: problem
// parameters, the (log-price, scaled-variance) coordinate transform, and
// the one-step transition kernels under the physical measure and under the
// martingale measures indexed by a bounded drift functional.

#include <array>
#include <functional>
#include <optional>

#include "srlattice/errors.hpp"

namespace srl {

struct HestonParams {
    double mu = 0.0;       // drift rate (1/time)
    double kappa = 0.0;    // mean-reversion speed (1/time)
    double theta = 0.0;    // long-run variance
    double sigma = 0.0;    // volatility of variance
    double rho = 0.0;      // correlation in (-1,1)
    double s0 = 0.0;       // initial asset price
    double nu0 = 0.0;      // initial variance
    double maturity = 0.0; // horizon T
    double strike = 0.0;   // call strike K

    /// Positivity, |rho|<1 and the Feller condition 2*kappa*theta > sigma^2.
    void validate() const;
};

struct TruncationBounds {
    double sigma_lo = 0.0; // lower volatility barrier
    double sigma_hi = 0.0; // upper volatility barrier

    void validate() const;
    double lo2() const { return sigma_lo * sigma_lo; }
    double hi2() const { return sigma_hi * sigma_hi; }
};

/// Lattice geometry. All scale-dependent exponentials are precomputed here
/// and reused everywhere so identical inputs give bit-identical kernels.
struct LatticeSpec {
    int n = 0;              // number of time steps
    double sigma_tilde = 0; // lattice scale, >= sigma_hi
    double step = 0;        // a = sigma_tilde * sqrt(T/n)
    double sqrt_dt = 0;     // sqrt(T/n)
    double phi0 = 0;        // ln s0
    double psi0 = 0;        // nu0/sigma - rho*phi0
    double exp_a = 0;       // e^{+a}
    double exp_ma = 0;      // e^{-a}

    static LatticeSpec make(const HestonParams& p, const TruncationBounds& b,
                            int n, double sigma_tilde);
};

/// Lattice node: time index k and integer coordinates (i, j) of the
/// (Phi, Psi) chain, |i| <= k, |j| <= k.
struct NodeState {
    int k = 0, i = 0, j = 0;
};

/// Drift/diffusion coefficients of the transformed system at a point.
struct CoeffSet {
    double mu_phi = 0, sigma_phi = 0;
    double mu_psi = 0, sigma_psi = 0;
};

struct Triple {
    double up = 0, mid = 0, down = 0;
    double sum() const { return up + mid + down; }
    bool valid() const {
        return up >= 0.0 && up <= 1.0 && mid >= 0.0 && mid <= 1.0 &&
               down >= 0.0 && down <= 1.0;
    }
};

enum class ProjectionScheme { None, PS1, PS2, PS3 };
enum class MeasureTag { Physical, Martingale };

struct TransitionKernel {
    Triple xi;        // published probabilities for the Phi move
    Triple xihat;     // published probabilities for the Psi move
    Triple xi_raw;    // unprojected moment-matching values
    Triple xihat_raw;
    bool xi_projected = false;
    bool xihat_projected = false;
    MeasureTag measure = MeasureTag::Physical;
    ProjectionScheme scheme = ProjectionScheme::None;
};

/// Bounded drift functional v(k, i) selecting a martingale measure;
/// restricted to Markov-in-Phi rules.
struct DriftFunctional {
    double bound = 0.0;
    std::function<double(int k, int i)> eval;

    static DriftFunctional zero() {
        return {0.0, [](int, int) { return 0.0; }};
    }
    static DriftFunctional constant(double c);

    double operator()(int k, int i) const;
};

/// h(z) = max(sigma_lo^2, min(z, sigma_hi^2)).
double clamp_variance(double z, const TruncationBounds& b);

/// Coefficients of the transformed SDE at (y, z) = (Phi, Psi).
CoeffSet transform_coeffs(double y, double z, const HestonParams& p,
                          const TruncationBounds& b);

struct NodeValues {
    double phi = 0, psi = 0;
    double nu_raw = 0; // sigma*(psi + rho*phi); may be negative
    double price = 0;  // s0 * e^{i*a}
};

/// Coordinates derived on demand from (k, i, j); throws on |i|>k or |j|>k.
NodeValues node_values(const NodeState& node, const LatticeSpec& spec,
                       const HestonParams& p);

TransitionKernel physical_kernel(const NodeState& node, const LatticeSpec& spec,
                                 const HestonParams& p, const TruncationBounds& b,
                                 ProjectionScheme scheme);

TransitionKernel martingale_kernel(const NodeState& node, const LatticeSpec& spec,
                                   const HestonParams& p, const TruncationBounds& b,
                                   const DriftFunctional& upsilon,
                                   ProjectionScheme scheme);

/// Kernel under either measure; upsilon is used only for Martingale.
TransitionKernel kernel_at(const NodeState& node, const LatticeSpec& spec,
                           const HestonParams& p, const TruncationBounds& b,
                           MeasureTag measure, const DriftFunctional& upsilon,
                           ProjectionScheme scheme);

struct MinValidN {
    long long n = 0;
    bool exceeds_cap = false; // "astronomical": required n above the cap
};

/// Smallest n for which the raw kernels lie in [0,1] for every clamp value
/// h in [sigma_lo^2, sigma_hi^2] (worst case over h, not over reachable
/// nodes), with the martingale psi-drift budget |upsilon| <= upsilon_bound.
MinValidN min_valid_n(const HestonParams& p, const TruncationBounds& b,
                      double sigma_tilde, double upsilon_bound,
                      long long cap = 1000000000LL);

} // namespace srl
