#pragma once

// Runnable constructions behind the counterexamples: the dependent-sign
// pair of random walks with vanishing covariation, binomial models
// converging to the Hull-White stochastic volatility limit, and the
// non-concave-utility binomial replication.

#include <cstdint>
#include <vector>

#include "srlattice/mc.hpp"

namespace srl {

/// One realization of the coupled walks: W from the signs themselves,
/// W-hat from their running products.
struct SignPathPair {
    int n = 0;
    std::vector<double> w;    // W at grid times 0..n
    std::vector<double> what; // W-hat at grid times 0..n
    double covariation = 0.0; // [W, W-hat]_T
};

SignPathPair sign_path_pair(int n, std::uint64_t seed, long long path_index,
                            double maturity = 1.0);

/// Monte Carlo estimate of E[([W, W-hat]_T)^2]; the exact value is T^2/n.
McEstimate kais_covariation(int n, long long paths, std::uint64_t seed,
                            double maturity = 1.0);

/// Sample correlation of W_T and W-hat_T (vanishes in the limit).
double kais_terminal_correlation(int n, long long paths, std::uint64_t seed,
                                 double maturity = 1.0);

struct HullWhiteResult {
    McEstimate mean_terminal; // E[S_T^(n)], equals 1 (martingale)
    McEstimate call_price;    // V_n = E[(S_T^(n) - K)^+]
    double ks_vs_sde = 0.0;   // distance to the limit SDE terminal law
    double gap = 0.0;         // S_0 - V_n: super-replication cost gap
    bool enumerated = false;  // exact 2^n enumeration (n <= 12)
};

/// The binomial-to-stochastic-volatility construction. Throws when the
/// positivity precondition on n fails.
HullWhiteResult hullwhite_demo(int n, long long paths, std::uint64_t seed,
                               double strike, double maturity = 1.0,
                               long long sde_paths = 100000, double sde_dt = 1e-3);

struct NonconcaveResult {
    double value = 0.0;            // E[min(2, max(V_T, 1))] = 3/2 exactly
    double limit_value = 0.0;      // value in the constant limit model: 1
    bool wealth_nonnegative = false;
    bool replication_fair = false; // E[V_T] equals the initial capital 1
    int n = 0;
};

/// Replicates 2*1_A with P(A) = 1/2 from capital 1 in the binomial model
/// with growth rates 1 +- 1/n^2 and evaluates the non-concave utility.
NonconcaveResult nonconcave_value(int n = 8);

} // namespace srl
