#pragma once

// Shared fixtures and independent reference implementations used by the
// unit and acceptance suites. The brute-force dynamic program enumerates
// controls branch by branch without the H-factorization or index tables of
// the production code; the path enumerators sum over all 3^(2n) moves.

#include <cmath>
#include <vector>

#include "srlattice/dp.hpp"
#include "srlattice/model.hpp"

namespace oracles {

struct Instance {
    srl::HestonParams params;
    srl::TruncationBounds bounds;
    double sigma_tilde;
};

/// Headline parameter set (the table1 run defaults).
inline Instance table1() {
    return {{0.05, 1.15, 0.348, 0.39, -0.64, 100.0, 0.09, 1.0, 90.0},
            {0.0001, 1.0},
            5.0};
}

/// Small instance whose kernels stay unclamped and unprojected for n <= 2.
inline Instance toy_gentle() {
    return {{0.02, 0.1, 0.16, 0.15, -0.2, 1.0, 0.16, 1.0, 1.0},
            {0.05, 0.5},
            0.5};
}

/// One-step instance, interior at the root.
inline Instance toy_root() {
    return {{0.05, 0.5, 0.16, 0.35, -0.3, 1.0, 0.16, 1.0, 1.0},
            {0.01, 0.8},
            0.8};
}

inline srl::LatticeSpec spec_of(const Instance& in, int n) {
    return srl::LatticeSpec::make(in.params, in.bounds, n, in.sigma_tilde);
}

/// Post-trade index map evaluated through the public double-precision op
/// (independent of the integer index tables inside dp_grid).
inline int up_index(double lambda, double c, const srl::LatticeSpec& spec, int M,
                    srl::BoundSide side, srl::RoundMode plus_mode) {
    srl::RoundMode mode =
        side == srl::BoundSide::Minus ? srl::RoundMode::Floor : plus_mode;
    return static_cast<int>(
        std::lround(srl::lambda_up(lambda, c, spec.step, M, mode) * M));
}

/// Exhaustive control optimization by recursion over reachable states.
inline double brute_force_dp(const Instance& in, const srl::LatticeSpec& spec, int M,
                             srl::BoundSide side, srl::ProjectionScheme scheme,
                             int k, int i, int j, int m,
                             srl::RoundMode plus_mode = srl::RoundMode::CeilPlus) {
    if (k == spec.n) {
        double price = in.params.s0 * std::exp(i * spec.step);
        double lambda = static_cast<double>(m) / M;
        return srl::payoff_shortfall(lambda * price, price, in.params.strike);
    }
    srl::TransitionKernel ker =
        srl::physical_kernel({k, i, j}, spec, in.params, in.bounds, scheme);
    const double pxi[3] = {ker.xi.down, ker.xi.mid, ker.xi.up};
    const double pxh[3] = {ker.xihat.down, ker.xihat.mid, ker.xihat.up};
    const double lambda = static_cast<double>(m) / M;
    const int cmax = static_cast<int>(
        std::floor(srl::control_upper(lambda, spec.step) * M));

    double best = -1e300;
    for (int c = 0; c <= cmax; ++c) {
        int mup = up_index(lambda, static_cast<double>(c) / M, spec, M, side, plus_mode);
        double val = 0.0;
        for (int di = -1; di <= 1; ++di) {
            int mnext = di < 0 ? c : (di == 0 ? m : mup);
            for (int dj = -1; dj <= 1; ++dj) {
                double pr = pxi[di + 1] * pxh[dj + 1];
                if (pr == 0.0) continue;
                val += pr * brute_force_dp(in, spec, M, side, scheme, k + 1, i + di,
                                           j + dj, mnext, plus_mode);
            }
        }
        if (val > best) best = val;
    }
    return best;
}

/// All-path enumeration of the terminal pmf over i (3^(2n) paths).
inline std::vector<double> enumerate_pmf(const Instance& in,
                                         const srl::LatticeSpec& spec,
                                         srl::MeasureTag measure,
                                         srl::ProjectionScheme scheme) {
    std::vector<double> pmf(static_cast<std::size_t>(2 * spec.n + 1), 0.0);
    auto zero = srl::DriftFunctional::zero();
    struct Rec {
        const Instance& in;
        const srl::LatticeSpec& spec;
        srl::MeasureTag measure;
        srl::ProjectionScheme scheme;
        const srl::DriftFunctional& zero;
        std::vector<double>& pmf;
        void walk(int k, int i, int j, double prob) {
            if (prob == 0.0) return;
            if (k == spec.n) {
                pmf[static_cast<std::size_t>(i + spec.n)] += prob;
                return;
            }
            srl::TransitionKernel ker = srl::kernel_at(
                {k, i, j}, spec, in.params, in.bounds, measure, zero, scheme);
            const double pxi[3] = {ker.xi.down, ker.xi.mid, ker.xi.up};
            const double pxh[3] = {ker.xihat.down, ker.xihat.mid, ker.xihat.up};
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    walk(k + 1, i + di, j + dj, prob * pxi[di + 1] * pxh[dj + 1]);
        }
    } rec{in, spec, measure, scheme, zero, pmf};
    rec.walk(0, 0, 0, 1.0);
    return pmf;
}

/// All-path enumeration of E_Q[(dP/dQ)^q].
inline double enumerate_density_moment(const Instance& in,
                                       const srl::LatticeSpec& spec, double q,
                                       srl::ProjectionScheme scheme) {
    auto zero = srl::DriftFunctional::zero();
    struct Rec {
        const Instance& in;
        const srl::LatticeSpec& spec;
        double q;
        srl::ProjectionScheme scheme;
        const srl::DriftFunctional& zero;
        double total = 0.0;
        void walk(int k, int i, int j, double qprob, double ratio) {
            if (qprob == 0.0) return;
            if (k == spec.n) {
                total += qprob * std::pow(ratio, q);
                return;
            }
            srl::TransitionKernel pk =
                srl::physical_kernel({k, i, j}, spec, in.params, in.bounds, scheme);
            srl::TransitionKernel qk = srl::martingale_kernel(
                {k, i, j}, spec, in.params, in.bounds, zero, scheme);
            const double pp[3] = {pk.xi.down, pk.xi.mid, pk.xi.up};
            const double ph[3] = {pk.xihat.down, pk.xihat.mid, pk.xihat.up};
            const double qp[3] = {qk.xi.down, qk.xi.mid, qk.xi.up};
            const double qh[3] = {qk.xihat.down, qk.xihat.mid, qk.xihat.up};
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    double qq = qp[di + 1] * qh[dj + 1];
                    double pr = pp[di + 1] * ph[dj + 1];
                    if (qq == 0.0) continue;
                    walk(k + 1, i + di, j + dj, qprob * qq, ratio * pr / qq);
                }
        }
    } rec{in, spec, q, scheme, zero};
    rec.walk(0, 0, 0, 1.0, 1.0);
    return rec.total;
}

} // namespace oracles
