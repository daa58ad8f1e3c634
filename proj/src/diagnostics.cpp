#include "srlattice/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "srlattice/lattice_forward.hpp"
#include "srlattice/parallel.hpp"
#include "srlattice/rng.hpp"
#include "srlattice/stats.hpp"

namespace srl {

namespace {

struct RowReport {
    long long proj_phi = 0, proj_psi = 0;
    double sum_res = 0, drift_res = 0, var_res = 0, cross_res = 0, mart_res = 0;
};

} // namespace

KernelReport kernel_sweep(const LatticeSpec& spec, const HestonParams& p,
                          const TruncationBounds& b, MeasureTag measure,
                          const DriftFunctional& upsilon, ProjectionScheme scheme,
                          int threads) {
    const double dt = spec.sqrt_dt * spec.sqrt_dt;
    const double a = spec.step;

    KernelReport rep;
    std::vector<char> projected; // per node of the current step, for the mass pass
    std::vector<double> clean{1.0};
    std::vector<double> clean_next;

    for (int k = 0; k < spec.n; ++k) {
        const int w = 2 * k + 1;
        std::vector<RowReport> rows(static_cast<std::size_t>(w));
        projected.assign(static_cast<std::size_t>(w) * w, 0);
        std::vector<TransitionKernel> kernels(static_cast<std::size_t>(w) * w);

        parallel_for(static_cast<std::size_t>(w), threads, [&](std::size_t row) {
            const int i = static_cast<int>(row) - k;
            RowReport& r = rows[row];
            for (int j = -k; j <= k; ++j) {
                const NodeState node{k, i, j};
                const TransitionKernel ker =
                    kernel_at(node, spec, p, b, measure, upsilon, scheme);
                kernels[row * w + (j + k)] = ker;
                if (ker.xi_projected) ++r.proj_phi;
                if (ker.xihat_projected) ++r.proj_psi;
                if (ker.xi_projected || ker.xihat_projected)
                    projected[row * w + (j + k)] = 1;

                r.sum_res = std::max({r.sum_res, std::fabs(ker.xi.sum() - 1.0),
                                      std::fabs(ker.xihat.sum() - 1.0)});

                const NodeValues nv = node_values(node, spec, p);
                const CoeffSet c = transform_coeffs(nv.phi, nv.psi, p, b);
                double mean_phi = a * (ker.xi.up - ker.xi.down);
                double mean_psi = a * (ker.xihat.up - ker.xihat.down);
                if (!ker.xi_projected) {
                    double var = a * a * (ker.xi.up + ker.xi.down);
                    r.var_res = std::max(
                        r.var_res, std::fabs(var - dt * c.sigma_phi * c.sigma_phi));
                    if (measure == MeasureTag::Physical)
                        r.drift_res = std::max(r.drift_res,
                                               std::fabs(mean_phi - dt * c.mu_phi));
                }
                if (!ker.xihat_projected) {
                    double var = a * a * (ker.xihat.up + ker.xihat.down);
                    r.var_res = std::max(
                        r.var_res, std::fabs(var - dt * c.sigma_psi * c.sigma_psi));
                    double drift = c.mu_psi;
                    if (measure == MeasureTag::Martingale)
                        drift += upsilon(k, i) * c.sigma_psi;
                    r.drift_res =
                        std::max(r.drift_res, std::fabs(mean_psi - dt * drift));
                }
                if (measure == MeasureTag::Physical && !ker.xi_projected &&
                    !ker.xihat_projected) {
                    double cross = mean_phi * mean_psi;
                    r.cross_res = std::max(
                        r.cross_res,
                        std::fabs(cross - dt * dt * c.mu_phi * c.mu_psi));
                }
                if (measure == MeasureTag::Martingale) {
                    double mart = ker.xi.up * spec.exp_a + ker.xi.mid +
                                  ker.xi.down * spec.exp_ma - 1.0;
                    r.mart_res = std::max(r.mart_res, std::fabs(mart));
                }
            }
        });

        for (const RowReport& r : rows) {
            rep.nodes_projected_phi += r.proj_phi;
            rep.nodes_projected_psi += r.proj_psi;
            rep.max_sum_residual = std::max(rep.max_sum_residual, r.sum_res);
            rep.max_drift_residual = std::max(rep.max_drift_residual, r.drift_res);
            rep.max_variance_residual = std::max(rep.max_variance_residual, r.var_res);
            rep.max_cross_residual = std::max(rep.max_cross_residual, r.cross_res);
            rep.max_martingale_residual =
                std::max(rep.max_martingale_residual, r.mart_res);
        }
        rep.nodes_total += static_cast<long long>(w) * w;

        // clean mass: propagated only through unprojected nodes
        const int wn = w + 2;
        clean_next.assign(static_cast<std::size_t>(wn) * wn, 0.0);
        for (int i = -k; i <= k; ++i) {
            for (int j = -k; j <= k; ++j) {
                const std::size_t ix = static_cast<std::size_t>(i + k) * w + (j + k);
                if (projected[ix]) continue;
                const double m = clean[ix];
                if (m == 0.0) continue;
                const TransitionKernel& ker = kernels[ix];
                const double px[3] = {ker.xi.down, ker.xi.mid, ker.xi.up};
                const double pq[3] = {ker.xihat.down, ker.xihat.mid, ker.xihat.up};
                for (int di = -1; di <= 1; ++di) {
                    const double mp = m * px[di + 1];
                    if (mp == 0.0) continue;
                    double* out =
                        clean_next.data() + static_cast<std::size_t>(i + di + k + 1) * wn;
                    for (int dj = -1; dj <= 1; ++dj)
                        out[j + dj + k + 1] += mp * pq[dj + 1];
                }
            }
        }
        clean.swap(clean_next);
    }
    double surviving = stats::pairwise_sum(clean);
    rep.projected_mass = std::max(0.0, 1.0 - surviving);
    return rep;
}

double q_price_martingale(const LatticeSpec& spec, const HestonParams& p,
                          const TruncationBounds& b, const DriftFunctional& upsilon,
                          ProjectionScheme scheme, int threads) {
    std::vector<double> worst(static_cast<std::size_t>(spec.n), 0.0);
    parallel_for(static_cast<std::size_t>(spec.n), threads, [&](std::size_t kk) {
        const int k = static_cast<int>(kk);
        double w = 0.0;
        for (int i = -k; i <= k; ++i) {
            for (int j = -k; j <= k; ++j) {
                TransitionKernel ker =
                    martingale_kernel({k, i, j}, spec, p, b, upsilon, scheme);
                double res = ker.xi.up * spec.exp_a + ker.xi.mid +
                             ker.xi.down * spec.exp_ma - 1.0;
                w = std::max(w, std::fabs(res));
            }
        }
        worst[kk] = w;
    });
    double r = 0.0;
    for (double w : worst) r = std::max(r, w);
    return r;
}

double density_moment(const LatticeSpec& spec, const HestonParams& p,
                      const TruncationBounds& b, const DriftFunctional& upsilon,
                      double q, ProjectionScheme scheme) {
    auto pow_q = [q](double x) {
        if (q == 0.0) return 1.0;
        if (q == 1.0) return x;
        if (q == 2.0) return x * x;
        return std::pow(x, q);
    };

    const int n = spec.n;
    std::vector<double> w(static_cast<std::size_t>(2 * n + 1) * (2 * n + 1), 1.0);
    std::vector<double> cur;
    for (int k = n - 1; k >= 0; --k) {
        const int wk = 2 * k + 1;
        const int wn = wk + 2;
        cur.assign(static_cast<std::size_t>(wk) * wk, 0.0);
        for (int i = -k; i <= k; ++i) {
            for (int j = -k; j <= k; ++j) {
                const NodeState node{k, i, j};
                TransitionKernel pk = physical_kernel(node, spec, p, b, scheme);
                TransitionKernel qk =
                    martingale_kernel(node, spec, p, b, upsilon, scheme);
                const double pp_xi[3] = {pk.xi.down, pk.xi.mid, pk.xi.up};
                const double pp_xh[3] = {pk.xihat.down, pk.xihat.mid, pk.xihat.up};
                const double qp_xi[3] = {qk.xi.down, qk.xi.mid, qk.xi.up};
                const double qp_xh[3] = {qk.xihat.down, qk.xihat.mid, qk.xihat.up};
                double rq_xi[3], rq_xh[3];
                for (int t = 0; t < 3; ++t) {
                    if (qp_xi[t] == 0.0) {
                        if (pp_xi[t] > 0.0)
                            throw InvariantError(
                                "absolute continuity violated: P-positive move has "
                                "zero Q-probability after projection");
                        rq_xi[t] = 0.0;
                    } else {
                        rq_xi[t] = pow_q(pp_xi[t] / qp_xi[t]);
                    }
                    if (qp_xh[t] == 0.0) {
                        if (pp_xh[t] > 0.0)
                            throw InvariantError(
                                "absolute continuity violated: P-positive move has "
                                "zero Q-probability after projection");
                        rq_xh[t] = 0.0;
                    } else {
                        rq_xh[t] = pow_q(pp_xh[t] / qp_xh[t]);
                    }
                }
                double acc = 0.0;
                for (int di = -1; di <= 1; ++di) {
                    const double f = qp_xi[di + 1] * rq_xi[di + 1];
                    if (f == 0.0) continue;
                    const double* nxt =
                        w.data() + static_cast<std::size_t>(i + di + k + 1) * wn;
                    double inner = 0.0;
                    for (int dj = -1; dj <= 1; ++dj)
                        inner += qp_xh[dj + 1] * rq_xh[dj + 1] * nxt[j + dj + k + 1];
                    acc += f * inner;
                }
                cur[static_cast<std::size_t>(i + k) * wk + (j + k)] = acc;
            }
        }
        w.swap(cur);
    }
    return w[0];
}

JumpBound jump_bound_check(const LatticeSpec& spec, const HestonParams& p,
                           const TruncationBounds& b, long long paths,
                           std::uint64_t seed, ProjectionScheme scheme,
                           int threads) {
    JumpBound r;
    r.a_n = spec.exp_a - 1.0;
    r.paths = paths;
    std::vector<double> maxjump(static_cast<std::size_t>(paths), 0.0);
    const double jump_up = spec.exp_a - 1.0;
    const double jump_dn = 1.0 - spec.exp_ma;
    parallel_for(maxjump.size(), threads, [&](std::size_t path) {
        int i = 0, j = 0;
        double mx = 0.0;
        for (int k = 0; k < spec.n; ++k) {
            TransitionKernel ker = physical_kernel({k, i, j}, spec, p, b, scheme);
            auto block = Philox4x32::block(seed, path, static_cast<std::uint64_t>(k));
            double u1 = uniform_open(block[0], block[1]);
            double u2 = uniform_open(block[2], block[3]);
            int xi = u1 <= ker.xi.down ? -1 : (u1 <= ker.xi.down + ker.xi.mid ? 0 : 1);
            int xh = u2 <= ker.xihat.down
                         ? -1
                         : (u2 <= ker.xihat.down + ker.xihat.mid ? 0 : 1);
            if (xi == 1) mx = std::max(mx, jump_up);
            if (xi == -1) mx = std::max(mx, jump_dn);
            i += xi;
            j += xh;
        }
        maxjump[path] = mx;
    });
    for (double m : maxjump) r.realized_max = std::max(r.realized_max, m);
    return r;
}

std::vector<double> terminal_pmf(const LatticeSpec& spec, const HestonParams& p,
                                 const TruncationBounds& b, MeasureTag measure,
                                 const DriftFunctional& upsilon,
                                 ProjectionScheme scheme) {
    auto joint = forward_joint_distribution(spec, p, b, measure, upsilon, scheme);
    return marginal_phi(joint, spec.n);
}

double ks_distance(std::span<const double> pmf, const LatticeSpec& spec,
                   const HestonParams& p, std::span<const double> terminal_prices) {
    if (pmf.empty() || terminal_prices.empty())
        throw ConfigError("ks_distance needs a pmf and a nonempty sample");
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(pmf.size());
    const int n = (static_cast<int>(pmf.size()) - 1) / 2;
    for (int i = -n; i <= n; ++i)
        atoms.emplace_back(p.s0 * std::exp(i * spec.step),
                           pmf[static_cast<std::size_t>(i + n)]);
    return stats::ks_atoms_vs_sample(
        std::move(atoms),
        std::vector<double>(terminal_prices.begin(), terminal_prices.end()));
}

} // namespace srl
