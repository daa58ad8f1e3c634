#include "srlattice/mc.hpp"

#include <algorithm>
#include <cmath>

#include "srlattice/parallel.hpp"
#include "srlattice/rng.hpp"
#include "srlattice/stats.hpp"

namespace srl {

void McConfig::validate(double maturity) const {
    if (paths < 1) throw ConfigError("Monte Carlo needs paths >= 1");
    if (!(dt > 0.0 && dt <= maturity))
        throw ConfigError("Monte Carlo step must satisfy 0 < dt <= maturity");
}

long long McConfig::steps(double maturity) const {
    return static_cast<long long>(std::ceil(maturity / dt - 1e-9));
}

McEstimate estimate_from(std::span<const double> values, std::uint64_t seed) {
    auto ms = stats::mean_stderr(values);
    return {ms.mean, ms.stderr_, static_cast<long long>(values.size()), seed};
}

namespace {

struct StepScale {
    double dt, sqdt, rho, srho;
    long long nsteps;
};

StepScale scales(const HestonParams& p, const McConfig& cfg) {
    StepScale s;
    s.nsteps = cfg.steps(p.maturity);
    s.dt = p.maturity / static_cast<double>(s.nsteps);
    s.sqdt = std::sqrt(s.dt);
    s.rho = p.rho;
    s.srho = std::sqrt(1.0 - p.rho * p.rho);
    return s;
}

GaussPair draw(const McConfig& cfg, long long path, long long step) {
    if (!cfg.antithetic)
        return normal_pair(cfg.seed, static_cast<std::uint64_t>(path),
                           static_cast<std::uint64_t>(step));
    GaussPair g = normal_pair(cfg.seed, static_cast<std::uint64_t>(path / 2),
                              static_cast<std::uint64_t>(step));
    if (path & 1) return {-g.z1, -g.z2};
    return g;
}

} // namespace

std::vector<PathTerminal> simulate_truncated(const HestonParams& p,
                                             const TruncationBounds& b,
                                             const McConfig& cfg, int threads) {
    p.validate();
    b.validate();
    cfg.validate(p.maturity);
    const StepScale sc = scales(p, cfg);
    std::vector<PathTerminal> out(static_cast<std::size_t>(cfg.paths));
    parallel_for(out.size(), threads, [&](std::size_t path) {
        double phi = std::log(p.s0);
        double nu = p.nu0;
        double nu_min = nu, nu_max = nu;
        for (long long s = 0; s < sc.nsteps; ++s) {
            const double h = clamp_variance(nu, b);
            const double sq = std::sqrt(h);
            const GaussPair z = draw(cfg, static_cast<long long>(path), s);
            phi += (p.mu - 0.5 * h) * sc.dt + sq * sc.sqdt * z.z1;
            nu += p.kappa * (p.theta - h) * sc.dt +
                  p.sigma * sq * sc.sqdt * (sc.rho * z.z1 + sc.srho * z.z2);
            nu_min = std::min(nu_min, nu);
            nu_max = std::max(nu_max, nu);
        }
        out[path] = {std::exp(phi), nu, nu_min, nu_max};
    });
    return out;
}

std::vector<PathTerminal> simulate_raw(const HestonParams& p, const McConfig& cfg,
                                       int threads) {
    p.validate();
    cfg.validate(p.maturity);
    const StepScale sc = scales(p, cfg);
    std::vector<PathTerminal> out(static_cast<std::size_t>(cfg.paths));
    parallel_for(out.size(), threads, [&](std::size_t path) {
        double phi = std::log(p.s0);
        double nu = p.nu0;
        double nu_min = nu, nu_max = nu;
        for (long long s = 0; s < sc.nsteps; ++s) {
            const double nup = std::max(nu, 0.0); // full truncation
            const double sq = std::sqrt(nup);
            const GaussPair z = draw(cfg, static_cast<long long>(path), s);
            phi += (p.mu - 0.5 * nup) * sc.dt + sq * sc.sqdt * z.z1;
            nu += p.kappa * (p.theta - nup) * sc.dt +
                  p.sigma * sq * sc.sqdt * (sc.rho * z.z1 + sc.srho * z.z2);
            nu_min = std::min(nu_min, nu);
            nu_max = std::max(nu_max, nu);
        }
        out[path] = {std::exp(phi), nu, nu_min, nu_max};
    });
    return out;
}

ExitStats exit_stats(const HestonParams& p, const TruncationBounds& b,
                     const McConfig& cfg, int threads) {
    p.validate();
    b.validate();
    cfg.validate(p.maturity);
    const StepScale sc = scales(p, cfg);
    const double lo2 = b.lo2(), hi2 = b.hi2();

    std::vector<double> exited(static_cast<std::size_t>(cfg.paths));
    std::vector<double> hit_lo(static_cast<std::size_t>(cfg.paths));
    std::vector<double> hit_hi(static_cast<std::size_t>(cfg.paths));
    parallel_for(exited.size(), threads, [&](std::size_t path) {
        double nu = p.nu0;
        int first = 0; // 0 none, 1 lower, 2 upper
        // grid states t_s = s*dt for s = 0..nsteps; Theta < T needs s < nsteps
        auto check = [&](double v, long long s) {
            if (first != 0) return;
            double vp = std::max(v, 0.0);
            if (s < sc.nsteps) {
                if (vp <= lo2) first = 1;
                else if (vp >= hi2) first = 2;
            }
        };
        check(nu, 0);
        for (long long s = 0; s < sc.nsteps; ++s) {
            const double nup = std::max(nu, 0.0);
            const double sq = std::sqrt(nup);
            const GaussPair z = draw(cfg, static_cast<long long>(path), s);
            nu += p.kappa * (p.theta - nup) * sc.dt +
                  p.sigma * sq * sc.sqdt * (sc.rho * z.z1 + sc.srho * z.z2);
            check(nu, s + 1);
        }
        exited[path] = first != 0 ? 1.0 : 0.0;
        hit_lo[path] = first == 1 ? 1.0 : 0.0;
        hit_hi[path] = first == 2 ? 1.0 : 0.0;
    });

    ExitStats r;
    r.p_exit = estimate_from(exited, cfg.seed);
    r.p_no_exit = r.p_exit;
    r.p_no_exit.mean = 1.0 - r.p_exit.mean;
    r.p_hit_lo = estimate_from(hit_lo, cfg.seed);
    r.p_hit_hi = estimate_from(hit_hi, cfg.seed);
    return r;
}

AlphaExitStats alpha_exit_stats(const HestonParams& p, const TruncationBounds& b,
                                const McConfig& cfg,
                                std::span<const double> sigma_hi_grid,
                                int threads) {
    p.validate();
    b.validate();
    cfg.validate(p.maturity);
    const StepScale sc = scales(p, cfg);
    const double lo2 = b.lo2();

    std::vector<double> amin(static_cast<std::size_t>(cfg.paths));
    std::vector<double> amax(static_cast<std::size_t>(cfg.paths));
    parallel_for(amin.size(), threads, [&](std::size_t path) {
        double a = p.nu0;
        double mn = a, mx = a;
        for (long long s = 0; s < sc.nsteps; ++s) {
            const double ap = std::max(a, 0.0);
            const GaussPair z = draw(cfg, static_cast<long long>(path), s);
            a += (p.kappa * (p.theta - ap) + p.sigma * p.rho * ap) * sc.dt +
                 p.sigma * std::sqrt(ap) * sc.sqdt * z.z1;
            mn = std::min(mn, std::max(a, 0.0));
            mx = std::max(mx, std::max(a, 0.0));
        }
        amin[path] = mn;
        amax[path] = mx;
    });

    AlphaExitStats r;
    r.tail_exponent = 2.0 * p.kappa * p.theta / (p.sigma * p.sigma) - 1.0;
    std::vector<double> ind(amin.size());
    for (std::size_t i = 0; i < amin.size(); ++i)
        ind[i] = amin[i] <= lo2 ? 1.0 : 0.0;
    r.p_lo = estimate_from(ind, cfg.seed);
    for (double sh : sigma_hi_grid) {
        const double hi2 = sh * sh;
        for (std::size_t i = 0; i < amax.size(); ++i)
            ind[i] = amax[i] >= hi2 ? 1.0 : 0.0;
        r.p_hi.emplace_back(sh, estimate_from(ind, cfg.seed));
    }
    return r;
}

McEstimate mc_unhedged_from(std::span<const PathTerminal> terminals, double strike,
                            double x, std::uint64_t seed) {
    std::vector<double> vals(terminals.size());
    for (std::size_t i = 0; i < terminals.size(); ++i) {
        double payoff = std::max(terminals[i].s - strike, 0.0);
        vals[i] = -std::max(payoff - x, 0.0);
    }
    return estimate_from(vals, seed);
}

McEstimate mc_unhedged(const HestonParams& p, const TruncationBounds& b,
                       const McConfig& cfg, double x, int threads) {
    auto terminals = simulate_truncated(p, b, cfg, threads);
    return mc_unhedged_from(terminals, p.strike, x, cfg.seed);
}

} // namespace srl
