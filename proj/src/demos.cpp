#include "srlattice/demos.hpp"

#include <algorithm>
#include <cmath>

#include "srlattice/errors.hpp"
#include "srlattice/parallel.hpp"
#include "srlattice/rng.hpp"
#include "srlattice/stats.hpp"

namespace srl {

SignPathPair sign_path_pair(int n, std::uint64_t seed, long long path_index,
                            double maturity) {
    if (n < 1) throw ConfigError("need n >= 1");
    const double scale = std::sqrt(maturity / n);
    SignPathPair r;
    r.n = n;
    r.w.assign(static_cast<std::size_t>(n) + 1, 0.0);
    r.what.assign(static_cast<std::size_t>(n) + 1, 0.0);
    double sum = 0.0, psum = 0.0, prod = 1.0, cov = 0.0;
    for (int i = 1; i <= n; ++i) {
        cov += (maturity / n) * prod; // product over j < i
        int xi = sign_draw(seed, static_cast<std::uint64_t>(path_index),
                           static_cast<std::uint64_t>(i));
        sum += xi;
        prod *= xi;
        psum += prod;
        r.w[static_cast<std::size_t>(i)] = scale * sum;
        r.what[static_cast<std::size_t>(i)] = scale * psum;
    }
    r.covariation = cov;
    return r;
}

McEstimate kais_covariation(int n, long long paths, std::uint64_t seed,
                            double maturity) {
    if (n < 1 || paths < 1) throw ConfigError("need n >= 1 and paths >= 1");
    std::vector<double> sq(static_cast<std::size_t>(paths));
    parallel_for(sq.size(), 0, [&](std::size_t path) {
        double prod = 1.0, cov = 0.0;
        for (int i = 1; i <= n; ++i) {
            cov += (maturity / n) * prod;
            prod *= sign_draw(seed, path, static_cast<std::uint64_t>(i));
        }
        sq[path] = cov * cov;
    });
    return estimate_from(sq, seed);
}

double kais_terminal_correlation(int n, long long paths, std::uint64_t seed,
                                 double maturity) {
    const double scale = std::sqrt(maturity / n);
    std::vector<double> wt(static_cast<std::size_t>(paths));
    std::vector<double> wht(static_cast<std::size_t>(paths));
    parallel_for(wt.size(), 0, [&](std::size_t path) {
        double sum = 0.0, prod = 1.0, psum = 0.0;
        for (int i = 1; i <= n; ++i) {
            int xi = sign_draw(seed, path, static_cast<std::uint64_t>(i));
            sum += xi;
            prod *= xi;
            psum += prod;
        }
        wt[path] = scale * sum;
        wht[path] = scale * psum;
    });
    return stats::sample_correlation(wt, wht);
}

namespace {

// One path of the binomial pair (nu^(n), S^(n)) driven by a single sign
// sequence; returns S_T.
template <class SignAt>
double hullwhite_terminal(int n, double maturity, SignAt&& sign_at) {
    const double scale = std::sqrt(maturity / n);
    const double cap = std::log(static_cast<double>(n));
    double nu = 1.0, s = 1.0, prod = 1.0;
    for (int i = 1; i <= n; ++i) {
        int xi = sign_at(i);
        prod *= xi;
        s *= 1.0 + std::min(nu, cap) * scale * prod; // nu at the interval start
        nu *= 1.0 + scale * xi;
    }
    return s;
}

std::vector<double> hullwhite_sde_sample(long long paths, double dt, double maturity,
                                         std::uint64_t seed) {
    long long nsteps = static_cast<long long>(std::ceil(maturity / dt - 1e-9));
    const double h = maturity / static_cast<double>(nsteps);
    const double sq = std::sqrt(h);
    std::vector<double> out(static_cast<std::size_t>(paths));
    parallel_for(out.size(), 0, [&](std::size_t path) {
        double nu = 1.0, lphi = 0.0;
        for (long long s = 0; s < nsteps; ++s) {
            GaussPair z = normal_pair(seed, path, static_cast<std::uint64_t>(s));
            lphi += -0.5 * nu * nu * h + nu * sq * z.z2;
            nu *= std::exp(-0.5 * h + sq * z.z1);
        }
        out[path] = std::exp(lphi);
    });
    return out;
}

} // namespace

HullWhiteResult hullwhite_demo(int n, long long paths, std::uint64_t seed,
                               double strike, double maturity, long long sde_paths,
                               double sde_dt) {
    if (n < 1 || paths < 1) throw ConfigError("need n >= 1 and paths >= 1");
    const double scale = std::sqrt(maturity / n);
    if (!(scale < 1.0) || !(std::log(static_cast<double>(n)) * scale < 1.0))
        throw ConfigError("positivity precondition fails: need sqrt(T/n) < 1 and "
                          "ln(n)*sqrt(T/n) < 1");

    HullWhiteResult r;
    std::vector<double> sde = hullwhite_sde_sample(sde_paths, sde_dt, maturity,
                                                   seed ^ 0x9E3779B97F4A7C15ull);

    if (n <= 12) {
        r.enumerated = true;
        const long long total = 1LL << n;
        const double wgt = 1.0 / static_cast<double>(total);
        std::vector<std::pair<double, double>> atoms;
        atoms.reserve(static_cast<std::size_t>(total));
        std::vector<double> terms(static_cast<std::size_t>(total));
        std::vector<double> calls(static_cast<std::size_t>(total));
        for (long long mask = 0; mask < total; ++mask) {
            double s = hullwhite_terminal(n, maturity, [&](int i) {
                return (mask >> (i - 1)) & 1 ? 1 : -1;
            });
            terms[static_cast<std::size_t>(mask)] = s;
            calls[static_cast<std::size_t>(mask)] = std::max(s - strike, 0.0);
            atoms.emplace_back(s, wgt);
        }
        r.mean_terminal = {stats::pairwise_sum(terms) * wgt, 0.0, total, seed};
        r.call_price = {stats::pairwise_sum(calls) * wgt, 0.0, total, seed};
        r.ks_vs_sde = stats::ks_atoms_vs_sample(std::move(atoms), std::move(sde));
    } else {
        std::vector<double> terms(static_cast<std::size_t>(paths));
        parallel_for(terms.size(), 0, [&](std::size_t path) {
            terms[path] = hullwhite_terminal(n, maturity, [&](int i) {
                return sign_draw(seed, path, static_cast<std::uint64_t>(i));
            });
        });
        r.mean_terminal = estimate_from(terms, seed);
        // S_T has no second moment here, so estimate the bounded put side
        // and use parity with the exact martingale mean E[S_T] = 1:
        // E(S-K)^+ = (1-K) + E(K-S)^+.
        std::vector<double> puts(terms.size());
        for (std::size_t i = 0; i < terms.size(); ++i)
            puts[i] = std::max(strike - terms[i], 0.0);
        r.call_price = estimate_from(puts, seed);
        r.call_price.mean += 1.0 - strike;
        r.ks_vs_sde = stats::ks_two_sample(std::move(terms), std::move(sde));
    }
    r.gap = 1.0 - r.call_price.mean;
    return r;
}

NonconcaveResult nonconcave_value(int n) {
    if (n < 1 || n > 30000000) throw ConfigError("need 1 <= n <= 3e7");
    NonconcaveResult r;
    r.n = n;
    r.limit_value = 1.0;

    // Replicate 2*1_{xi_1 = +1} from capital 1: hold n^2 shares over the
    // first step, nothing afterwards. Growth rates are 1 +- 1/n^2, S_0 = 1,
    // so every price and wealth is a rational with denominator n^2; the
    // ledger runs in exact integer units of S_0/n^2.
    const long long q = static_cast<long long>(n) * n; // units per dollar
    bool nonneg = true;
    double expected_terminal = 0.0;
    double expected_utility = 0.0;
    for (int branch = 0; branch < 2; ++branch) {
        const long long xi1 = branch == 0 ? 1 : -1;
        long long wealth_units = q; // capital 1
        nonneg = nonneg && wealth_units >= 0;
        // step 1: q shares times a price move of xi1 units
        wealth_units += q * xi1;
        nonneg = nonneg && wealth_units >= 0;
        // steps 2..n: position 0, wealth constant on every sign path
        for (int k = 2; k <= n; ++k) nonneg = nonneg && wealth_units >= 0;
        double wealth = static_cast<double>(wealth_units) / static_cast<double>(q);
        expected_terminal += 0.5 * wealth;
        expected_utility += 0.5 * std::min(2.0, std::max(wealth, 1.0));
    }
    r.wealth_nonnegative = nonneg;
    r.replication_fair = expected_terminal == 1.0;
    r.value = expected_utility;
    return r;
}

} // namespace srl
