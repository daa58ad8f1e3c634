#pragma once

// Small numerical helpers shared by the Monte Carlo and diagnostics code:
// pairwise (thread-count independent) summation, mean/stderr reduction,
// normal CDF and Kolmogorov-Smirnov distances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace srl::stats {

/// Pairwise sum in fixed index order; result does not depend on how the
/// values were produced (thread partitioning), only on their order.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline MeanStderr mean_stderr(std::span<const double> v) {
    MeanStderr r;
    if (v.empty()) return r;
    const double n = static_cast<double>(v.size());
    r.mean = pairwise_sum(v) / n;
    if (v.size() < 2) return r;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double d = v[i] - r.mean;
        sq[i] = d * d;
    }
    double var = pairwise_sum(sq) / (n - 1.0);
    r.stderr_ = std::sqrt(var / n);
    return r;
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// KS distance between a discrete law given as (atom, weight) pairs and an
/// empirical sample. Atoms need not be sorted; weights must sum to ~1.
inline double ks_atoms_vs_sample(std::vector<std::pair<double, double>> atoms,
                                 std::vector<double> sample) {
    std::sort(atoms.begin(), atoms.end());
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    double f1 = 0.0; // discrete CDF
    for (const auto& [x, w] : atoms) {
        auto lo = std::lower_bound(sample.begin(), sample.end(), x);
        auto hi = std::upper_bound(sample.begin(), sample.end(), x);
        double f2_left = static_cast<double>(lo - sample.begin()) / n;
        double f2_right = static_cast<double>(hi - sample.begin()) / n;
        d = std::max(d, std::fabs(f1 - f2_left)); // just left of the atom
        f1 += w;
        d = std::max(d, std::fabs(f1 - f2_right)); // at the atom
    }
    return d;
}

/// Two-sample KS distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::fabs(ia / na - ib / nb));
    }
    return d;
}

/// KS distance between an empirical sample and a continuous CDF.
template <class Cdf>
inline double ks_vs_cdf(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

inline double sample_correlation(std::span<const double> x, std::span<const double> y) {
    auto mx = mean_stderr(x);
    auto my = mean_stderr(y);
    std::vector<double> xy(x.size()), xx(x.size()), yy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx.mean, dy = y[i] - my.mean;
        xy[i] = dx * dy;
        xx[i] = dx * dx;
        yy[i] = dy * dy;
    }
    double sxy = pairwise_sum(xy);
    double sxx = pairwise_sum(xx);
    double syy = pairwise_sum(yy);
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace srl::stats
