#include "srlattice/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace srl {

namespace {

bool positive(double x) { return x > 0.0 && std::isfinite(x); }

} // namespace

void HestonParams::validate() const {
    if (!positive(kappa) || !positive(theta) || !positive(sigma) ||
        !positive(s0) || !positive(nu0) || !positive(maturity) || !positive(strike))
        throw ConfigError("model parameters must be strictly positive");
    if (!std::isfinite(mu))
        throw ConfigError("mu must be finite");
    if (!(rho > -1.0 && rho < 1.0))
        throw ConfigError("rho must lie strictly inside (-1, 1)");
    if (!(2.0 * kappa * theta > sigma * sigma))
        throw ConfigError("Feller condition 2*kappa*theta > sigma^2 violated");
}

void TruncationBounds::validate() const {
    if (!(sigma_lo > 0.0 && sigma_lo < sigma_hi && std::isfinite(sigma_hi)))
        throw ConfigError("barriers must satisfy 0 < sigma_lo < sigma_hi");
}

LatticeSpec LatticeSpec::make(const HestonParams& p, const TruncationBounds& b,
                              int n, double sigma_tilde) {
    p.validate();
    b.validate();
    if (n < 1) throw ConfigError("lattice needs n >= 1");
    if (!(sigma_tilde >= b.sigma_hi))
        throw ConfigError("lattice scale must satisfy sigma_tilde >= sigma_hi");
    LatticeSpec s;
    s.n = n;
    s.sigma_tilde = sigma_tilde;
    s.sqrt_dt = std::sqrt(p.maturity / static_cast<double>(n));
    s.step = sigma_tilde * s.sqrt_dt;
    s.phi0 = std::log(p.s0);
    s.psi0 = p.nu0 / p.sigma - p.rho * s.phi0;
    s.exp_a = std::exp(s.step);
    s.exp_ma = std::exp(-s.step);
    return s;
}

DriftFunctional DriftFunctional::constant(double c) {
    return {std::fabs(c), [c](int, int) { return c; }};
}

double DriftFunctional::operator()(int k, int i) const {
    double v = eval ? eval(k, i) : 0.0;
    if (std::fabs(v) > bound + 1e-12)
        throw InvariantError("drift functional exceeded its declared bound");
    return v;
}

double clamp_variance(double z, const TruncationBounds& b) {
    return std::max(b.lo2(), std::min(z, b.hi2()));
}

CoeffSet transform_coeffs(double y, double z, const HestonParams& p,
                          const TruncationBounds& b) {
    const double h = clamp_variance(p.sigma * (p.rho * y + z), b);
    CoeffSet c;
    c.mu_phi = p.mu - 0.5 * h;
    c.sigma_phi = std::sqrt(h);
    c.mu_psi = (p.kappa / p.sigma) * (p.theta - h) - p.rho * c.mu_phi;
    c.sigma_psi = std::sqrt(1.0 - p.rho * p.rho) * c.sigma_phi;
    return c;
}

NodeValues node_values(const NodeState& node, const LatticeSpec& spec,
                       const HestonParams& p) {
    if (node.k < 0 || node.k > spec.n || std::abs(node.i) > node.k ||
        std::abs(node.j) > node.k)
        throw ConfigError("node (" + std::to_string(node.k) + "," +
                          std::to_string(node.i) + "," + std::to_string(node.j) +
                          ") outside lattice bounds");
    NodeValues v;
    v.phi = spec.phi0 + node.i * spec.step;
    v.psi = spec.psi0 + node.j * spec.step;
    v.nu_raw = p.sigma * (v.psi + p.rho * v.phi);
    v.price = p.s0 * std::exp(node.i * spec.step);
    return v;
}

namespace {

// Projection of a raw triple onto valid probabilities. Returns the
// published triple and whether the scheme fired.
Triple project(const Triple& raw, ProjectionScheme scheme, bool& fired,
               const NodeState& node) {
    fired = false;
    if (raw.valid()) return raw;
    switch (scheme) {
    case ProjectionScheme::None:
        throw KernelError("raw transition probabilities outside [0,1]",
                          node.k, node.i, node.j, raw.up, raw.mid, raw.down);
    case ProjectionScheme::PS1: {
        fired = true;
        Triple t;
        t.up = std::clamp(raw.up, 0.0, 1.0);
        t.down = std::clamp(raw.down, 0.0, 1.0);
        t.mid = 1.0 - t.up - t.down;
        if (t.mid < 0.0) {
            t.mid = 0.0;
            double s = t.up + t.down;
            t.up /= s;
            t.down /= s;
        }
        return t;
    }
    case ProjectionScheme::PS2: {
        // Keep the variance term v=(up+down)/2, shrink the drift term to
        // the largest magnitude with all entries in [0,1].
        fired = true;
        double v = 0.5 * (raw.up + raw.down);
        double d = 0.5 * (raw.up - raw.down);
        double dmax = std::min(v, 1.0 - v);
        d = std::clamp(d, -dmax, dmax);
        return {v + d, raw.mid, v - d};
    }
    case ProjectionScheme::PS3: {
        fired = true;
        Triple t;
        t.up = std::clamp(raw.up, 0.0, 1.0);
        t.mid = std::clamp(raw.mid, 0.0, 1.0);
        t.down = std::clamp(raw.down, 0.0, 1.0);
        double s = t.up + t.mid + t.down;
        t.up /= s;
        t.mid /= s;
        t.down /= s;
        return t;
    }
    }
    throw ConfigError("unknown projection scheme");
}

CoeffSet coeffs_at(const NodeState& node, const LatticeSpec& spec,
                   const HestonParams& p, const TruncationBounds& b) {
    const NodeValues v = node_values(node, spec, p);
    return transform_coeffs(v.phi, v.psi, p, b);
}

} // namespace

TransitionKernel physical_kernel(const NodeState& node, const LatticeSpec& spec,
                                 const HestonParams& p, const TruncationBounds& b,
                                 ProjectionScheme scheme) {
    const CoeffSet c = coeffs_at(node, spec, p, b);
    const double st2 = spec.sigma_tilde * spec.sigma_tilde;

    TransitionKernel k;
    k.measure = MeasureTag::Physical;
    k.scheme = scheme;

    const double v_xi = c.sigma_phi * c.sigma_phi / (2.0 * st2);
    const double d_xi = spec.sqrt_dt * c.mu_phi / (2.0 * spec.sigma_tilde);
    k.xi_raw = {v_xi + d_xi, 1.0 - c.sigma_phi * c.sigma_phi / st2, v_xi - d_xi};

    const double v_xh = c.sigma_psi * c.sigma_psi / (2.0 * st2);
    const double d_xh = spec.sqrt_dt * c.mu_psi / (2.0 * spec.sigma_tilde);
    k.xihat_raw = {v_xh + d_xh, 1.0 - c.sigma_psi * c.sigma_psi / st2, v_xh - d_xh};

    k.xi = project(k.xi_raw, scheme, k.xi_projected, node);
    k.xihat = project(k.xihat_raw, scheme, k.xihat_projected, node);
    return k;
}

TransitionKernel martingale_kernel(const NodeState& node, const LatticeSpec& spec,
                                   const HestonParams& p, const TruncationBounds& b,
                                   const DriftFunctional& upsilon,
                                   ProjectionScheme scheme) {
    const CoeffSet c = coeffs_at(node, spec, p, b);
    const double st2 = spec.sigma_tilde * spec.sigma_tilde;
    const double ratio = c.sigma_phi * c.sigma_phi / st2;

    TransitionKernel k;
    k.measure = MeasureTag::Martingale;
    k.scheme = scheme;

    k.xi_raw = {ratio / (1.0 + spec.exp_a), 1.0 - ratio, ratio / (1.0 + spec.exp_ma)};

    const double u = upsilon(node.k, node.i);
    const double v_xh = c.sigma_psi * c.sigma_psi / (2.0 * st2);
    const double d_xh =
        spec.sqrt_dt * (u * c.sigma_psi + c.mu_psi) / (2.0 * spec.sigma_tilde);
    k.xihat_raw = {v_xh + d_xh, 1.0 - c.sigma_psi * c.sigma_psi / st2, v_xh - d_xh};

    k.xi = project(k.xi_raw, scheme, k.xi_projected, node);
    k.xihat = project(k.xihat_raw, scheme, k.xihat_projected, node);
    return k;
}

TransitionKernel kernel_at(const NodeState& node, const LatticeSpec& spec,
                           const HestonParams& p, const TruncationBounds& b,
                           MeasureTag measure, const DriftFunctional& upsilon,
                           ProjectionScheme scheme) {
    return measure == MeasureTag::Physical
               ? physical_kernel(node, spec, p, b, scheme)
               : martingale_kernel(node, spec, p, b, upsilon, scheme);
}

namespace {

// max over the clamp range of drift_num(h)/var_num(h), evaluated at the
// finitely many candidate h where the piecewise-smooth ratio can peak.
double worst_ratio_phi(const HestonParams& p, const TruncationBounds& b) {
    auto f = [&](double h) { return std::fabs(p.mu - 0.5 * h) / h; };
    double lo = b.lo2(), hi = b.hi2();
    double r = std::max(f(lo), f(hi));
    double kink = 2.0 * p.mu; // where mu_phi changes sign
    if (kink > lo && kink < hi) r = std::max(r, f(kink));
    return r;
}

double worst_ratio_psi(const HestonParams& p, const TruncationBounds& b,
                       double upsilon_bound) {
    const double one_m_r2 = 1.0 - p.rho * p.rho;
    const double c0 = (p.kappa / p.sigma) * p.theta - p.rho * p.mu;
    const double c1 = (p.kappa / p.sigma) - 0.5 * p.rho;
    auto f = [&](double h) {
        double drift = upsilon_bound * std::sqrt(one_m_r2 * h) + std::fabs(c0 - c1 * h);
        return drift / (one_m_r2 * h);
    };
    double lo = b.lo2(), hi = b.hi2();
    double r = std::max(f(lo), f(hi));
    if (c1 != 0.0) {
        double kink = c0 / c1;
        if (kink > lo && kink < hi) r = std::max(r, f(kink));
    }
    if (upsilon_bound > 0.0 && c0 != 0.0) {
        // interior stationary point of B/sqrt((1-rho^2)h) +- c0/((1-rho^2)h)
        double hc = 4.0 * c0 * c0 / (upsilon_bound * upsilon_bound * one_m_r2);
        if (hc > lo && hc < hi) r = std::max(r, f(hc));
    }
    return r;
}

} // namespace

MinValidN min_valid_n(const HestonParams& p, const TruncationBounds& b,
                      double sigma_tilde, double upsilon_bound, long long cap) {
    p.validate();
    b.validate();
    if (!(sigma_tilde >= b.sigma_hi))
        throw ConfigError("sigma_tilde must be >= sigma_hi");
    if (upsilon_bound < 0.0) throw ConfigError("upsilon bound must be >= 0");

    // Validity of all raw triples reduces to sqrt(T/n) <= var/(sigma_tilde*drift)
    // per coordinate, i.e. n >= T * sigma_tilde^2 * (drift/var)^2.
    double r = std::max(worst_ratio_phi(p, b), worst_ratio_psi(p, b, upsilon_bound));
    MinValidN out;
    if (r <= 0.0) {
        out.n = 1;
        return out;
    }
    double need = p.maturity * sigma_tilde * sigma_tilde * r * r;
    if (need > static_cast<double>(cap)) {
        out.n = cap;
        out.exceeds_cap = true;
        return out;
    }
    out.n = std::max(1LL, static_cast<long long>(std::ceil(need)));
    if (out.n > cap) out.exceeds_cap = true;
    return out;
}

} // namespace srl
