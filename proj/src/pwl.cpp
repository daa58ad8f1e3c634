#include "srlattice/pwl.hpp"

#include <algorithm>
#include <cmath>

#include "srlattice/errors.hpp"

namespace srl {

PwlConcave::PwlConcave(std::vector<double> x, std::vector<double> v)
    : x_(std::move(x)), v_(std::move(v)) {
    if (x_.empty() || x_.size() != v_.size() || x_.front() != 0.0)
        throw InvariantError("piecewise-linear function needs breakpoints starting at 0");
    for (std::size_t i = 1; i < x_.size(); ++i)
        if (!(x_[i] > x_[i - 1]))
            throw InvariantError("breakpoints must be strictly increasing");
}

double PwlConcave::eval(double lambda) const {
    if (lambda >= x_.back()) return 0.0;
    if (lambda <= 0.0) return v_.front();
    auto it = std::upper_bound(x_.begin(), x_.end(), lambda);
    std::size_t hi = static_cast<std::size_t>(it - x_.begin());
    std::size_t lo = hi - 1;
    double t = (lambda - x_[lo]) / (x_[hi] - x_[lo]);
    return v_[lo] + t * (v_[hi] - v_[lo]);
}

PwlConcave PwlConcave::terminal_call_shortfall(double price, double strike) {
    if (price <= strike) return PwlConcave();
    double kink = (price - strike) / price;
    return PwlConcave({0.0, kink}, {strike - price, 0.0});
}

PwlConcave PwlConcave::combine(
    std::span<const std::pair<double, const PwlConcave*>> terms) {
    std::vector<double> xs;
    for (const auto& [w, f] : terms) {
        if (w < 0.0) throw InvariantError("combine weights must be non-negative");
        if (w == 0.0) continue;
        xs.insert(xs.end(), f->breakpoints().begin(), f->breakpoints().end());
    }
    if (xs.empty()) return PwlConcave();
    std::sort(xs.begin(), xs.end());
    std::vector<double> ux;
    ux.reserve(xs.size());
    for (double x : xs)
        if (ux.empty() || x > ux.back() + 1e-15) ux.push_back(x);

    std::vector<double> vs(ux.size(), 0.0);
    for (const auto& [w, f] : terms) {
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < ux.size(); ++i) vs[i] += w * f->eval(ux[i]);
    }
    PwlConcave r(std::move(ux), std::move(vs));
    r.prune();
    return r;
}

PwlConcave PwlConcave::scaled_arg(double scale) const {
    std::vector<double> x(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) x[i] = x_[i] / scale;
    return PwlConcave(std::move(x), v_);
}

PwlConcave PwlConcave::sup_convolve(const PwlConcave& f, const PwlConcave& g) {
    struct Piece {
        double slope, width;
    };
    auto pieces = [](const PwlConcave& h) {
        std::vector<Piece> p;
        const auto& x = h.breakpoints();
        const auto& v = h.values();
        p.reserve(x.size());
        for (std::size_t i = 1; i < x.size(); ++i) {
            double w = x[i] - x[i - 1];
            p.push_back({(v[i] - v[i - 1]) / w, w});
        }
        return p;
    };
    std::vector<Piece> pf = pieces(f), pg = pieces(g);

    std::vector<double> x{0.0}, v{f.values().front() + g.values().front()};
    std::size_t a = 0, b = 0;
    double cx = 0.0, cv = v[0];
    while (a < pf.size() || b < pg.size()) {
        // descending-slope merge; ties go to f for a fixed order
        bool take_f = b >= pg.size() || (a < pf.size() && pf[a].slope >= pg[b].slope);
        const Piece& p = take_f ? pf[a++] : pg[b++];
        cx += p.width;
        cv += p.slope * p.width;
        x.push_back(cx);
        v.push_back(cv);
    }
    v.back() = 0.0; // exact in exact arithmetic; kill the rounding residue
    PwlConcave r(std::move(x), std::move(v));
    r.prune();
    return r;
}

double PwlConcave::concavity_defect() const {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < x_.size(); ++i) {
        double sl = (v_[i] - v_[i - 1]) / (x_[i] - x_[i - 1]);
        double sr = (v_[i + 1] - v_[i]) / (x_[i + 1] - x_[i]);
        worst = std::max(worst, sr - sl);
    }
    return worst;
}

void PwlConcave::prune(double rel_tol) {
    if (x_.size() < 3) return;
    std::vector<double> x{x_[0]}, v{v_[0]};
    for (std::size_t i = 1; i + 1 < x_.size(); ++i) {
        double sl = (v_[i] - v.back()) / (x_[i] - x.back());
        double sr = (v_[i + 1] - v_[i]) / (x_[i + 1] - x_[i]);
        double scale = std::max({std::fabs(sl), std::fabs(sr), 1.0});
        if (std::fabs(sl - sr) > rel_tol * scale) {
            x.push_back(x_[i]);
            v.push_back(v_[i]);
        }
    }
    x.push_back(x_.back());
    v.push_back(v_.back());
    x_ = std::move(x);
    v_ = std::move(v);
}

} // namespace srl
