#pragma once

// Concave piecewise-linear functions of the wealth proportion lambda.
// Every function here is non-decreasing, non-positive, reaches 0 at its
// last breakpoint and stays 0 afterwards (flat tail). That class is closed
// under the three operations the exact dynamic program needs: convex
// combination, argument scaling, and sup-convolution.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace srl {

class PwlConcave {
public:
    PwlConcave() : x_{0.0}, v_{0.0} {}
    PwlConcave(std::vector<double> x, std::vector<double> v);

    const std::vector<double>& breakpoints() const { return x_; }
    const std::vector<double>& values() const { return v_; }
    std::size_t size() const { return x_.size(); }

    /// Linear interpolation; exact 0 for lambda >= last breakpoint.
    double eval(double lambda) const;

    /// Terminal shortfall utility lambda -> U(lambda*price, price).
    static PwlConcave terminal_call_shortfall(double price, double strike);

    /// sum_t w_t * f_t with w_t >= 0 (kinks at the union of kinks).
    static PwlConcave combine(std::span<const std::pair<double, const PwlConcave*>> terms);

    /// g(y) = f(scale * y); breakpoints divide by scale.
    PwlConcave scaled_arg(double scale) const;

    /// (f box g)(b) = max_{0<=y<=b} f(y) + g(b - y), by descending-slope
    /// merge of the two slope profiles (exact for concave inputs).
    static PwlConcave sup_convolve(const PwlConcave& f, const PwlConcave& g);

    /// Max |min(0, second difference)| over interior breakpoints.
    double concavity_defect() const;

    /// Drops collinear interior breakpoints (relative slope tol).
    void prune(double rel_tol = 1e-12);

private:
    std::vector<double> x_; // strictly increasing, x_[0] == 0
    std::vector<double> v_; // non-decreasing, v_.back() == 0
};

} // namespace srl
