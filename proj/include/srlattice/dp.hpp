#pragma once

// Backward dynamic programming for shortfall-risk minimization on the
// lattice: the two-sided grid recursion J(+-), the exact piecewise-linear
// recursion for tiny n, the unhedged reference value, sandwich evaluation
// and checkpointing.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "srlattice/model.hpp"
#include "srlattice/pwl.hpp"

namespace srl {

/// Wealth-proportion grid GR = {0, 1/M, ..., 1}.
struct ControlGrid {
    int M = 1;
    double value(int idx) const { return static_cast<double>(idx) / M; }
    int size() const { return M + 1; }
};

enum class BoundSide { Minus, Plus };
enum class RoundMode { Exact, Floor, CeilPlus, CeilOnly };
enum class Precision { F64, F32 };

/// U(v, s) = -((s - K)^+ - v)^+.
double payoff_shortfall(double wealth, double price, double strike);

/// Upper endpoint of the feasible control interval A(lambda).
double control_upper(double lambda, double a);

/// Post-trade wealth proportion after an up move, Exact / Floor / CeilPlus
/// (the grid modes round onto GR; CeilOnly is the sensitivity variant
/// without the extra +1/M).
double lambda_up(double lambda, double c, double a, int M, RoundMode mode);

/// Digest identifying a DP problem instance (parameters, bounds, lattice
/// geometry, control grid and projection scheme).
std::array<unsigned char, 32> instance_digest(const HestonParams& p,
                                              const TruncationBounds& b,
                                              const LatticeSpec& spec, int M,
                                              ProjectionScheme scheme);

/// Value function at one time step, indexed by (i, j, lambda-index).
class ValueSlice {
public:
    int k = 0;
    BoundSide bound = BoundSide::Minus;
    int M = 0;
    Precision precision = Precision::F64;
    std::array<unsigned char, 32> params_digest{};

    static ValueSlice zeros(int k, BoundSide bound, int M, Precision prec,
                            const std::array<unsigned char, 32>& digest);

    int width() const { return 2 * k + 1; }
    std::size_t count() const {
        return static_cast<std::size_t>(width()) * width() * (M + 1);
    }
    std::size_t index(int i, int j, int m) const {
        return (static_cast<std::size_t>(i + k) * width() +
                static_cast<std::size_t>(j + k)) *
                   (M + 1) +
               static_cast<std::size_t>(m);
    }
    double get(int i, int j, int m) const {
        std::size_t ix = index(i, j, m);
        return precision == Precision::F64 ? f64_[ix]
                                           : static_cast<double>(f32_[ix]);
    }
    void set(int i, int j, int m, double v) {
        std::size_t ix = index(i, j, m);
        if (precision == Precision::F64)
            f64_[ix] = v;
        else
            f32_[ix] = static_cast<float>(v);
    }

    const std::vector<double>& data64() const { return f64_; }
    const std::vector<float>& data32() const { return f32_; }
    std::vector<double>& data64() { return f64_; }
    std::vector<float>& data32() { return f32_; }

    bool same_payload(const ValueSlice& other) const;

private:
    std::vector<double> f64_;
    std::vector<float> f32_;
};

struct DpOptions {
    ProjectionScheme projection = ProjectionScheme::PS1;
    Precision precision = Precision::F64;
    int threads = 0;                            // 0 = hardware concurrency
    RoundMode plus_mode = RoundMode::CeilPlus;  // CeilOnly for sensitivity runs
    std::string checkpoint_dir;                 // empty = no checkpointing
    int checkpoint_every = 1;                   // steps between checkpoints
    bool resume = false;                        // resume from checkpoint_dir
    std::function<void(int k)> progress;        // called after each step
    std::function<void(const ValueSlice&)> on_slice; // inspection hook
};

/// Backward induction from k = n to 0; returns the k = 0 slice holding
/// J(bound, 0, 0, lambda) for every lambda in GR.
ValueSlice dp_grid(const LatticeSpec& spec, const HestonParams& p,
                   const TruncationBounds& b, int M, BoundSide bound,
                   const DpOptions& options = {});

/// Exact continuous-control value function at the root node, n <= 8.
PwlConcave dp_exact_pwl(const LatticeSpec& spec, const HestonParams& p,
                        const TruncationBounds& b, ProjectionScheme scheme,
                        std::size_t breakpoint_budget = 4'000'000);

/// Lattice unhedged reference -E[((S_T - K)^+ - x)^+] under P_n.
double unhedged_value(const LatticeSpec& spec, const HestonParams& p,
                      const TruncationBounds& b, ProjectionScheme scheme,
                      double x);

struct SandwichResult {
    double x = 0;
    double j_minus = 0, j_plus = 0;
    double width() const { return j_plus - j_minus; }
};

/// Runs both bounds at lambda = x/s0 (must lie on GR within 1e-12).
SandwichResult sandwich_at(const LatticeSpec& spec, const HestonParams& p,
                           const TruncationBounds& b, int M, double x,
                           const DpOptions& options = {});

void checkpoint_save(const ValueSlice& slice, const std::string& path);
ValueSlice checkpoint_load(const std::string& path);

} // namespace srl
