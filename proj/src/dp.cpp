#include "srlattice/dp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "srlattice/lattice_forward.hpp"
#include "srlattice/parallel.hpp"
#include "srlattice/sha256.hpp"

namespace srl {

double payoff_shortfall(double wealth, double price, double strike) {
    double payoff = std::max(price - strike, 0.0);
    return -std::max(payoff - wealth, 0.0);
}

double control_upper(double lambda, double a) {
    return std::min(1.0, lambda * (1.0 + std::exp(a)));
}

double lambda_up(double lambda, double c, double a, int M, RoundMode mode) {
    const double ema = std::exp(-a);
    if (c > control_upper(lambda, a) + 1e-12)
        throw InvariantError("control above the feasible upper endpoint");
    double inner = lambda * (1.0 + ema) - c * ema;
    if (inner < -1e-12)
        throw InvariantError("admissibility violated: negative post-trade wealth");
    inner = std::max(inner, 0.0);
    switch (mode) {
    case RoundMode::Exact:
        return std::min(1.0, inner);
    case RoundMode::Floor:
        return std::min(1.0, std::floor(inner * M) / M);
    case RoundMode::CeilPlus:
        return std::min(1.0, (std::ceil(inner * M) + 1.0) / M);
    case RoundMode::CeilOnly:
        return std::min(1.0, std::ceil(inner * M) / M);
    }
    throw ConfigError("unknown rounding mode");
}

std::array<unsigned char, 32> instance_digest(const HestonParams& p,
                                              const TruncationBounds& b,
                                              const LatticeSpec& spec, int M,
                                              ProjectionScheme scheme) {
    Sha256 h;
    auto put_d = [&h](double x) { h.update(&x, sizeof x); };
    auto put_i = [&h](std::int64_t x) { h.update(&x, sizeof x); };
    put_d(p.mu); put_d(p.kappa); put_d(p.theta); put_d(p.sigma); put_d(p.rho);
    put_d(p.s0); put_d(p.nu0); put_d(p.maturity); put_d(p.strike);
    put_d(b.sigma_lo); put_d(b.sigma_hi);
    put_i(spec.n);
    put_d(spec.sigma_tilde);
    put_i(M);
    put_i(static_cast<std::int64_t>(scheme));
    return h.finish();
}

ValueSlice ValueSlice::zeros(int k, BoundSide bound, int M, Precision prec,
                             const std::array<unsigned char, 32>& digest) {
    ValueSlice s;
    s.k = k;
    s.bound = bound;
    s.M = M;
    s.precision = prec;
    s.params_digest = digest;
    if (prec == Precision::F64)
        s.f64_.assign(s.count(), 0.0);
    else
        s.f32_.assign(s.count(), 0.0f);
    return s;
}

bool ValueSlice::same_payload(const ValueSlice& other) const {
    if (k != other.k || M != other.M || precision != other.precision) return false;
    if (precision == Precision::F64)
        return std::memcmp(f64_.data(), other.f64_.data(),
                           f64_.size() * sizeof(double)) == 0;
    return std::memcmp(f32_.data(), other.f32_.data(),
                       f32_.size() * sizeof(float)) == 0;
}

namespace {

// Node-independent rounding tables for the post-trade wealth index.
// With lambda = m/M and c = cm/M the inner expression of the up-move map
// times M equals m + (m - cm) * e^{-a}, so everything reduces to integer
// index arithmetic plus one floor/ceil.
struct StepTables {
    int M = 0;
    std::vector<int> cmax;        // largest feasible control index per m
    std::vector<std::int32_t> up; // (M+1)x(M+1) post-trade index
};

StepTables build_tables(const LatticeSpec& spec, int M, BoundSide bound,
                        RoundMode plus_mode) {
    StepTables t;
    t.M = M;
    t.cmax.resize(M + 1);
    t.up.assign(static_cast<std::size_t>(M + 1) * (M + 1), 0);
    const double one_plus_ea = 1.0 + spec.exp_a;
    for (int m = 0; m <= M; ++m) {
        t.cmax[m] = std::min<int>(M, static_cast<int>(std::floor(m * one_plus_ea)));
        std::int32_t* row = t.up.data() + static_cast<std::size_t>(m) * (M + 1);
        for (int c = 0; c <= t.cmax[m]; ++c) {
            double y = (m - c) * spec.exp_ma;
            double inner = std::max(0.0, m + y); // clamp before rounding
            long idx;
            if (bound == BoundSide::Minus)
                idx = static_cast<long>(std::floor(inner));
            else if (plus_mode == RoundMode::CeilOnly)
                idx = static_cast<long>(std::ceil(inner));
            else
                idx = static_cast<long>(std::ceil(inner)) + 1;
            row[c] = static_cast<std::int32_t>(std::min<long>(M, idx));
        }
    }
    return t;
}

template <class T>
void fill_terminal(ValueSlice& slice, const LatticeSpec& spec,
                   const HestonParams& p, T* data, int threads) {
    const int n = slice.k;
    const int M = slice.M;
    const int w = slice.width();
    std::vector<double> lam(M + 1);
    for (int m = 0; m <= M; ++m) lam[m] = static_cast<double>(m) / M;
    parallel_for(static_cast<std::size_t>(w), threads, [&](std::size_t row) {
        const int i = static_cast<int>(row) - n;
        const double price = p.s0 * std::exp(i * spec.step);
        for (int j = -n; j <= n; ++j) {
            T* out = data + slice.index(i, j, 0);
            for (int m = 0; m <= M; ++m)
                out[m] = static_cast<T>(
                    payoff_shortfall(lam[m] * price, price, p.strike));
        }
    });
}

template <class T>
void dp_step(int k, const ValueSlice& next_slice, const T* next, ValueSlice& cur_slice,
             T* cur, const LatticeSpec& spec, const HestonParams& p,
             const TruncationBounds& b, const StepTables& tab,
             ProjectionScheme scheme, int threads) {
    const int M = tab.M;
    const int cols = M + 1;
    const int wn = next_slice.width();

    parallel_for(static_cast<std::size_t>(2 * k + 1), threads, [&](std::size_t row) {
        const int i = static_cast<int>(row) - k;
        static thread_local std::vector<double> scratch;
        scratch.resize(3 * static_cast<std::size_t>(cols));
        double* H = scratch.data();

        for (int j = -k; j <= k; ++j) {
            const TransitionKernel ker =
                physical_kernel({k, i, j}, spec, p, b, scheme);
            const double qd = ker.xihat.down, qm = ker.xihat.mid, qu = ker.xihat.up;

            // H[t][m'] = E over the psi move of J_{k+1}(i+t-1, ., m'),
            // accumulated in ascending psi order (down, mid, up).
            for (int t = 0; t < 3; ++t) {
                const int ii = i + (t - 1);
                const T* bd = next + ((static_cast<std::size_t>(ii + k + 1) * wn) +
                                      (j - 1 + k + 1)) * cols;
                const T* bm = bd + cols;
                const T* bu = bm + cols;
                double* h = H + static_cast<std::size_t>(t) * cols;
                for (int m = 0; m < cols; ++m)
                    h[m] = qd * static_cast<double>(bd[m]) +
                           qm * static_cast<double>(bm[m]) +
                           qu * static_cast<double>(bu[m]);
            }

            const double pd = ker.xi.down, pm = ker.xi.mid, pu = ker.xi.up;
            const double* H0 = H;
            const double* H1 = H + cols;
            const double* H2 = H + 2 * static_cast<std::size_t>(cols);
            T* out = cur + cur_slice.index(i, j, 0);
            for (int m = 0; m < cols; ++m) {
                const double base = pm * H1[m];
                const std::int32_t* urow =
                    tab.up.data() + static_cast<std::size_t>(m) * cols;
                const int cmax = tab.cmax[m];
                double best = -std::numeric_limits<double>::infinity();
                for (int c = 0; c <= cmax; ++c) {
                    double v = pd * H0[c] + base + pu * H2[urow[c]];
                    if (v > best) best = v;
                }
                out[m] = static_cast<T>(best);
            }
        }
    });
}

std::string checkpoint_path(const std::string& dir, BoundSide bound) {
    return dir + "/ckpt_" +
           (bound == BoundSide::Minus ? std::string("minus") : std::string("plus")) +
           ".bin";
}

} // namespace

ValueSlice dp_grid(const LatticeSpec& spec, const HestonParams& p,
                   const TruncationBounds& b, int M, BoundSide bound,
                   const DpOptions& options) {
    if (M < 1) throw ConfigError("control grid needs M >= 1");
    const auto digest = instance_digest(p, b, spec, M, options.projection);
    const StepTables tab = build_tables(spec, M, bound, options.plus_mode);
    const int threads = resolve_threads(options.threads);

    ValueSlice slice;
    if (options.resume) {
        if (options.checkpoint_dir.empty())
            throw CheckpointError("resume requested without a checkpoint directory");
        slice = checkpoint_load(checkpoint_path(options.checkpoint_dir, bound));
        if (slice.params_digest != digest)
            throw CheckpointError("checkpoint digest does not match this instance");
        if (slice.M != M || slice.bound != bound || slice.k > spec.n ||
            slice.precision != options.precision)
            throw CheckpointError("checkpoint header does not match this instance");
    } else {
        slice = ValueSlice::zeros(spec.n, bound, M, options.precision, digest);
        if (options.precision == Precision::F64)
            fill_terminal(slice, spec, p, slice.data64().data(), threads);
        else
            fill_terminal(slice, spec, p, slice.data32().data(), threads);
    }
    if (options.on_slice) options.on_slice(slice);

    for (int k = slice.k - 1; k >= 0; --k) {
        ValueSlice cur = ValueSlice::zeros(k, bound, M, options.precision, digest);
        if (options.precision == Precision::F64)
            dp_step(k, slice, slice.data64().data(), cur, cur.data64().data(), spec,
                    p, b, tab, options.projection, threads);
        else
            dp_step(k, slice, slice.data32().data(), cur, cur.data32().data(), spec,
                    p, b, tab, options.projection, threads);
        slice = std::move(cur);
        if (!options.checkpoint_dir.empty() && k > 0 &&
            (spec.n - k) % std::max(1, options.checkpoint_every) == 0)
            checkpoint_save(slice, checkpoint_path(options.checkpoint_dir, bound));
        if (options.on_slice) options.on_slice(slice);
        if (options.progress) options.progress(k);
    }
    return slice;
}

PwlConcave dp_exact_pwl(const LatticeSpec& spec, const HestonParams& p,
                        const TruncationBounds& b, ProjectionScheme scheme,
                        std::size_t breakpoint_budget) {
    if (spec.n > 8)
        throw ConfigError("exact recursion supports n <= 8 (breakpoints grow exponentially)");
    const int n = spec.n;
    auto at = [](int k, int i, int j) {
        int w = 2 * k + 1;
        return static_cast<std::size_t>(i + k) * w + (j + k);
    };

    std::vector<PwlConcave> next(static_cast<std::size_t>(2 * n + 1) * (2 * n + 1));
    for (int i = -n; i <= n; ++i) {
        PwlConcave terminal = PwlConcave::terminal_call_shortfall(
            p.s0 * std::exp(i * spec.step), p.strike);
        for (int j = -n; j <= n; ++j) next[at(n, i, j)] = terminal;
    }

    for (int k = n - 1; k >= 0; --k) {
        std::vector<PwlConcave> cur(static_cast<std::size_t>(2 * k + 1) * (2 * k + 1));
        std::size_t total = 0;
        for (int i = -k; i <= k; ++i) {
            for (int j = -k; j <= k; ++j) {
                const TransitionKernel ker =
                    physical_kernel({k, i, j}, spec, p, b, scheme);
                PwlConcave G[3];
                for (int t = 0; t < 3; ++t) {
                    const int ii = i + (t - 1);
                    std::pair<double, const PwlConcave*> terms[3] = {
                        {ker.xihat.down, &next[at(k + 1, ii, j - 1)]},
                        {ker.xihat.mid, &next[at(k + 1, ii, j)]},
                        {ker.xihat.up, &next[at(k + 1, ii, j + 1)]}};
                    G[t] = PwlConcave::combine(terms);
                }
                // V(lambda) = max over feasible c of
                //   p_down*G[-1](c) + p_up*G[+1](1 ^ (b(lambda) - c e^{-a}))
                // solved as a sup-convolution in b = lambda (1 + e^{-a}).
                std::pair<double, const PwlConcave*> fw[1] = {{ker.xi.down, &G[0]}};
                PwlConcave fhat = PwlConcave::combine(fw).scaled_arg(spec.exp_a);
                std::pair<double, const PwlConcave*> gw[1] = {{ker.xi.up, &G[2]}};
                PwlConcave g = PwlConcave::combine(gw);
                PwlConcave m = PwlConcave::sup_convolve(fhat, g);
                PwlConcave V = m.scaled_arg(1.0 + spec.exp_ma);
                std::pair<double, const PwlConcave*> jt[2] = {{1.0, &V},
                                                              {ker.xi.mid, &G[1]}};
                cur[at(k, i, j)] = PwlConcave::combine(jt);
                total += cur[at(k, i, j)].size();
                if (total > breakpoint_budget)
                    throw InvariantError("breakpoint budget exceeded in exact recursion");
            }
        }
        next = std::move(cur);
    }
    return next[0];
}

double unhedged_value(const LatticeSpec& spec, const HestonParams& p,
                      const TruncationBounds& b, ProjectionScheme scheme,
                      double x) {
    auto joint = forward_joint_distribution(spec, p, b, MeasureTag::Physical,
                                            DriftFunctional::zero(), scheme);
    auto pmf = marginal_phi(joint, spec.n);
    double total = 0.0;
    for (int i = -spec.n; i <= spec.n; ++i) {
        double price = p.s0 * std::exp(i * spec.step);
        double payoff = std::max(price - p.strike, 0.0);
        total += pmf[static_cast<std::size_t>(i + spec.n)] *
                 std::max(payoff - x, 0.0);
    }
    return -total;
}

SandwichResult sandwich_at(const LatticeSpec& spec, const HestonParams& p,
                           const TruncationBounds& b, int M, double x,
                           const DpOptions& options) {
    const double lam = x / p.s0;
    const long m = std::lround(lam * M);
    if (m < 0 || m > M || std::fabs(lam - static_cast<double>(m) / M) > 1e-12)
        throw ConfigError("x/s0 is not on the control grid (no interpolation)");
    SandwichResult r;
    r.x = x;
    r.j_minus = dp_grid(spec, p, b, M, BoundSide::Minus, options)
                    .get(0, 0, static_cast<int>(m));
    r.j_plus = dp_grid(spec, p, b, M, BoundSide::Plus, options)
                   .get(0, 0, static_cast<int>(m));
    return r;
}

namespace {

constexpr char kMagic[8] = {'S', 'R', 'L', 'S', 'L', 'C', 'E', '1'};

struct CkptHeader {
    char magic[8];
    std::uint32_t version;
    unsigned char digest[32];
    std::int32_t n_unused; // reserved
    std::int32_t M;
    std::int32_t k;
    std::uint8_t bound;
    std::uint8_t precision;
    std::uint16_t pad;
};

} // namespace

void checkpoint_save(const ValueSlice& slice, const std::string& path) {
    namespace fs = std::filesystem;
    CkptHeader h{};
    std::memcpy(h.magic, kMagic, 8);
    h.version = 1;
    std::memcpy(h.digest, slice.params_digest.data(), 32);
    h.n_unused = 0;
    h.M = slice.M;
    h.k = slice.k;
    h.bound = slice.bound == BoundSide::Minus ? 0 : 1;
    h.precision = slice.precision == Precision::F64 ? 0 : 1;
    h.pad = 0;

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError("cannot open checkpoint file for writing: " + tmp);
        out.write(reinterpret_cast<const char*>(&h), sizeof h);
        if (slice.precision == Precision::F64)
            out.write(reinterpret_cast<const char*>(slice.data64().data()),
                      static_cast<std::streamsize>(slice.count() * sizeof(double)));
        else
            out.write(reinterpret_cast<const char*>(slice.data32().data()),
                      static_cast<std::streamsize>(slice.count() * sizeof(float)));
        if (!out) throw CheckpointError("short write to checkpoint file: " + tmp);
    }
    fs::rename(tmp, path);
}

ValueSlice checkpoint_load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint file: " + path);
    CkptHeader h{};
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in || std::memcmp(h.magic, kMagic, 8) != 0)
        throw CheckpointError("not a checkpoint file: " + path);
    if (h.version != 1)
        throw CheckpointError("unsupported checkpoint version");
    if (h.k < 0 || h.M < 1) throw CheckpointError("corrupt checkpoint header");

    std::array<unsigned char, 32> digest;
    std::memcpy(digest.data(), h.digest, 32);
    ValueSlice s = ValueSlice::zeros(h.k, h.bound == 0 ? BoundSide::Minus : BoundSide::Plus,
                                     h.M, h.precision == 0 ? Precision::F64 : Precision::F32,
                                     digest);
    if (s.precision == Precision::F64)
        in.read(reinterpret_cast<char*>(s.data64().data()),
                static_cast<std::streamsize>(s.count() * sizeof(double)));
    else
        in.read(reinterpret_cast<char*>(s.data32().data()),
                static_cast<std::streamsize>(s.count() * sizeof(float)));
    if (!in || in.gcount() != static_cast<std::streamsize>(
                                  s.count() * (s.precision == Precision::F64
                                                   ? sizeof(double)
                                                   : sizeof(float))))
        throw CheckpointError("truncated checkpoint file: " + path);
    return s;
}

} // namespace srl
