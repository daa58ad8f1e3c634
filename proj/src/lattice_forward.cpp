#include "srlattice/lattice_forward.hpp"

namespace srl {

std::vector<double> forward_joint_distribution(const LatticeSpec& spec,
                                               const HestonParams& p,
                                               const TruncationBounds& b,
                                               MeasureTag measure,
                                               const DriftFunctional& upsilon,
                                               ProjectionScheme scheme) {
    std::vector<double> mass{1.0};
    std::vector<double> next;
    for (int k = 0; k < spec.n; ++k) {
        const int w = 2 * k + 1;
        const int wn = w + 2;
        next.assign(static_cast<std::size_t>(wn) * wn, 0.0);
        for (int i = -k; i <= k; ++i) {
            for (int j = -k; j <= k; ++j) {
                double m = mass[static_cast<std::size_t>(i + k) * w + (j + k)];
                if (m == 0.0) continue;
                TransitionKernel ker =
                    kernel_at({k, i, j}, spec, p, b, measure, upsilon, scheme);
                const double px[3] = {ker.xi.down, ker.xi.mid, ker.xi.up};
                const double pq[3] = {ker.xihat.down, ker.xihat.mid, ker.xihat.up};
                for (int di = -1; di <= 1; ++di) {
                    const double mp = m * px[di + 1];
                    if (mp == 0.0) continue;
                    double* row =
                        next.data() + static_cast<std::size_t>(i + di + k + 1) * wn;
                    for (int dj = -1; dj <= 1; ++dj)
                        row[j + dj + k + 1] += mp * pq[dj + 1];
                }
            }
        }
        mass.swap(next);
    }
    return mass;
}

std::vector<double> marginal_phi(const std::vector<double>& joint, int n) {
    const int w = 2 * n + 1;
    std::vector<double> pmf(static_cast<std::size_t>(w), 0.0);
    for (int i = 0; i < w; ++i) {
        double s = 0.0;
        for (int j = 0; j < w; ++j) s += joint[static_cast<std::size_t>(i) * w + j];
        pmf[static_cast<std::size_t>(i)] = s;
    }
    return pmf;
}

} // namespace srl
