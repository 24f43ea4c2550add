#include "sci/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sci {

double psnr(const DataCube& reference, const DataCube& estimate, double peak) {
    if (!reference.same_shape(estimate))
        throw ArgumentError("psnr: dimension mismatch");
    if (!(peak > 0.0))
        throw ArgumentError("psnr: peak must be > 0");
    double mse = 0.0;
    for (size_t i = 0; i < reference.size(); ++i) {
        const double d = reference.data()[i] - estimate.data()[i];
        mse += d * d;
    }
    mse /= static_cast<double>(reference.size());
    if (mse == 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(peak * peak / mse));
}

namespace {

constexpr int kWin = 11;

std::vector<double> gaussian_window() {
    std::vector<double> w(kWin * kWin);
    const double sigma = 1.5;
    double sum = 0.0;
    for (int j = 0; j < kWin; ++j)
        for (int i = 0; i < kWin; ++i) {
            const double dx = i - kWin / 2, dy = j - kWin / 2;
            w[i + kWin * j] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            sum += w[i + kWin * j];
        }
    for (double& v : w) v /= sum;
    return w;
}

double ssim_frame(const DataCube& a, const DataCube& b, int k, const std::vector<double>& w) {
    const int nx = a.nx(), ny = a.ny();
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;  // dynamic range 1
    double acc = 0.0;
    int count = 0;
    for (int j0 = 0; j0 + kWin <= ny; ++j0) {
        for (int i0 = 0; i0 + kWin <= nx; ++i0) {
            double mu_a = 0, mu_b = 0, sa = 0, sb = 0, sab = 0;
            for (int j = 0; j < kWin; ++j)
                for (int i = 0; i < kWin; ++i) {
                    const double wij = w[i + kWin * j];
                    const double va = a(i0 + i, j0 + j, k);
                    const double vb = b(i0 + i, j0 + j, k);
                    mu_a += wij * va;
                    mu_b += wij * vb;
                    sa += wij * va * va;
                    sb += wij * vb * vb;
                    sab += wij * va * vb;
                }
            const double var_a = sa - mu_a * mu_a;
            const double var_b = sb - mu_b * mu_b;
            const double cov = sab - mu_a * mu_b;
            acc += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
                   ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            ++count;
        }
    }
    return acc / count;
}

}  // namespace

double ssim(const DataCube& reference, const DataCube& estimate) {
    if (!reference.same_shape(estimate))
        throw ArgumentError("ssim: dimension mismatch");
    if (reference.nx() < kWin || reference.ny() < kWin)
        throw ArgumentError("ssim: frames must be at least 11x11");
    static const std::vector<double> w = gaussian_window();
    double acc = 0.0;
    for (int k = 0; k < reference.nt(); ++k)
        acc += ssim_frame(reference, estimate, k, w);
    return acc / reference.nt();
}

}  // namespace sci
