#include "landau/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "landau/errors.hpp"
#include "landau/rng.hpp"

namespace landau {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& w) {
    if (x.size() != y.size() || x.size() < 2)
        throw PreconditionError("linear_fit needs >= 2 paired points");
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
        sxx += wi * x[i] * x[i];
        sxy += wi * x[i] * y[i];
    }
    const double denom = sw * sxx - sx * sx;
    LinearFit fit;
    fit.slope = (sw * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / sw;
    return fit;
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& X,
                                  const std::vector<double>& y,
                                  const std::vector<double>& w) {
    const auto n = static_cast<Eigen::Index>(X.size());
    if (n == 0) throw PreconditionError("least_squares: empty design");
    const auto k = static_cast<Eigen::Index>(X[0].size());
    Eigen::MatrixXd A(n, k);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double wi = w.empty() ? 1.0 : std::sqrt(w[i]);
        for (Eigen::Index j = 0; j < k; ++j) A(i, j) = wi * X[i][j];
        b(i) = wi * y[i];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    return std::vector<double>(c.data(), c.data() + k);
}

double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double standard_error(const std::vector<double>& v) {
    return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw PreconditionError("quantile of empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<size_t>(pos);
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1 - frac) + v[hi] * frac;
}

BootstrapCI bootstrap_slope_ci(const std::vector<double>& x,
                               const std::vector<std::vector<double>>& samples,
                               int n_boot, double level, uint64_t seed) {
    if (x.size() != samples.size() || x.size() < 3)
        throw PreconditionError("bootstrap_slope_ci needs >= 3 abscissae");
    std::vector<double> ymean(x.size());
    for (size_t i = 0; i < x.size(); ++i) ymean[i] = std::log(mean(samples[i]));
    const double est = linear_fit(x, ymean).slope;

    const RngStream rng(seed, "bootstrap");
    std::vector<double> slopes(n_boot);
    std::vector<double> yb(x.size());
    for (int b = 0; b < n_boot; ++b) {
        for (size_t i = 0; i < x.size(); ++i) {
            const auto& s = samples[i];
            const auto n = static_cast<uint64_t>(s.size());
            double acc = 0;
            for (uint64_t r = 0; r < n; ++r) {
                const auto idx = static_cast<uint64_t>(
                    rng.uniform((static_cast<uint64_t>(b) << 32) | i, r) * n);
                acc += s[std::min<uint64_t>(idx, n - 1)];
            }
            yb[i] = std::log(acc / static_cast<double>(n));
        }
        slopes[b] = linear_fit(x, yb).slope;
    }
    const double alpha = (1.0 - level) / 2.0;
    return BootstrapCI{est, quantile(slopes, alpha), quantile(slopes, 1.0 - alpha)};
}

}  // namespace landau
