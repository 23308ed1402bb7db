#pragma once

#include <cstdint>
#include <vector>

namespace landau {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// ordinary / weighted least squares of y on x (weights optional)
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& w = {});

// multiple linear regression: y ~ columns of X (X row-major, n x k), returns k coefficients
std::vector<double> least_squares(const std::vector<std::vector<double>>& X,
                                  const std::vector<double>& y,
                                  const std::vector<double>& w = {});

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased
double standard_error(const std::vector<double>& v);

// empirical quantile (linear interpolation), q in [0,1]
double quantile(std::vector<double> v, double q);

struct BootstrapCI {
    double estimate;
    double lo;
    double hi;
};

// percentile bootstrap CI for the slope of log(mean of samples per x) vs x.
// samples[i] holds the replica values observed at x[i].
BootstrapCI bootstrap_slope_ci(const std::vector<double>& x,
                               const std::vector<std::vector<double>>& samples,
                               int n_boot, double level, uint64_t seed);

}  // namespace landau
