#include "landau/kernels.hpp"

#include <cmath>

#include "landau/errors.hpp"

namespace landau {

Mat eval_a(const Vec& z, const HFunction& h) {
    const auto d = z.size();
    if (d < 2) throw UnsupportedDimensionError(static_cast<int>(d));
    const double r2 = z.squaredNorm();
    const double hh = h(r2);
    Mat a = hh * (r2 * Mat::Identity(d, d) - z * z.transpose());
    return a;
}

Vec eval_b(const Vec& z, const HFunction& h) {
    const auto d = z.size();
    if (d < 2) throw UnsupportedDimensionError(static_cast<int>(d));
    return (-(double)(d - 1) * h(z.squaredNorm())) * z;
}

Mat eval_sigma(const Vec& z, const HFunction& h) {
    const auto d = z.size();
    const double s = std::sqrt(h(z.squaredNorm()));
    if (d == 2) {
        Mat sig(2, 2);
        sig << z(1), 0.0,
              -z(0), 0.0;
        return s * sig;
    }
    if (d == 3) {
        Mat sig(3, 3);
        sig <<  z(1), -z(2), 0.0,
               -z(0),  0.0,  z(2),
                0.0,   z(0), -z(1);
        return s * sig;
    }
    throw UnsupportedDimensionError(static_cast<int>(d));
}

double check_divergence_identity(const Vec& z, const HFunction& h, double fd_step) {
    if (!(fd_step > 0)) throw PreconditionError("fd_step must be positive");
    const auto d = z.size();
    const Vec b = eval_b(z, h);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        double div = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            Vec zp = z, zm = z;
            zp(j) += fd_step;
            zm(j) -= fd_step;
            div += (eval_a(zp, h)(i, j) - eval_a(zm, h)(i, j)) / (2.0 * fd_step);
        }
        worst = std::max(worst, std::abs(b(i) - div));
    }
    return worst;
}

CoefficientEval eval_coefficients(const Vec& z, const HFunction& h) {
    return CoefficientEval{eval_a(z, h), eval_b(z, h), eval_sigma(z, h), z};
}

}  // namespace landau
