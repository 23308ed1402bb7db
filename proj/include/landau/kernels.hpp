#pragma once

#include <Eigen/Dense>

#include "landau/hfunction.hpp"

namespace landau {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Collision coefficients evaluated at a displacement z:
//   a_ij(z) = h(|z|^2) (|z|^2 delta_ij - z_i z_j)
//   b_i(z)  = -(d-1) h(|z|^2) z_i
//   sigma(z) explicit square root with sigma sigma^* = a, given for d = 2, 3.
//
// a and b accept any d >= 2; sigma only d in {2,3}.

Mat eval_a(const Vec& z, const HFunction& h);
Vec eval_b(const Vec& z, const HFunction& h);
Mat eval_sigma(const Vec& z, const HFunction& h);

// max_i |b_i(z) - sum_j d/dz_j a_ij(z)| with the partials taken by central
// finite differences of step fd_step. Meaningful as an identity check for
// constant h; for non-constant h the extra h' term cancels algebraically,
// so the residual stays at finite-difference size there too.
double check_divergence_identity(const Vec& z, const HFunction& h, double fd_step);

struct CoefficientEval {
    Mat a;
    Vec b;
    Mat sigma;
    Vec z;
};

CoefficientEval eval_coefficients(const Vec& z, const HFunction& h);

// ---- flat-array fast paths used by the O(P^2) simulator loops ----

namespace detail {

// accumulate a(xi - xj) into A (row-major d x d) and b(xi - xj) into B
template <int D>
inline void accum_ab(const double* xi, const double* xj, const HFunction& h,
                     double* A, double* B) {
    double z[D];
    double r2 = 0.0;
    for (int k = 0; k < D; ++k) {
        z[k] = xi[k] - xj[k];
        r2 += z[k] * z[k];
    }
    const double hh = h(r2);
    const double bc = -(D - 1) * hh;
    for (int i = 0; i < D; ++i) {
        B[i] += bc * z[i];
        A[i * D + i] += hh * (r2 - z[i] * z[i]);
        for (int j = i + 1; j < D; ++j) {
            const double off = -hh * z[i] * z[j];
            A[i * D + j] += off;
            A[j * D + i] += off;
        }
    }
}

// accumulate only b(xi - xj) into B
template <int D>
inline void accum_b(const double* xi, const double* xj, const HFunction& h, double* B) {
    double z[D];
    double r2 = 0.0;
    for (int k = 0; k < D; ++k) {
        z[k] = xi[k] - xj[k];
        r2 += z[k] * z[k];
    }
    const double bc = -(D - 1) * h(r2);
    for (int k = 0; k < D; ++k) B[k] += bc * z[k];
}

// y += sigma(xi - xj) * w, with w a d-vector of noise
template <int D>
inline void accum_sigma_mul(const double* xi, const double* xj, const HFunction& h,
                            const double* w, double* y);

template <>
inline void accum_sigma_mul<2>(const double* xi, const double* xj, const HFunction& h,
                               const double* w, double* y) {
    const double z0 = xi[0] - xj[0], z1 = xi[1] - xj[1];
    const double s = std::sqrt(h(z0 * z0 + z1 * z1));
    y[0] += s * z1 * w[0];
    y[1] += -s * z0 * w[0];
}

template <>
inline void accum_sigma_mul<3>(const double* xi, const double* xj, const HFunction& h,
                               const double* w, double* y) {
    const double z0 = xi[0] - xj[0], z1 = xi[1] - xj[1], z2 = xi[2] - xj[2];
    const double s = std::sqrt(h(z0 * z0 + z1 * z1 + z2 * z2));
    y[0] += s * (z1 * w[0] - z2 * w[1]);
    y[1] += s * (-z0 * w[0] + z2 * w[2]);
    y[2] += s * (z0 * w[1] - z1 * w[2]);
}

}  // namespace detail

}  // namespace landau
