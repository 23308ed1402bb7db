#pragma once

#include <string>
#include <vector>

#include "landau/density.hpp"
#include "landau/model.hpp"

namespace landau {

// Free constants of the Gaussian-type density envelopes and the log-tail
// bound. The theory guarantees existence only; values are fitted on a data
// split disjoint from the one they are tested on.
struct EnvelopeParams {
    double c1_low = 1.0;
    double c2_low = 1.0;
    double c1_up = 0.0;  // may be zero
    double c2_up = 1.0;
    double c3_up = 1.0;
    double lambda1_hat = 0.0;
    double lambda2_hat = 0.0;
};

// c1 t^{-d/2} exp(-c2 |v-x0|^2 / t)
double lower_envelope(double t, const Vec& v, const Vec& x0,
                      const EnvelopeParams& params);

// c3 t^{-d/2} exp(-(ln(1+|v|^2) - ln(1+|x0|^2) - c1 t)^2 / (c2 t))
double upper_envelope(double t, const Vec& v, const Vec& x0,
                      const EnvelopeParams& params);

// exp(-(ln(1+r^2) - ln(1+|x0|^2) - c1 t)^2 / (c2 t)) clipped to [0,1];
// returns 1 in the vacuous region ln(1+r^2) <= ln(1+|x0|^2) + c1 t.
double tail_bound(double t, double r, const Vec& x0, double c1, double c2);

struct SandwichReport {
    EnvelopeParams params;
    long n_fit = 0;            // significant points used for fitting
    long n_test = 0;           // significant points tested
    long lower_violations = 0; // KDE + 3se below the lower envelope
    long upper_violations = 0; // KDE - 3se above the upper envelope
    double violation_fraction = 1.0;
    bool positivity_ok = false;
    bool inconclusive = false; // < 30 significant test points
};

// Splits significant grid points (value > 3 se) into even/odd halves, fits
// the envelope shapes by weighted least squares in log space on the fit half
// with offset constants calibrated so both envelopes clear the fit half at
// 3-SE allowance, then counts 3-SE-significant violations on the test half.
SandwichReport verify_sandwich(const std::vector<DensityField>& fields,
                               const Vec& x0);

std::string sandwich_report_json(const SandwichReport& report);

struct TailReport {
    std::vector<double> radii;
    std::vector<double> empirical_tail;
    std::vector<double> envelope;
    std::vector<int> is_fit;  // 1 = used for fitting, 0 = test radius
    double c1_hat = 0.0;
    double c2_hat = 1.0;
    long n_test = 0;
    long violations = 0;  // significant exceedances on the test radii
};

// Radii are empirical quantiles of |X_t| between q_lo and q_hi; constants are
// fitted on even-indexed radii and tested on odd-indexed ones.
TailReport verify_tail(const std::vector<double>& abs_xt, double t, const Vec& x0,
                       int n_radii = 40, double q_lo = 0.5, double q_hi = 0.999);

void write_tail_csv(const std::string& path, const TailReport& report);

struct LogMartingaleReport {
    std::vector<double> times;
    std::vector<double> qv;       // running quadratic variation of the residual
    double qv_slope = 0.0;        // linear growth rate of <M>_t
    double c_fit = 0.0;           // 4 M d (1 + sup_t mean energy)
    double max_drift_b = 0.0;     // sup |2 X.b_avg / (1+|X|^2)|
    double max_drift_tr = 0.0;    // sup |tr(a_avg) / (1+|X|^2)|
    double max_drift_quad = 0.0;  // sup |2 X*a_avg X / (1+|X|^2)^2|
    bool slope_ok = false;
    bool mesh_warning = false;    // delta > 1e-2: QV estimate unreliable
};

// Reconstructs Z_t = ln(1+|X_t|^2) for the tagged particle along a trajectory
// recorded at every step, removes the Ito drift and accumulates the
// quadratic variation of the residual martingale.
LogMartingaleReport verify_logmartingale(const Trajectory& traj,
                                         const ModelSpec& spec);

}  // namespace landau
