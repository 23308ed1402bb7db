#pragma once

#include <string>
#include <vector>

#include "landau/model.hpp"
#include "landau/stats.hpp"

namespace landau {

// One coarse step split into its conditionally-Gaussian part J (frozen
// coefficients against the realized noise) and the remainder Gamma.
// Gamma follows the split of the discretized sequence: it carries the full
// drift, so J + Gamma equals the realized increment. drift_frozen and
// gamma_residual = Gamma - drift_frozen are reported separately as
// diagnostics of the coefficient-variation part alone.
struct StepDecomposition {
    long k = 0;
    Vec X_prev;
    Vec increment;      // X(t_k) - X(t_{k-1}) for the chosen particle
    Vec J;
    Vec Gamma;          // increment - J
    Vec drift_frozen;   // delta * (1/P) sum_j b(X_i - X_j) at the step start
    Vec gamma_residual; // Gamma - drift_frozen
    Mat SigmaJk;        // delta * (1/P) sum_j a(X_i - X_j) at the step start
};

// Conditional covariance of the Gaussian part of one step for particle i.
Mat sigma_jk(const Population& pop, long i, double delta, const HFunction& h);

// Advances `pop` by one coarse step of spec.delta simulated on an inner mesh
// of n_inner pairwise sub-steps, and returns the decomposition for `particle`.
// n_inner < 10 is refused (the split is meaningless on a coarse inner mesh).
// freeze_coefficients keeps sigma and b pinned at the step-start state along
// the fine path, in which case gamma_residual vanishes identically.
StepDecomposition decompose_step(Population& pop, const ModelSpec& spec,
                                 long particle = 0, int n_inner = 50,
                                 bool freeze_coefficients = false);

struct SpectrumReport {
    long k;
    double t;
    double lambda_min_over_delta;
    double lambda_max_over_delta;
    double bound_lower;  // m * lambda_min(Mhat), pointwise algebraic bound
    double bound_upper;  // 2 M (1+|X|)^2 (1 + mean energy)
    bool lower_ok;
    bool upper_ok;
};

// Checks the spectrum sandwich for the tagged particle on every recorded
// snapshot. The lower bound is algebraic (tolerance 1e-10), the upper bound
// uses the Lipschitz constant C_sigma^2 = M of the kernel.
std::vector<SpectrumReport> spectrum_bounds_check(const Trajectory& traj,
                                                  const ModelSpec& spec,
                                                  double tol = 1e-10);

void write_spectrum_csv(const std::string& path,
                        const std::vector<SpectrumReport>& reports);

struct ScalingReport {
    std::vector<double> deltas;
    std::vector<double> mean_abs_increment;
    std::vector<double> mean_abs_gamma;
    BootstrapCI slope_increment;  // expected ~ 1/2
    BootstrapCI slope_gamma;      // expected ~ 1
};

// Monte Carlo regression of one-step moment scalings vs delta. Each replica
// draws a fresh population and decomposes the first coarse step.
ScalingReport increment_scaling(const ModelSpec& base_spec,
                                const std::vector<double>& deltas, int replicas,
                                int n_inner = 50, int n_boot = 1000);

std::string scaling_report_json(const ScalingReport& report);

}  // namespace landau
