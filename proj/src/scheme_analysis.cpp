#include "landau/scheme_analysis.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "landau/errors.hpp"
#include "landau/rng.hpp"
#include "landau/simulator.hpp"

namespace landau {

Mat sigma_jk(const Population& pop, long i, double delta, const HFunction& h) {
    if (pop.P < 2) throw PreconditionError("sigma_jk requires P >= 2");
    const int d = pop.d;
    const Vec xi = pop.particle(i);
    Mat acc = Mat::Zero(d, d);
    for (long j = 0; j < pop.P; ++j) {
        if (j == i) continue;  // a(0) = 0
        acc += eval_a(xi - pop.particle(j), h);
    }
    return (delta / static_cast<double>(pop.P)) * acc;
}

namespace {

// one fine pairwise step with coefficients pinned at `frozen` but the same
// per-pair noise counters the live scheme would consume
void frozen_step(Population& pop, const Population& frozen, const ModelSpec& spec,
                 double delta) {
    const int d = pop.d;
    const long P = pop.P;
    const RngStream st(pop.rng_key);
    const auto c = static_cast<uint64_t>(pop.step_index);
    std::vector<double> Xn(pop.X.size());
    const double inv_sqrtP = 1.0 / std::sqrt(static_cast<double>(P));
    double w[4];
    for (long i = 0; i < P; ++i) {
        const Vec fi = frozen.particle(i);
        Vec drift = Vec::Zero(d);
        Vec nz = Vec::Zero(d);
        for (long j = 0; j < P; ++j) {
            if (j == i) continue;
            const Vec z = fi - frozen.particle(j);
            drift += eval_b(z, spec.h);
            if (!spec.suppress_noise) {
                noise::pair_increment(st, c, i, j, d, delta, w);
                nz += eval_sigma(z, spec.h) * Eigen::Map<const Vec>(w, d);
            }
        }
        Eigen::Map<Vec>(Xn.data() + i * d, d) =
            pop.particle(i) + (delta / P) * drift + inv_sqrtP * nz;
    }
    pop.X = std::move(Xn);
    pop.t += delta;
    pop.step_index += 1;
}

}  // namespace

StepDecomposition decompose_step(Population& pop, const ModelSpec& spec,
                                 long particle, int n_inner,
                                 bool freeze_coefficients) {
    if (n_inner < 10)
        throw PreconditionError(
            "inner mesh must refine the coarse step by a factor >= 10");
    const int d = pop.d;
    const long P = pop.P;
    const double delta_inner = spec.delta / n_inner;
    const Population start = pop;
    const RngStream st(pop.rng_key);

    StepDecomposition dec;
    dec.k = start.step_index;
    dec.X_prev = start.particle(particle);
    dec.SigmaJk = sigma_jk(start, particle, spec.delta, spec.h);

    dec.drift_frozen = Vec::Zero(d);
    std::vector<Mat> frozen_sigma(P);
    for (long j = 0; j < P; ++j) {
        if (j == particle) continue;
        const Vec z = dec.X_prev - start.particle(j);
        dec.drift_frozen += eval_b(z, spec.h);
        frozen_sigma[j] = eval_sigma(z, spec.h);
    }
    dec.drift_frozen *= spec.delta / static_cast<double>(P);

    dec.J = Vec::Zero(d);
    const double inv_sqrtP = 1.0 / std::sqrt(static_cast<double>(P));
    double w[4];
    for (int s = 0; s < n_inner; ++s) {
        const auto c = static_cast<uint64_t>(pop.step_index);
        if (!spec.suppress_noise) {
            for (long j = 0; j < P; ++j) {
                if (j == particle) continue;
                noise::pair_increment(st, c, particle, j, d, delta_inner, w);
                dec.J += inv_sqrtP * (frozen_sigma[j] * Eigen::Map<const Vec>(w, d));
            }
        }
        if (freeze_coefficients)
            frozen_step(pop, start, spec, delta_inner);
        else
            step_pairwise(pop, spec, 0, delta_inner);
    }

    dec.increment = pop.particle(particle) - dec.X_prev;
    dec.Gamma = dec.increment - dec.J;
    dec.gamma_residual = dec.Gamma - dec.drift_frozen;
    return dec;
}

std::vector<SpectrumReport> spectrum_bounds_check(const Trajectory& traj,
                                                  const ModelSpec& spec,
                                                  double tol) {
    const HFunction unit = HFunction::constant(1.0);
    std::vector<SpectrumReport> out;
    out.reserve(traj.snapshots.size());
    for (const auto& pop : traj.snapshots) {
        const long i = pop.tagged;
        const Mat sig_over_delta = sigma_jk(pop, i, 1.0, spec.h);
        const Mat mhat = sigma_jk(pop, i, 1.0, unit);
        Eigen::SelfAdjointEigenSolver<Mat> es_sig(sig_over_delta);
        Eigen::SelfAdjointEigenSolver<Mat> es_mhat(mhat);
        SpectrumReport r;
        r.k = pop.step_index;
        r.t = pop.t;
        r.lambda_min_over_delta = es_sig.eigenvalues()(0);
        r.lambda_max_over_delta = es_sig.eigenvalues()(pop.d - 1);
        r.bound_lower = spec.h.m * es_mhat.eigenvalues()(0);
        const double xnorm = pop.particle(i).norm();
        r.bound_upper =
            2.0 * spec.h.M * (1.0 + xnorm) * (1.0 + xnorm) * (1.0 + pop.mean_energy());
        r.lower_ok = r.lambda_min_over_delta >= r.bound_lower - tol;
        r.upper_ok = r.lambda_max_over_delta <= r.bound_upper * (1.0 + 1e-12) + tol;
        out.push_back(r);
    }
    return out;
}

void write_spectrum_csv(const std::string& path,
                        const std::vector<SpectrumReport>& reports) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "k,t,lambda_min_over_delta,m_lambda_min_Mhat,lambda_max_over_delta,"
           "upper_bound,lower_ok,upper_ok\n";
    for (const auto& r : reports) {
        out << r.k << "," << format_double(r.t) << ","
            << format_double(r.lambda_min_over_delta) << ","
            << format_double(r.bound_lower) << ","
            << format_double(r.lambda_max_over_delta) << ","
            << format_double(r.bound_upper) << "," << (r.lower_ok ? 1 : 0) << ","
            << (r.upper_ok ? 1 : 0) << "\n";
    }
}

ScalingReport increment_scaling(const ModelSpec& base_spec,
                                const std::vector<double>& deltas, int replicas,
                                int n_inner, int n_boot) {
    if (deltas.size() < 3)
        throw PreconditionError("increment_scaling needs at least 3 deltas");
    double dmin = deltas[0], dmax = deltas[0];
    for (double d : deltas) {
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (dmax / dmin < 99.0)
        throw PreconditionError("deltas must span at least three decades");

    ScalingReport rep;
    rep.deltas = deltas;
    std::vector<double> logd;
    std::vector<std::vector<double>> inc_samples, gamma_samples;
    for (size_t di = 0; di < deltas.size(); ++di) {
        ModelSpec spec = base_spec;
        spec.delta = deltas[di];
        spec.T = deltas[di];
        std::vector<double> inc(replicas), gam(replicas);
        for (int r = 0; r < replicas; ++r) {
            const uint64_t replica = (static_cast<uint64_t>(di) << 40) |
                                     static_cast<uint64_t>(r);
            Population pop = init_population(spec, std::nullopt, replica);
            const auto dec = decompose_step(pop, spec, pop.tagged, n_inner);
            inc[r] = dec.increment.norm();
            gam[r] = dec.Gamma.norm();
        }
        rep.mean_abs_increment.push_back(mean(inc));
        rep.mean_abs_gamma.push_back(mean(gam));
        logd.push_back(std::log(deltas[di]));
        inc_samples.push_back(std::move(inc));
        gamma_samples.push_back(std::move(gam));
    }
    rep.slope_increment =
        bootstrap_slope_ci(logd, inc_samples, n_boot, 0.95, base_spec.seed);
    rep.slope_gamma =
        bootstrap_slope_ci(logd, gamma_samples, n_boot, 0.95, base_spec.seed + 1);
    return rep;
}

std::string scaling_report_json(const ScalingReport& report) {
    nlohmann::json j;
    j["deltas"] = report.deltas;
    j["mean_abs_increment"] = report.mean_abs_increment;
    j["mean_abs_gamma"] = report.mean_abs_gamma;
    j["slope_increment"] = {{"estimate", report.slope_increment.estimate},
                            {"ci_lo", report.slope_increment.lo},
                            {"ci_hi", report.slope_increment.hi}};
    j["slope_gamma"] = {{"estimate", report.slope_gamma.estimate},
                        {"ci_lo", report.slope_gamma.lo},
                        {"ci_hi", report.slope_gamma.hi}};
    return j.dump(2);
}

}  // namespace landau
