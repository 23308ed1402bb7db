#include "landau/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "landau/errors.hpp"
#include "landau/kernels.hpp"
#include "landau/simulator.hpp"
#include "landau/stats.hpp"

namespace landau {

double lower_envelope(double t, const Vec& v, const Vec& x0,
                      const EnvelopeParams& params) {
    if (!(t > 0)) throw PreconditionError("lower_envelope requires t > 0");
    const double d = static_cast<double>(v.size());
    const double r2 = (v - x0).squaredNorm();
    return params.c1_low * std::pow(t, -d / 2.0) *
           std::exp(-params.c2_low * r2 / t);
}

double upper_envelope(double t, const Vec& v, const Vec& x0,
                      const EnvelopeParams& params) {
    if (!(t > 0)) throw PreconditionError("upper_envelope requires t > 0");
    const double d = static_cast<double>(v.size());
    const double u =
        std::log1p(v.squaredNorm()) - std::log1p(x0.squaredNorm()) - params.c1_up * t;
    return params.c3_up * std::pow(t, -d / 2.0) *
           std::exp(-u * u / (params.c2_up * t));
}

double tail_bound(double t, double r, const Vec& x0, double c1, double c2) {
    const double u = std::log1p(r * r) - std::log1p(x0.squaredNorm()) - c1 * t;
    if (u <= 0) return 1.0;  // the martingale inequality controls one side only
    const double b = std::exp(-u * u / (c2 * t));
    return std::clamp(b, 0.0, 1.0);
}

namespace {

struct SigPoint {
    double t;
    Vec v;
    double value;
    double se;
};

}  // namespace

SandwichReport verify_sandwich(const std::vector<DensityField>& fields,
                               const Vec& x0) {
    SandwichReport rep;
    std::vector<SigPoint> fit, test;
    {
        long idx = 0;
        bool any_nonpos = false;
        for (const auto& f : fields) {
            for (size_t g = 0; g < f.grid.size(); ++g) {
                const double val = f.values[g], se = f.stderrs[g];
                if (!(se > 0) || val <= 3.0 * se) continue;
                if (val <= 0) any_nonpos = true;
                (idx % 2 == 0 ? fit : test)
                    .push_back({f.t, f.grid[g], val, se});
                ++idx;
            }
        }
        rep.positivity_ok = !any_nonpos && idx > 0;
    }
    rep.n_fit = static_cast<long>(fit.size());
    rep.n_test = static_cast<long>(test.size());
    if (rep.n_test < 30 || rep.n_fit < 3) {
        rep.inconclusive = true;
        return rep;
    }
    const double d = static_cast<double>(x0.size());

    // lower envelope: LS slope of log f + (d/2) ln t against |v-x0|^2/t,
    // offset calibrated so the envelope clears the fit half with 3-SE slack
    {
        std::vector<double> xs, ys, ws;
        for (const auto& p : fit) {
            xs.push_back((p.v - x0).squaredNorm() / p.t);
            ys.push_back(std::log(p.value) + d / 2.0 * std::log(p.t));
            const double rel = p.se / p.value;
            ws.push_back(1.0 / (rel * rel));
        }
        const LinearFit lf = linear_fit(xs, ys, ws);
        rep.params.c2_low = std::max(-lf.slope, 1e-6);
        double c1 = std::numeric_limits<double>::infinity();
        for (const auto& p : fit) {
            EnvelopeParams unit = rep.params;
            unit.c1_low = 1.0;
            const double shape = lower_envelope(p.t, p.v, x0, unit);
            c1 = std::min(c1, (p.value - 3.0 * p.se) / shape);
        }
        rep.params.c1_low = std::max(c1, 1e-300);
    }

    // upper envelope: linearized LS in u = ln(1+|v|^2) - ln(1+|x0|^2)
    {
        std::vector<std::vector<double>> design;
        std::vector<double> ys, ws;
        for (const auto& p : fit) {
            const double u =
                std::log1p(p.v.squaredNorm()) - std::log1p(x0.squaredNorm());
            design.push_back({1.0, u * u / p.t, u});
            ys.push_back(std::log(p.value) + d / 2.0 * std::log(p.t));
            const double rel = p.se / p.value;
            ws.push_back(1.0 / (rel * rel));
        }
        const auto beta = least_squares(design, ys, ws);
        rep.params.c2_up = beta[1] < 0 ? -1.0 / beta[1] : 1e3;
        rep.params.c1_up = std::max(0.0, beta[2] * rep.params.c2_up / 2.0);
        double c3 = 0.0;
        for (const auto& p : fit) {
            EnvelopeParams unit = rep.params;
            unit.c3_up = 1.0;
            const double shape = upper_envelope(p.t, p.v, x0, unit);
            c3 = std::max(c3, (p.value + 3.0 * p.se) / shape);
        }
        rep.params.c3_up = c3;
    }

    for (const auto& p : test) {
        if (p.value + 3.0 * p.se < lower_envelope(p.t, p.v, x0, rep.params))
            ++rep.lower_violations;
        if (p.value - 3.0 * p.se > upper_envelope(p.t, p.v, x0, rep.params))
            ++rep.upper_violations;
    }
    rep.violation_fraction =
        static_cast<double>(rep.lower_violations + rep.upper_violations) /
        static_cast<double>(rep.n_test);
    return rep;
}

std::string sandwich_report_json(const SandwichReport& rep) {
    nlohmann::json j;
    j["c1_low"] = rep.params.c1_low;
    j["c2_low"] = rep.params.c2_low;
    j["c1_up"] = rep.params.c1_up;
    j["c2_up"] = rep.params.c2_up;
    j["c3_up"] = rep.params.c3_up;
    j["n_fit"] = rep.n_fit;
    j["n_test"] = rep.n_test;
    j["lower_violations"] = rep.lower_violations;
    j["upper_violations"] = rep.upper_violations;
    j["violation_fraction"] = rep.violation_fraction;
    j["positivity_ok"] = rep.positivity_ok;
    j["inconclusive"] = rep.inconclusive;
    return j.dump(2);
}

TailReport verify_tail(const std::vector<double>& abs_xt, double t, const Vec& x0,
                       int n_radii, double q_lo, double q_hi) {
    if (abs_xt.size() < 100)
        throw PreconditionError("verify_tail needs >= 100 samples");
    TailReport rep;
    const double n = static_cast<double>(abs_xt.size());
    for (int i = 0; i < n_radii; ++i) {
        const double q = q_lo + (q_hi - q_lo) * i / (n_radii - 1);
        rep.radii.push_back(quantile(abs_xt, q));
    }
    for (double r : rep.radii) {
        long cnt = 0;
        for (double a : abs_xt)
            if (a >= r) ++cnt;
        rep.empirical_tail.push_back(static_cast<double>(cnt) / n);
    }

    // fit sqrt(-ln p) ~ linear in u_r on even-indexed, non-vacuous radii
    const double lx0 = std::log1p(x0.squaredNorm());
    std::vector<double> us, ys;
    for (size_t i = 0; i < rep.radii.size(); ++i) {
        rep.is_fit.push_back(i % 2 == 0 ? 1 : 0);
        if (i % 2 != 0) continue;
        const double p = rep.empirical_tail[i];
        const double u = std::log1p(rep.radii[i] * rep.radii[i]) - lx0;
        if (p <= 0 || p >= 1 || u <= 0) continue;
        us.push_back(u);
        ys.push_back(std::sqrt(-std::log(p)));
    }
    if (us.size() < 3) throw PreconditionError("too few usable fit radii");
    const LinearFit lf = linear_fit(us, ys);
    double slope = std::max(lf.slope, 1e-6);
    rep.c2_hat = 1.0 / (slope * slope * t);
    rep.c1_hat = std::max(0.0, -lf.intercept / (slope * t));

    // inflate c2 until the bound clears every fit radius
    double inflate = 1.0;
    for (size_t i = 0; i < rep.radii.size(); i += 2) {
        const double p = rep.empirical_tail[i];
        const double u = std::log1p(rep.radii[i] * rep.radii[i]) - lx0 -
                         rep.c1_hat * t;
        if (p <= 0 || u <= 0) continue;
        inflate = std::max(inflate, u * u / (rep.c2_hat * t * (-std::log(p))));
    }
    rep.c2_hat *= inflate;

    for (size_t i = 0; i < rep.radii.size(); ++i) {
        const double b = tail_bound(t, rep.radii[i], x0, rep.c1_hat, rep.c2_hat);
        rep.envelope.push_back(b);
        if (rep.is_fit[i]) continue;
        if (b >= 1.0) continue;  // vacuous radius, not counted
        ++rep.n_test;
        const double p = rep.empirical_tail[i];
        const double se = std::sqrt(std::max(p * (1.0 - p) / n, 1e-300));
        if (p - 3.0 * se > b) ++rep.violations;
    }
    return rep;
}

void write_tail_csv(const std::string& path, const TailReport& rep) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "r,empirical_tail,bound,is_fit\n";
    for (size_t i = 0; i < rep.radii.size(); ++i)
        out << format_double(rep.radii[i]) << ","
            << format_double(rep.empirical_tail[i]) << ","
            << format_double(rep.envelope[i]) << "," << rep.is_fit[i] << "\n";
}

LogMartingaleReport verify_logmartingale(const Trajectory& traj,
                                         const ModelSpec& spec) {
    if (traj.snapshots.size() < 3)
        throw PreconditionError(
            "verify_logmartingale needs a trajectory recorded at every step");
    LogMartingaleReport rep;
    rep.mesh_warning = spec.delta > 1e-2;

    double qv = 0.0;
    double max_energy = 0.0;
    std::vector<double> ts, qvs;
    for (size_t k = 0; k + 1 < traj.snapshots.size(); ++k) {
        const Population& pop = traj.snapshots[k];
        const Population& next = traj.snapshots[k + 1];
        const double dt = next.t - pop.t;
        const Vec x = pop.particle(pop.tagged);
        const Vec xn = next.particle(next.tagged);
        max_energy = std::max(max_energy, pop.mean_energy());

        Mat a_avg = Mat::Zero(pop.d, pop.d);
        Vec b_avg = Vec::Zero(pop.d);
        for (long j = 0; j < pop.P; ++j) {
            if (j == pop.tagged) continue;
            const Vec z = x - pop.particle(j);
            a_avg += eval_a(z, spec.h);
            b_avg += eval_b(z, spec.h);
        }
        a_avg /= static_cast<double>(pop.P);
        b_avg /= static_cast<double>(pop.P);

        const double s = 1.0 + x.squaredNorm();
        const double g_b = 2.0 * x.dot(b_avg) / s;
        const double g_tr = a_avg.trace() / s;
        const double g_quad = 2.0 * x.dot(a_avg * x) / (s * s);
        rep.max_drift_b = std::max(rep.max_drift_b, std::abs(g_b));
        rep.max_drift_tr = std::max(rep.max_drift_tr, std::abs(g_tr));
        rep.max_drift_quad = std::max(rep.max_drift_quad, std::abs(g_quad));

        const double dz = std::log1p(xn.squaredNorm()) - std::log1p(x.squaredNorm());
        const double dm = dz - (g_b + g_tr - g_quad) * dt;
        qv += dm * dm;
        ts.push_back(next.t);
        qvs.push_back(qv);
    }
    rep.times = ts;
    rep.qv = qvs;
    // growth rate through the origin: <M>_0 = 0 by construction
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < ts.size(); ++i) {
        sxx += ts[i] * ts[i];
        sxy += ts[i] * qvs[i];
    }
    rep.qv_slope = sxy / sxx;
    rep.c_fit = 4.0 * spec.h.M * spec.d * (1.0 + max_energy);
    rep.slope_ok = rep.qv_slope <= rep.c_fit;
    return rep;
}

}  // namespace landau
