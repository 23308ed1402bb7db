#include <doctest.h>

#include <cmath>
#include <vector>

#include "landau/bounds.hpp"
#include "landau/density.hpp"
#include "landau/rng.hpp"
#include "landau/simulator.hpp"

using namespace landau;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

std::vector<Vec> gaussian_cloud(const Vec& mean, double sd, int n, uint64_t seed) {
    const RngStream st(seed, "bounds-samples");
    std::vector<Vec> out;
    out.reserve(n);
    double z[2];
    for (int i = 0; i < n; ++i) {
        st.normals(i, 0, 2, z);
        out.push_back(v2(mean(0) + sd * z[0], mean(1) + sd * z[1]));
    }
    return out;
}

}  // namespace

TEST_CASE("lower envelope closed form") {
    EnvelopeParams p;
    p.c1_low = 1.0;
    p.c2_low = 1.0;
    const Vec x0 = v2(0, 0);
    CHECK(lower_envelope(1.0, v2(1, 0), x0, p) == doctest::Approx(std::exp(-1.0)));
    CHECK(lower_envelope(1.0, x0, x0, p) == doctest::Approx(1.0));
    CHECK(lower_envelope(4.0, x0, x0, p) == doctest::Approx(0.25));  // t^{-d/2}
    // monotone approach of the exponent to zero for large t
    CHECK(lower_envelope(100.0, v2(1, 0), x0, p) <
          1.0 * std::pow(100.0, -1.0));
    CHECK_THROWS_AS(lower_envelope(0.0, x0, x0, p), PreconditionError);
}

TEST_CASE("upper envelope closed form") {
    EnvelopeParams p;
    p.c1_up = 0.0;
    p.c2_up = 1.0;
    p.c3_up = 1.0;
    const Vec x0 = v2(0, 0);
    Vec v(2);
    v << std::sqrt(std::exp(1.0) - 1.0), 0.0;  // ln(1+|v|^2) = 1
    CHECK(upper_envelope(1.0, v, x0, p) == doctest::Approx(std::exp(-1.0)));
    CHECK(upper_envelope(1.0, x0, x0, p) == doctest::Approx(1.0));
    CHECK(upper_envelope(1.0, v2(1e6, 0), x0, p) < 1e-10);
    CHECK_THROWS_AS(upper_envelope(-1.0, v, x0, p), PreconditionError);
}

TEST_CASE("tail bound closed form and monotonicity") {
    const Vec x0 = v2(0, 0);
    CHECK(tail_bound(1.0, 0.0, x0, 0.5, 1.0) == 1.0);  // vacuous at r = |x0|
    const double r = std::sqrt(std::exp(1.0) - 1.0);
    CHECK(tail_bound(1.0, r, x0, 0.0, 2.0) == doctest::Approx(std::exp(-0.5)));
    CHECK(tail_bound(1.0, 1e8, x0, 0.0, 2.0) < 1e-10);
    double prev = 1.0;
    for (double rr = 0.5; rr < 50.0; rr *= 1.3) {
        const double b = tail_bound(1.0, rr, x0, 0.1, 1.5);
        CHECK(b <= prev + 1e-15);
        prev = b;
    }
}

TEST_CASE("sandwich verification on a known-Gaussian pipeline") {
    // exact self-similar family: N(x0, t I) has density
    // (2 pi t)^{-1} exp(-|v-x0|^2 / (2t)) which both envelope shapes can hold
    const Vec x0 = v2(1, 0);
    const auto grid = make_grid(x0, 3.0, 25);
    std::vector<DensityField> fields;
    int seed = 100;
    for (double t : {0.25, 0.5, 1.0}) {
        const auto samples = gaussian_cloud(x0, std::sqrt(t), 20000, seed++);
        const Mollifier phi(Mollifier::Kind::Bump, 2, 0.15);
        DensityField f = estimate_density(samples, grid, phi);
        f.t = t;
        f.x0 = x0;
        fields.push_back(std::move(f));
    }
    const auto rep = verify_sandwich(fields, x0);
    CHECK(!rep.inconclusive);
    CHECK(rep.positivity_ok);
    CHECK(rep.n_test >= 30);
    CHECK(rep.violation_fraction <= 0.01);
    CHECK(rep.params.c1_low > 0.0);
    CHECK(rep.params.c2_low > 0.0);
    CHECK(rep.params.c3_up > 0.0);
    const std::string json = sandwich_report_json(rep);
    CHECK(json.find("violation_fraction") != std::string::npos);
}

TEST_CASE("sandwich with no significant data is inconclusive") {
    DensityField empty;
    empty.t = 1.0;
    empty.x0 = v2(0, 0);
    empty.grid = {v2(0, 0), v2(1, 1)};
    empty.values = {0.0, 0.0};
    empty.stderrs = {0.0, 0.0};
    const auto rep = verify_sandwich({empty}, v2(0, 0));
    CHECK(rep.inconclusive);
}

TEST_CASE("tail verification on Gaussian radii") {
    const Vec x0 = v2(1, 0);
    const auto samples = gaussian_cloud(x0, 1.0, 20000, 300);
    std::vector<double> abs_xt;
    abs_xt.reserve(samples.size());
    for (const auto& s : samples) abs_xt.push_back(s.norm());
    const auto rep = verify_tail(abs_xt, 1.0, x0);
    REQUIRE(rep.radii.size() == 40);
    // empirical tail is nonincreasing in r
    for (size_t i = 1; i < rep.radii.size(); ++i)
        CHECK(rep.empirical_tail[i] <= rep.empirical_tail[i - 1] + 1e-15);
    CHECK(rep.c2_hat > 0.0);
    CHECK(rep.n_test > 0);
    CHECK(static_cast<double>(rep.violations) <=
          0.01 * static_cast<double>(rep.n_test) + 1e-12);

    CHECK_THROWS_AS(verify_tail(std::vector<double>(10, 1.0), 1.0, x0),
                    PreconditionError);
}

TEST_CASE("log-martingale on a frozen path is exactly quiet") {
    // coincident particles: a = b = 0, Z constant, QV identically zero
    Population pop;
    pop.d = 2;
    pop.P = 4;
    pop.X = {1, 0, 1, 0, 1, 0, 1, 0};
    Trajectory traj;
    for (int k = 0; k < 5; ++k) {
        pop.t = 0.01 * k;
        pop.step_index = k;
        traj.snapshots.push_back(pop);
    }
    ModelSpec spec;
    spec.d = 2;
    spec.P = 4;
    spec.delta = 0.01;
    spec.T = 0.04;
    const auto rep = verify_logmartingale(traj, spec);
    CHECK(rep.qv_slope == 0.0);
    CHECK(rep.max_drift_b == 0.0);
    CHECK(rep.max_drift_tr == 0.0);
    CHECK(rep.max_drift_quad == 0.0);
    CHECK(rep.slope_ok);
    CHECK(!rep.mesh_warning);
}

TEST_CASE("log-martingale QV grows at most linearly on live dynamics") {
    ModelSpec spec;
    spec.d = 2;
    spec.h = HFunction::constant(1.0);
    spec.P = 16;
    spec.delta = 1e-3;
    spec.T = 0.2;
    spec.scheme = Scheme::PairwiseSharedNoise;
    spec.seed = 77;
    spec.init = InitialLaw::standard_gaussian(2);
    RecordingPlan plan;
    plan.snapshot_every = 1;
    plan.moment_every = 0;
    const Trajectory traj = run(spec, plan, v2(1, 0));
    const auto rep = verify_logmartingale(traj, spec);
    CHECK(rep.qv_slope >= 0.0);
    CHECK(rep.c_fit > 0.0);
    CHECK(rep.slope_ok);
    CHECK(!rep.mesh_warning);
    CHECK(rep.times.size() == rep.qv.size());

    ModelSpec coarse = spec;
    coarse.delta = 0.05;
    coarse.T = 0.2;
    const Trajectory tc = run(coarse, plan, v2(1, 0));
    CHECK(verify_logmartingale(tc, coarse).mesh_warning);

    Trajectory tiny;
    tiny.snapshots.push_back(traj.snapshots[0]);
    CHECK_THROWS_AS(verify_logmartingale(tiny, spec), PreconditionError);
}
