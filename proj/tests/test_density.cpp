#include <doctest.h>

#include <cmath>
#include <vector>

#include "landau/density.hpp"
#include "landau/rng.hpp"
#include "landau/simulator.hpp"

using namespace landau;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

// independent radial quadrature oracle for the base bump integral:
// d=2: 2 pi int r phi(r) dr, d=3: 4 pi int r^2 phi(r) dr (trapezoid, 1e5 points)
double radial_integral(const Mollifier& phi, int d) {
    const int n = 100000;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double r = static_cast<double>(i) / n;
        Vec u = Vec::Zero(d);
        u(0) = r;
        const double f = std::pow(r, d - 1) * phi.base(u);
        acc += (i == 0 || i == n) ? 0.5 * f : f;
    }
    const double surface = d == 2 ? 2.0 * kPi : 4.0 * kPi;
    return surface * acc / n;
}

std::vector<Vec> gaussian_samples(int n, uint64_t seed) {
    const RngStream st(seed, "density-samples");
    std::vector<Vec> out;
    out.reserve(n);
    double z[2];
    for (int i = 0; i < n; ++i) {
        st.normals(i, 0, 2, z);
        out.push_back(v2(z[0], z[1]));
    }
    return out;
}

}  // namespace

TEST_CASE("mollifier preconditions") {
    CHECK_THROWS_AS(Mollifier(Mollifier::Kind::Bump, 2, 0.0), PreconditionError);
    CHECK_THROWS_AS(Mollifier(Mollifier::Kind::Bump, 2, -1.0), PreconditionError);
    CHECK_THROWS_AS(Mollifier(Mollifier::Kind::Bump, 4, 0.1),
                    UnsupportedDimensionError);
}

TEST_CASE("bump normalization agrees with an independent quadrature") {
    for (int d : {2, 3}) {
        const Mollifier phi(Mollifier::Kind::Bump, d, 1.0);
        CHECK(radial_integral(phi, d) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("product-cosine mollifier integrates to one") {
    // 2-d midpoint rule over the support cube
    const Mollifier phi(Mollifier::Kind::ProductCosine, 2, 1.0);
    const double c = 1.0 / std::sqrt(2.0);
    const int n = 1000;
    const double step = 2.0 * c / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            acc += phi.base(v2(-c + (i + 0.5) * step, -c + (j + 0.5) * step));
    CHECK(acc * step * step == doctest::Approx(1.0).epsilon(1e-6));
    // support sits strictly inside the unit ball
    CHECK(phi.base(v2(c, 0)) == 0.0);
    CHECK(phi.base(v2(0.9, 0.9)) == 0.0);
}

TEST_CASE("compact support and scaling") {
    for (double eta : {0.1, 0.5, 2.0}) {
        const Mollifier phi(Mollifier::Kind::Bump, 2, eta);
        CHECK(phi(v2(1.0001 * eta, 0)) == 0.0);
        CHECK(phi(v2(0, 0)) == doctest::Approx(phi.at_zero()));
        CHECK(phi(v2(0.5 * eta, 0)) > 0.0);
        // eta^{-d} scaling of the peak
        const Mollifier unit(Mollifier::Kind::Bump, 2, 1.0);
        CHECK(phi.at_zero() == doctest::Approx(unit.at_zero() / (eta * eta)));
    }
}

TEST_CASE("estimate_density basics") {
    const Mollifier phi(Mollifier::Kind::Bump, 2, 0.3);
    CHECK_THROWS_AS(estimate_density({}, {v2(0, 0)}, phi), PreconditionError);

    // single sample on the grid point
    auto f = estimate_density({v2(1, 1)}, {v2(1, 1), v2(3, 3)}, phi);
    CHECK(f.values[0] == doctest::Approx(phi.at_zero()));
    CHECK(f.values[1] == 0.0);  // farther than eta

    // estimator stays inside [0, at_zero]
    const auto samples = gaussian_samples(2000, 4);
    f = estimate_density(samples, make_grid(v2(0, 0), 2.0, 9), phi);
    for (double v : f.values) {
        CHECK(v >= 0.0);
        CHECK(v <= phi.at_zero() + 1e-12);
    }
}

TEST_CASE("gaussian KDE value at the origin") {
    const auto samples = gaussian_samples(100000, 9);
    const Mollifier phi(Mollifier::Kind::Bump, 2, 0.2);
    const auto f = estimate_density(samples, {v2(0, 0)}, phi);
    CHECK(f.values[0] == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(0.07));
    CHECK(f.stderrs[0] > 0.0);
    CHECK(f.stderrs[0] < 0.01);
}

TEST_CASE("estimator is linear in the empirical measure") {
    const auto s1 = gaussian_samples(500, 11);
    auto s2 = gaussian_samples(300, 12);
    std::vector<Vec> both = s1;
    both.insert(both.end(), s2.begin(), s2.end());
    const Mollifier phi(Mollifier::Kind::Bump, 2, 0.4);
    const std::vector<Vec> grid = {v2(0, 0), v2(0.5, -0.5)};
    const auto f1 = estimate_density(s1, grid, phi);
    const auto f2 = estimate_density(s2, grid, phi);
    const auto fb = estimate_density(both, grid, phi);
    for (size_t g = 0; g < grid.size(); ++g) {
        const double mixed = (500.0 * f1.values[g] + 300.0 * f2.values[g]) / 800.0;
        CHECK(fb.values[g] == doctest::Approx(mixed).epsilon(1e-12));
    }
}

TEST_CASE("bandwidth monotonicity at a point mass") {
    const std::vector<Vec> atom(50, v2(0.3, -0.8));
    double prev = std::numeric_limits<double>::infinity();
    for (double eta : {0.1, 0.2, 0.4, 0.8, 1.6}) {
        const Mollifier phi(Mollifier::Kind::Bump, 2, eta);
        const auto f = estimate_density(atom, {v2(0.3, -0.8)}, phi);
        CHECK(f.values[0] <= prev);
        prev = f.values[0];
    }
}

TEST_CASE("make_grid covers the requested box") {
    const auto g2 = make_grid(v2(1, 0), 3.0, 5);
    CHECK(g2.size() == 25);
    CHECK((g2.front() - v2(-2, -3)).norm() <= 1e-12);
    CHECK((g2.back() - v2(4, 3)).norm() <= 1e-12);
    Vec c3 = Vec::Zero(3);
    CHECK(make_grid(c3, 1.0, 3).size() == 27);
}

TEST_CASE("default bandwidth rule") {
    // cap side active
    CHECK(default_bandwidth(1.0, 1e-4, 1000000, 2, 1.0) ==
          doctest::Approx(1e-2));
    // statistical side active
    const double rate = std::pow(100.0, -1.0 / 6.0);
    CHECK(default_bandwidth(100.0, 1.0, 100, 2, 1.0) == doctest::Approx(rate));
    CHECK_THROWS_AS(default_bandwidth(0.0, 1.0, 100, 2, 0.0), PreconditionError);
}

TEST_CASE("conditional density experiment: positivity and early concentration") {
    ModelSpec spec;
    spec.d = 2;
    spec.h = HFunction::constant(1.0);
    spec.P = 16;
    spec.delta = 0.05;
    spec.T = 0.1;
    spec.scheme = Scheme::MeanfieldGaussian;
    spec.seed = 21;
    spec.init = InitialLaw::standard_gaussian(2);

    const Vec x0 = v2(1, 0);
    const auto grid = make_grid(x0, 2.0, 9);
    const auto fields = conditional_density_experiment(
        spec, x0, {spec.delta, spec.T}, grid, 200, Mollifier::Kind::Bump, 0.3);
    REQUIRE(fields.size() == 2);
    bool any_positive = false;
    for (const auto& f : fields)
        for (double v : f.values) {
            CHECK(v >= 0.0);
            if (v > 0) any_positive = true;
        }
    CHECK(any_positive);

    // after one step of size delta the mass is still within a few step widths
    const auto& early = fields[0];
    for (size_t g = 0; g < grid.size(); ++g)
        if ((grid[g] - x0).norm() > 1.5)
            CHECK(early.values[g] <= 3.0 * early.stderrs[g] + 1e-9);

    CHECK_THROWS_AS(conditional_density_experiment(spec, x0, {0.51}, grid, 10),
                    PreconditionError);  // off-horizon time
}
