#include "landau/density.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "landau/errors.hpp"
#include "landau/simulator.hpp"

namespace landau {

namespace {

constexpr double kPi = 3.14159265358979323846;

double bump_profile(double r2) {
    // exp(-1/(1-r^2)) on r < 1
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

// integral of the unnormalized bump over R^d by radial composite Simpson;
// the integrand vanishes to all orders at r = 1, so convergence is fast
double bump_norm(int d, int n_intervals = 20000) {
    const double surface = d == 2 ? 2.0 * kPi : 4.0 * kPi;
    const double step = 1.0 / n_intervals;
    double acc = 0.0;
    for (int i = 0; i <= n_intervals; ++i) {
        const double r = i * step;
        const double f = std::pow(r, d - 1) * bump_profile(r * r);
        const double w = (i == 0 || i == n_intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f;
    }
    return surface * acc * step / 3.0;
}

}  // namespace

Mollifier::Mollifier(Kind kind, int d, double eta)
    : kind_(kind), d_(d), eta_(eta), norm_(1.0), cube_half_(1.0 / std::sqrt(d)) {
    if (!(eta > 0)) throw PreconditionError("mollifier bandwidth eta must be > 0");
    if (d != 2 && d != 3) throw UnsupportedDimensionError(d);
    if (kind_ == Kind::Bump) norm_ = bump_norm(d);
}

double Mollifier::base(const Vec& u) const {
    if (kind_ == Kind::Bump) return bump_profile(u.squaredNorm()) / norm_;
    // product-cosine on the cube |u_k| <= 1/sqrt(d), support inside the unit ball
    double v = 1.0;
    for (int k = 0; k < d_; ++k) {
        const double a = std::abs(u(k));
        if (a >= cube_half_) return 0.0;
        v *= (1.0 + std::cos(kPi * u(k) / cube_half_)) / (2.0 * cube_half_);
    }
    return v;
}

double Mollifier::operator()(const Vec& x) const {
    return base(x / eta_) / std::pow(eta_, d_);
}

double Mollifier::at_zero() const {
    const double phi0 = kind_ == Kind::Bump ? bump_profile(0.0) / norm_
                                            : std::pow(1.0 / cube_half_, d_);
    return phi0 / std::pow(eta_, d_);
}

DensityField estimate_density(const std::vector<Vec>& samples,
                              const std::vector<Vec>& grid,
                              const Mollifier& mollifier) {
    if (samples.empty()) throw PreconditionError("estimate_density: no samples");
    DensityField field;
    field.grid = grid;
    field.eta = mollifier.eta();
    field.n_samples = static_cast<long>(samples.size());
    field.values.resize(grid.size());
    field.stderrs.resize(grid.size());
    const double n = static_cast<double>(samples.size());
    for (size_t g = 0; g < grid.size(); ++g) {
        double s1 = 0.0, s2 = 0.0;
        for (const auto& x : samples) {
            const double v = mollifier(x - grid[g]);
            s1 += v;
            s2 += v * v;
        }
        const double m = s1 / n;
        field.values[g] = m;
        field.stderrs[g] =
            samples.size() > 1 ? std::sqrt(std::max(0.0, (s2 / n - m * m) / (n - 1)))
                               : 0.0;
    }
    return field;
}

std::vector<Vec> make_grid(const Vec& center, double half_width, int n_per_axis) {
    const int d = static_cast<int>(center.size());
    const double step =
        n_per_axis > 1 ? 2.0 * half_width / (n_per_axis - 1) : 0.0;
    std::vector<Vec> grid;
    if (d == 2) {
        for (int i = 0; i < n_per_axis; ++i)
            for (int j = 0; j < n_per_axis; ++j) {
                Vec v(2);
                v << center(0) - half_width + i * step,
                     center(1) - half_width + j * step;
                grid.push_back(v);
            }
    } else if (d == 3) {
        for (int i = 0; i < n_per_axis; ++i)
            for (int j = 0; j < n_per_axis; ++j)
                for (int k = 0; k < n_per_axis; ++k) {
                    Vec v(3);
                    v << center(0) - half_width + i * step,
                         center(1) - half_width + j * step,
                         center(2) - half_width + k * step;
                    grid.push_back(v);
                }
    } else {
        throw UnsupportedDimensionError(d);
    }
    return grid;
}

double default_bandwidth(double lambda1_hat, double delta, long n_samples, int d,
                         double sigma_hat) {
    const double cap = std::sqrt(std::max(lambda1_hat, 0.0) * delta);
    const double rate =
        std::pow(static_cast<double>(n_samples), -1.0 / (d + 4)) * sigma_hat;
    const double eta = std::min(cap, rate);
    if (!(eta > 0))
        throw PreconditionError("default bandwidth degenerated to zero");
    return eta;
}

std::vector<DensityField> conditional_density_experiment(
    const ModelSpec& spec, const Vec& x0, const std::vector<double>& times,
    const std::vector<Vec>& grid, int replicas, Mollifier::Kind kind,
    double eta_override) {
    spec.validate();
    if (!x0.allFinite()) throw PreconditionError("x0 must be finite");
    const long N = spec.n_steps();
    std::vector<long> want_step;
    for (double t : times) {
        const long k = std::llround(t / spec.delta);
        if (k < 0 || k > N)
            throw PreconditionError("requested time outside the simulated horizon");
        want_step.push_back(k);
    }

    std::vector<std::vector<Vec>> pooled(times.size());
    for (auto& p : pooled) p.reserve(replicas);
    for (int r = 0; r < replicas; ++r) {
        Population pop = init_population(spec, x0, static_cast<uint64_t>(r));
        for (size_t ti = 0; ti < want_step.size(); ++ti)
            if (want_step[ti] == 0) pooled[ti].push_back(pop.particle(pop.tagged));
        for (long k = 1; k <= N; ++k) {
            step(pop, spec);
            if (pop.has_non_finite()) throw NumericalBlowupError(k, pop.t);
            for (size_t ti = 0; ti < want_step.size(); ++ti)
                if (want_step[ti] == k)
                    pooled[ti].push_back(pop.particle(pop.tagged));
        }
    }

    std::vector<DensityField> fields;
    for (size_t ti = 0; ti < times.size(); ++ti) {
        const auto& samples = pooled[ti];
        double eta = eta_override;
        if (!(eta > 0)) {
            // lambda1 proxy and spread from the pooled sample itself
            Mat mhat = Mat::Zero(spec.d, spec.d);
            Vec sum = Vec::Zero(spec.d), sum2 = Vec::Zero(spec.d);
            for (const auto& x : samples) {
                mhat += x.squaredNorm() * Mat::Identity(spec.d, spec.d) -
                        x * x.transpose();
                sum += x;
                sum2 += x.cwiseProduct(x);
            }
            mhat /= static_cast<double>(samples.size());
            const Vec meanv = sum / static_cast<double>(samples.size());
            const Vec varv =
                sum2 / static_cast<double>(samples.size()) - meanv.cwiseProduct(meanv);
            const double sigma_hat = std::sqrt(varv.mean());
            Eigen::SelfAdjointEigenSolver<Mat> es(mhat);
            const double lambda1_hat = spec.h.m * es.eigenvalues()(0);
            eta = default_bandwidth(lambda1_hat, spec.delta,
                                    static_cast<long>(samples.size()), spec.d,
                                    sigma_hat);
        }
        const Mollifier phi(kind, spec.d, eta);
        DensityField f = estimate_density(samples, grid, phi);
        f.t = want_step[ti] * spec.delta;
        f.x0 = x0;
        fields.push_back(std::move(f));
    }
    return fields;
}

void write_density_csv(const std::string& path, const DensityField& field) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    const int d = field.grid.empty() ? 0 : static_cast<int>(field.grid[0].size());
    for (int k = 1; k <= d; ++k) out << "v_" << k << ",";
    out << "value,stderr\n";
    for (size_t g = 0; g < field.grid.size(); ++g) {
        for (int k = 0; k < d; ++k) out << format_double(field.grid[g](k)) << ",";
        out << format_double(field.values[g]) << ","
            << format_double(field.stderrs[g]) << "\n";
    }
}

std::string density_metadata_json(const DensityField& field,
                                  const std::string& spec_hash) {
    nlohmann::json j;
    j["eta"] = field.eta;
    j["n_samples"] = field.n_samples;
    j["t"] = field.t;
    j["x0"] = std::vector<double>(field.x0.data(), field.x0.data() + field.x0.size());
    j["spec_hash"] = spec_hash;
    return j.dump(2);
}

}  // namespace landau
