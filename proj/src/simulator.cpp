#include "landau/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "landau/errors.hpp"

namespace landau {

std::string scheme_name(Scheme s) {
    return s == Scheme::PairwiseSharedNoise ? "pairwise-shared-noise"
                                            : "meanfield-gaussian";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "pairwise-shared-noise") return Scheme::PairwiseSharedNoise;
    if (name == "meanfield-gaussian") return Scheme::MeanfieldGaussian;
    throw ConfigError("unknown scheme '" + name + "'");
}

// ---- InitialLaw ----

InitialLaw InitialLaw::gaussian(Vec mean, Mat cov) {
    InitialLaw law;
    law.kind = Kind::Gaussian;
    law.mean = std::move(mean);
    law.cov = std::move(cov);
    return law;
}

InitialLaw InitialLaw::standard_gaussian(int d) {
    return gaussian(Vec::Zero(d), Mat::Identity(d, d));
}

InitialLaw InitialLaw::two_point(Vec x1, Vec x2) {
    InitialLaw law;
    law.kind = Kind::TwoPoint;
    law.x1 = std::move(x1);
    law.x2 = std::move(x2);
    return law;
}

InitialLaw InitialLaw::uniform_ball(Vec center, double radius) {
    InitialLaw law;
    law.kind = Kind::UniformBall;
    law.center = std::move(center);
    law.radius = radius;
    return law;
}

InitialLaw InitialLaw::empirical(std::string file) {
    InitialLaw law;
    law.kind = Kind::Empirical;
    law.file = std::move(file);
    return law;
}

std::string InitialLaw::kind_name() const {
    switch (kind) {
        case Kind::Gaussian: return "gaussian";
        case Kind::TwoPoint: return "two-point";
        case Kind::UniformBall: return "uniform-ball";
        case Kind::Empirical: return "empirical";
    }
    return "gaussian";
}

// ---- ModelSpec ----

long ModelSpec::n_steps() const {
    if (T <= 0.0) return 0;
    return std::llround(T / delta);
}

void ModelSpec::validate() const {
    if (d != 2 && d != 3) throw UnsupportedDimensionError(d);
    if (P < 2) throw PreconditionError("particle count P must be >= 2");
    if (!(delta > 0)) throw PreconditionError("delta must be positive");
    if (T < 0) throw PreconditionError("horizon T must be nonnegative");
    if (T > 0) {
        if (delta > T * (1 + 1e-12))
            throw PreconditionError("delta must not exceed T");
        const long n = n_steps();
        if (n < 1 || std::abs(n * delta - T) > 1e-9 * std::max(T, delta))
            throw PreconditionError("T must be an integer multiple of delta");
    }
    auto check_dim = [&](const Vec& v, const char* what) {
        if (v.size() != d)
            throw PreconditionError(std::string(what) + " has dimension " +
                                    std::to_string(v.size()) + ", expected " +
                                    std::to_string(d));
    };
    switch (init.kind) {
        case InitialLaw::Kind::Gaussian:
            check_dim(init.mean, "initial mean");
            if (init.cov.rows() != d || init.cov.cols() != d)
                throw PreconditionError("initial covariance must be d x d");
            break;
        case InitialLaw::Kind::TwoPoint:
            check_dim(init.x1, "two-point x1");
            check_dim(init.x2, "two-point x2");
            break;
        case InitialLaw::Kind::UniformBall:
            check_dim(init.center, "ball center");
            if (!(init.radius > 0))
                throw PreconditionError("ball radius must be positive");
            break;
        case InitialLaw::Kind::Empirical:
            if (init.points.empty())
                throw PreconditionError("empirical initial law has no points");
            for (const auto& p : init.points) check_dim(p, "empirical point");
            break;
    }
}

// ---- Population ----

Vec Population::mean_velocity() const {
    Vec m = Vec::Zero(d);
    for (long i = 0; i < P; ++i)
        m += Eigen::Map<const Vec>(row(i), d);
    return m / static_cast<double>(P);
}

double Population::mean_energy() const {
    double e = 0.0;
    for (double v : X) e += v * v;
    return e / static_cast<double>(P);
}

Mat Population::dispersion_matrix() const {
    Mat m = Mat::Zero(d, d);
    for (long i = 0; i < P; ++i) {
        const auto x = Eigen::Map<const Vec>(row(i), d);
        m += x.squaredNorm() * Mat::Identity(d, d) - x * x.transpose();
    }
    return m / static_cast<double>(P);
}

bool Population::has_non_finite() const {
    for (double v : X)
        if (!std::isfinite(v)) return true;
    return false;
}

// ---- init ----

Population init_population(const ModelSpec& spec, std::optional<Vec> pin_tagged_at,
                           uint64_t replica) {
    spec.validate();
    const int d = spec.d;
    Population pop;
    pop.d = d;
    pop.P = spec.P;
    pop.X.assign(spec.P * d, 0.0);
    pop.tagged = 0;
    pop.rng_key = RngStream(spec.seed, "noise").substream(replica).key();

    const RngStream init_rng = RngStream(spec.seed, "init").substream(replica);
    const InitialLaw& law = spec.init;

    Mat chol;
    if (law.kind == InitialLaw::Kind::Gaussian) {
        Eigen::LLT<Mat> llt(law.cov);
        if (llt.info() != Eigen::Success)
            throw PreconditionError("initial covariance is not positive definite");
        chol = llt.matrixL();
    }

    double z[4];
    for (long p = 0; p < spec.P; ++p) {
        Eigen::Map<Vec> x(pop.row(p), d);
        switch (law.kind) {
            case InitialLaw::Kind::Gaussian: {
                init_rng.normals(p, 0, d, z);
                x = law.mean + chol * Eigen::Map<const Vec>(z, d);
                break;
            }
            case InitialLaw::Kind::TwoPoint:
                x = init_rng.uniform(p, 1) < 0.5 ? law.x1 : law.x2;
                break;
            case InitialLaw::Kind::UniformBall: {
                init_rng.normals(p, 0, d, z);
                Vec dir = Eigen::Map<const Vec>(z, d);
                const double n = dir.norm();
                dir = n > 0 ? Vec(dir / n) : Vec(Vec::Unit(d, 0));
                const double u = init_rng.uniform(p, 1);
                x = law.center + law.radius * std::pow(u, 1.0 / d) * dir;
                break;
            }
            case InitialLaw::Kind::Empirical: {
                const auto n = static_cast<long>(law.points.size());
                auto idx = static_cast<long>(init_rng.uniform(p, 1) * n);
                idx = std::min(idx, n - 1);
                x = law.points[idx];
                break;
            }
        }
    }

    if (pin_tagged_at) {
        if (pin_tagged_at->size() != d)
            throw PreconditionError("pin_tagged_at has wrong dimension");
        Eigen::Map<Vec>(pop.row(pop.tagged), d) = *pin_tagged_at;
    }

    // support check: empirical dispersion must not be (near-)singular
    const Mat disp = pop.dispersion_matrix();
    Eigen::SelfAdjointEigenSolver<Mat> es(disp);
    const double lmin = es.eigenvalues()(0);
    if (lmin <= kH3RelativeTol * pop.mean_energy()) {
        std::ostringstream dir;
        dir << "(" << es.eigenvectors().col(0).transpose() << ")";
        throw DegenerateInitialLawError(lmin, dir.str());
    }
    return pop;
}

// ---- stepping ----

namespace {

template <int D>
void step_pairwise_impl(Population& pop, const ModelSpec& spec,
                        uint64_t step_counter, double delta) {
    const long P = pop.P;
    const HFunction h = spec.h;
    const double* X = pop.X.data();
    std::vector<double> Xn(pop.X.size());
    const double drift_scale = delta / static_cast<double>(P);
    const double noise_scale = 1.0 / std::sqrt(static_cast<double>(P));
    const double sq = std::sqrt(delta);
    const RngStream st(pop.rng_key);
    const bool quiet = spec.suppress_noise;

#pragma omp parallel for schedule(static)
    for (long i = 0; i < P; ++i) {
        double drift[D] = {};
        double nz[D] = {};
        double w[4];
        const double* xi = X + i * D;
        for (long j = 0; j < P; ++j) {
            if (j == i) continue;
            detail::accum_b<D>(xi, X + j * D, h, drift);
            if (!quiet) {
                st.normals(step_counter, noise::pair_counter(i, j), D, w);
                for (int k = 0; k < D; ++k) w[k] *= sq;
                detail::accum_sigma_mul<D>(xi, X + j * D, h, w, nz);
            }
        }
        for (int k = 0; k < D; ++k)
            Xn[i * D + k] = xi[k] + drift_scale * drift[k] + noise_scale * nz[k];
    }
    pop.X = std::move(Xn);
    pop.t += delta;
    pop.step_index += 1;
}

// closed-form symmetric PSD square root, 2x2
inline void psd_sqrt2(const double A[4], double S[4]) {
    const double a = A[0], b = A[1], c = A[3];
    const double tr = a + c;
    const double half = 0.5 * (a - c);
    const double disc = std::sqrt(half * half + b * b);
    double l1 = 0.5 * tr + disc;
    double l2 = 0.5 * tr - disc;
    if (l2 < -1e-8 * std::max(tr, 0.0)) throw NonPsdCovarianceError(l2);
    l1 = std::max(l1, 0.0);
    l2 = std::max(l2, 0.0);
    double u0, u1;
    if (std::abs(b) > 0) {
        u0 = b;
        u1 = l1 - a;
    } else if (a >= c) {
        u0 = 1;
        u1 = 0;
    } else {
        u0 = 0;
        u1 = 1;
    }
    const double n = std::sqrt(u0 * u0 + u1 * u1);
    u0 /= n;
    u1 /= n;
    const double s1 = std::sqrt(l1), s2 = std::sqrt(l2);
    S[0] = s2 + (s1 - s2) * u0 * u0;
    S[1] = (s1 - s2) * u0 * u1;
    S[2] = S[1];
    S[3] = s2 + (s1 - s2) * u1 * u1;
}

inline void psd_sqrt3(const double A[9], double S[9]) {
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = A[i * 3 + j];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
    Eigen::Vector3d ev = es.eigenvalues();
    const double tr = std::max(M.trace(), 0.0);
    if (ev(0) < -1e-8 * tr) throw NonPsdCovarianceError(ev(0));
    for (int k = 0; k < 3; ++k) ev(k) = std::sqrt(std::max(ev(k), 0.0));
    const Eigen::Matrix3d R =
        es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) S[i * 3 + j] = R(i, j);
}

template <int D>
void step_meanfield_impl(Population& pop, const ModelSpec& spec,
                         uint64_t step_counter, double delta) {
    const long P = pop.P;
    const HFunction h = spec.h;
    const double* X = pop.X.data();
    std::vector<double> Xn(pop.X.size());
    const double invP = 1.0 / static_cast<double>(P);
    const RngStream st(pop.rng_key);
    const bool quiet = spec.suppress_noise;

#pragma omp parallel for schedule(static)
    for (long i = 0; i < P; ++i) {
        double A[D * D] = {};
        double B[D] = {};
        const double* xi = X + i * D;
        for (long j = 0; j < P; ++j)
            detail::accum_ab<D>(xi, X + j * D, h, A, B);
        for (int k = 0; k < D * D; ++k) A[k] *= invP * delta;
        for (int k = 0; k < D; ++k) B[k] *= invP;

        double out[D];
        for (int k = 0; k < D; ++k) out[k] = xi[k] + delta * B[k];
        if (!quiet) {
            double S[D * D];
            if constexpr (D == 2)
                psd_sqrt2(A, S);
            else
                psd_sqrt3(A, S);
            double xi_n[4];
            st.normals(step_counter, static_cast<uint64_t>(i), D, xi_n);
            for (int r = 0; r < D; ++r)
                for (int c = 0; c < D; ++c) out[r] += S[r * D + c] * xi_n[c];
        }
        for (int k = 0; k < D; ++k) Xn[i * D + k] = out[k];
    }
    pop.X = std::move(Xn);
    pop.t += delta;
    pop.step_index += 1;
}

}  // namespace

void step_pairwise(Population& pop, const ModelSpec& spec, uint64_t step_offset,
                   double delta_override) {
    if (pop.P < 2) throw PreconditionError("stepping requires P >= 2");
    const double delta = delta_override > 0 ? delta_override : spec.delta;
    const uint64_t c = step_offset + static_cast<uint64_t>(pop.step_index);
    if (pop.d == 2)
        step_pairwise_impl<2>(pop, spec, c, delta);
    else if (pop.d == 3)
        step_pairwise_impl<3>(pop, spec, c, delta);
    else
        throw UnsupportedDimensionError(pop.d);
}

void step_meanfield_gaussian(Population& pop, const ModelSpec& spec,
                             uint64_t step_offset, double delta_override) {
    if (pop.P < 2) throw PreconditionError("stepping requires P >= 2");
    const double delta = delta_override > 0 ? delta_override : spec.delta;
    const uint64_t c = step_offset + static_cast<uint64_t>(pop.step_index);
    if (pop.d == 2)
        step_meanfield_impl<2>(pop, spec, c, delta);
    else if (pop.d == 3)
        step_meanfield_impl<3>(pop, spec, c, delta);
    else
        throw UnsupportedDimensionError(pop.d);
}

void step(Population& pop, const ModelSpec& spec, uint64_t step_offset,
          double delta_override) {
    if (spec.scheme == Scheme::PairwiseSharedNoise)
        step_pairwise(pop, spec, step_offset, delta_override);
    else
        step_meanfield_gaussian(pop, spec, step_offset, delta_override);
}

// ---- run ----

namespace {

MomentRow make_moment_row(const Population& pop) {
    Eigen::SelfAdjointEigenSolver<Mat> es(pop.dispersion_matrix());
    return MomentRow{pop.t, pop.mean_velocity(), pop.mean_energy(),
                     es.eigenvalues()(0)};
}

}  // namespace

Trajectory run(const ModelSpec& spec, const RecordingPlan& record,
               std::optional<Vec> pin_tagged_at, uint64_t replica) {
    spec.validate();
    Trajectory traj;
    traj.seed = spec.seed;
    Population pop = init_population(spec, std::move(pin_tagged_at), replica);

    auto record_state = [&](bool force_snapshot, long k) {
        if (force_snapshot ||
            (record.snapshot_every > 0 && k % record.snapshot_every == 0))
            traj.snapshots.push_back(pop);
        if (record.moment_every > 0 &&
            (force_snapshot || k % record.moment_every == 0))
            traj.moments.push_back(make_moment_row(pop));
        if (record.tagged_path) {
            traj.tagged_times.push_back(pop.t);
            traj.tagged_path.push_back(pop.particle(pop.tagged));
        }
    };

    const long N = spec.n_steps();
    record_state(true, 0);
    for (long k = 1; k <= N; ++k) {
        step(pop, spec);
        if (pop.has_non_finite()) throw NumericalBlowupError(k, pop.t);
        record_state(k == N, k);
    }
    return traj;
}

// ---- PSD square root (generic) ----

Mat psd_sqrt(const Mat& A) {
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    Vec ev = es.eigenvalues();
    const double tr = std::max(A.trace(), 0.0);
    if (ev(0) < -1e-8 * tr) throw NonPsdCovarianceError(ev(0));
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        ev(k) = std::sqrt(std::max(ev(k), 0.0));
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// ---- file formats ----

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_snapshot_csv(const std::string& path, const Population& pop,
                        uint64_t seed, const std::string& spec_hash) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "# d=" << pop.d << ",P=" << pop.P << ",t=" << format_double(pop.t)
        << ",step_index=" << pop.step_index << ",seed=" << seed
        << ",spec_hash=" << spec_hash << "\n";
    for (long i = 0; i < pop.P; ++i) {
        for (int k = 0; k < pop.d; ++k) {
            if (k) out << ",";
            out << format_double(pop.row(i)[k]);
        }
        out << "\n";
    }
}

Population read_snapshot_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::string header;
    std::getline(in, header);
    Population pop;
    if (header.rfind("# ", 0) != 0)
        throw ConfigError("snapshot '" + path + "' missing header");
    {
        std::istringstream hs(header.substr(2));
        std::string field;
        while (std::getline(hs, field, ',')) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) continue;
            const std::string k = field.substr(0, eq), v = field.substr(eq + 1);
            if (k == "d") pop.d = std::stoi(v);
            else if (k == "P") pop.P = std::stol(v);
            else if (k == "t") pop.t = std::stod(v);
            else if (k == "step_index") pop.step_index = std::stol(v);
        }
    }
    pop.X.reserve(pop.P * pop.d);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) pop.X.push_back(std::stod(cell));
    }
    if (static_cast<long>(pop.X.size()) != pop.P * pop.d)
        throw ConfigError("snapshot '" + path + "' row count mismatch");
    return pop;
}

void write_moments_csv(const std::string& path, const std::vector<MomentRow>& rows,
                       int d) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "t";
    for (int k = 1; k <= d; ++k) out << ",mean_" << k;
    out << ",energy,min_eig_empirical\n";
    for (const auto& r : rows) {
        out << format_double(r.t);
        for (int k = 0; k < d; ++k) out << "," << format_double(r.mean(k));
        out << "," << format_double(r.energy) << ","
            << format_double(r.min_eig_dispersion) << "\n";
    }
}

}  // namespace landau
