#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "landau/hfunction.hpp"
#include "landau/kernels.hpp"

namespace landau {

enum class Scheme { PairwiseSharedNoise, MeanfieldGaussian };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct InitialLaw {
    enum class Kind { Gaussian, TwoPoint, UniformBall, Empirical };

    Kind kind = Kind::Gaussian;
    // gaussian
    Vec mean;
    Mat cov;
    // two-point
    Vec x1, x2;
    // uniform-ball
    Vec center;
    double radius = 1.0;
    // empirical
    std::string file;
    std::vector<Vec> points;  // loaded from `file`

    static InitialLaw gaussian(Vec mean, Mat cov);
    static InitialLaw standard_gaussian(int d);
    static InitialLaw two_point(Vec x1, Vec x2);
    static InitialLaw uniform_ball(Vec center, double radius);
    static InitialLaw empirical(std::string file);

    std::string kind_name() const;
};

struct ModelSpec {
    int d = 2;
    HFunction h = HFunction::constant(1.0);
    long P = 1000;             // particle count, >= 2
    double delta = 1e-3;       // time step
    double T = 1.0;            // horizon; must equal n_steps() * delta
    Scheme scheme = Scheme::PairwiseSharedNoise;
    uint64_t seed = 0;
    InitialLaw init = InitialLaw::standard_gaussian(2);

    bool suppress_noise = false;  // test hook: drift-only stepping

    long n_steps() const;
    void validate() const;  // throws PreconditionError / UnsupportedDimensionError
};

struct Population {
    double t = 0.0;
    long step_index = 0;
    int d = 2;
    long P = 0;
    std::vector<double> X;   // P x d, row-major
    long tagged = 0;
    uint64_t rng_key = 0;    // replica-level stream key (lineage)

    double* row(long i) { return X.data() + i * d; }
    const double* row(long i) const { return X.data() + i * d; }
    Vec particle(long i) const {
        return Eigen::Map<const Vec>(row(i), d);
    }

    Vec mean_velocity() const;
    double mean_energy() const;           // (1/P) sum |X_i|^2
    Mat dispersion_matrix() const;        // (1/P) sum (|X_i|^2 I - X_i X_i^*)
    bool has_non_finite() const;
};

struct RecordingPlan {
    long snapshot_every = 0;   // 0 = only initial and final states
    long moment_every = 1;     // 0 = off
    bool tagged_path = false;  // record tagged particle at every step
};

struct MomentRow {
    double t;
    Vec mean;
    double energy;
    double min_eig_dispersion;
};

struct Trajectory {
    std::vector<Population> snapshots;       // always includes t=0 and t=T
    std::vector<MomentRow> moments;
    std::vector<double> tagged_times;
    std::vector<Vec> tagged_path;
    uint64_t seed = 0;
};

}  // namespace landau
