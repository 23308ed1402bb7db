#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "landau/model.hpp"
#include "landau/rng.hpp"

namespace landau {

// Relative threshold for the support non-degeneracy check:
// lambda_min of the empirical dispersion matrix must exceed
// kH3RelativeTol * mean energy.
inline constexpr double kH3RelativeTol = 1e-6;

// Draw P iid particles from spec.init. If pin_tagged_at is set, particle 0 is
// overwritten with that point (conditioning on the initial position). The
// support check runs on the final population and throws
// DegenerateInitialLawError when it fails.
Population init_population(const ModelSpec& spec,
                           std::optional<Vec> pin_tagged_at = std::nullopt,
                           uint64_t replica = 0);

// One Euler step with per-pair shared Brownian increments:
//   X_i += (delta/P) sum_j b(X_i - X_j) + (1/sqrt(P)) sum_j sigma(X_i - X_j) dB_ij
// dB_ij = dB_ji keyed by (step, min(i,j), max(i,j)); momentum cancels pathwise.
// step_offset shifts the noise counter (used by fine inner meshes).
void step_pairwise(Population& pop, const ModelSpec& spec,
                   uint64_t step_offset = 0, double delta_override = 0.0);

// One Euler step sampling the conditionally-Gaussian increment directly:
//   X_i += delta * B_i + sqrt(delta * A_i) xi_i,  xi_i iid N(0, I)
// with A_i, B_i the empirical-measure averages of a and b at X_i.
void step_meanfield_gaussian(Population& pop, const ModelSpec& spec,
                             uint64_t step_offset = 0, double delta_override = 0.0);

// Dispatch on spec.scheme.
void step(Population& pop, const ModelSpec& spec,
          uint64_t step_offset = 0, double delta_override = 0.0);

Trajectory run(const ModelSpec& spec, const RecordingPlan& record,
               std::optional<Vec> pin_tagged_at = std::nullopt,
               uint64_t replica = 0);

namespace noise {

// counter layout shared by the pairwise scheme and the step decomposition
inline uint64_t pair_counter(long i, long j) {
    const auto a = static_cast<uint64_t>(std::min(i, j));
    const auto b = static_cast<uint64_t>(std::max(i, j));
    return (a << 32) | b;
}

// the Brownian increment dB_ij over one step of size delta (shared per pair)
inline void pair_increment(const RngStream& st, uint64_t step_counter, long i,
                           long j, int d, double delta, double* w) {
    st.normals(step_counter, pair_counter(i, j), d, w);
    const double sq = std::sqrt(delta);
    for (int k = 0; k < d; ++k) w[k] *= sq;
}

}  // namespace noise

// Symmetric PSD square root with eigenvalue clamping at zero.
// Throws NonPsdCovarianceError when an eigenvalue is below -1e-8 * trace.
Mat psd_sqrt(const Mat& A);

// ---- snapshot / moment file formats ----

void write_snapshot_csv(const std::string& path, const Population& pop,
                        uint64_t seed, const std::string& spec_hash);
Population read_snapshot_csv(const std::string& path);
void write_moments_csv(const std::string& path,
                       const std::vector<MomentRow>& rows, int d);

// fixed shortest-roundtrip formatting shared by all writers
std::string format_double(double v);

}  // namespace landau
