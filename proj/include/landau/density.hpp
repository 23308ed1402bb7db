#pragma once

#include <string>
#include <vector>

#include "landau/model.hpp"

namespace landau {

// Compactly supported approximate identity phi_eta(x) = eta^{-d} phi(x/eta),
// zero outside |x| <= eta, integrating to one. Doubles as the KDE kernel.
class Mollifier {
  public:
    enum class Kind { Bump, ProductCosine };

    Mollifier(Kind kind, int d, double eta);

    double eta() const { return eta_; }
    int dim() const { return d_; }
    Kind kind() const { return kind_; }

    // phi_eta at displacement x (size d)
    double operator()(const Vec& x) const;
    double at_zero() const;  // eta^{-d} phi(0)

    // base phi at unscaled u, |u| support radius 1
    double base(const Vec& u) const;

  private:
    Kind kind_;
    int d_;
    double eta_;
    double norm_;        // normalization constant of the base bump
    double cube_half_;   // product-cosine per-axis half width (1/sqrt(d))
};

struct DensityField {
    std::vector<Vec> grid;
    std::vector<double> values;   // estimated density
    std::vector<double> stderrs;  // Monte Carlo standard error per point
    double eta = 0.0;
    long n_samples = 0;
    double t = 0.0;
    Vec x0;
};

// values[g] = (1/n) sum_s phi_eta(samples[s] - grid[g])
DensityField estimate_density(const std::vector<Vec>& samples,
                              const std::vector<Vec>& grid,
                              const Mollifier& mollifier);

// axis-aligned uniform lattice: center +- half_width, n_per_axis points per axis
std::vector<Vec> make_grid(const Vec& center, double half_width, int n_per_axis);

// Default bandwidth: min(sqrt(lambda1_hat * delta), n^{-1/(d+4)} * sigma_hat).
double default_bandwidth(double lambda1_hat, double delta, long n_samples, int d,
                         double sigma_hat);

// Runs `replicas` independent populations with the tagged particle pinned at
// x0, pools the tagged position at each requested time (one sample per
// replica) and returns one KDE field per time. Times are rounded to the step
// grid. eta_override <= 0 selects the default bandwidth rule.
std::vector<DensityField> conditional_density_experiment(
    const ModelSpec& spec, const Vec& x0, const std::vector<double>& times,
    const std::vector<Vec>& grid, int replicas,
    Mollifier::Kind kind = Mollifier::Kind::Bump, double eta_override = 0.0);

void write_density_csv(const std::string& path, const DensityField& field);
std::string density_metadata_json(const DensityField& field,
                                  const std::string& spec_hash);

}  // namespace landau
