#pragma once

#include <string>
#include <vector>

#include "landau/model.hpp"

namespace landau {

// Polynomial test function with analytic gradient and Hessian. Degree <= 4.
class TestFunction {
  public:
    struct Monomial {
        double coef;
        std::vector<int> powers;  // one exponent per axis
    };

    static TestFunction coordinate(int d, int i);        // v_i
    static TestFunction energy(int d);                   // |v|^2
    static TestFunction quadratic(int d, int i, int j);  // v_i v_j
    static TestFunction polynomial(int d, std::vector<Monomial> monomials);

    double value(const Vec& v) const;
    Vec gradient(const Vec& v) const;
    Mat hessian(const Vec& v) const;

    int dim() const { return d_; }
    const std::string& name() const { return name_; }

  private:
    TestFunction(int d, std::vector<Monomial> monomials, std::string name);
    int d_;
    std::vector<Monomial> monomials_;
    std::string name_;
};

// Empirical collision-operator pairing:
//   (1/P^2) sum_{p,q} [ (1/2) sum_ij a_ij(X_p - X_q) d_ij phi(X_p)
//                       + sum_i b_i(X_p - X_q) d_i phi(X_p) ]
// For P > 4096 the inner sum is subsampled over ~512 stratified partners.
double weakform_rhs(const Population& pop, const TestFunction& phi,
                    const HFunction& h);

struct MomentBalanceRow {
    double t;
    double moment;          // replica-averaged (1/P) sum phi(X_p)
    double lhs_derivative;  // central finite difference of the moment
    double rhs;             // replica-averaged weakform_rhs
    double residual;
    double se;              // Monte Carlo standard error of the residual
};

// Tests d/dt <phi, P_t> = RHS on recorded snapshots of replica trajectories
// inside [window_lo, window_hi]. Needs >= 5 recorded times in the window.
std::vector<MomentBalanceRow> moment_balance_check(
    const std::vector<Trajectory>& replicas, const TestFunction& phi,
    const HFunction& h, double window_lo, double window_hi);

void write_moment_balance_csv(const std::string& path,
                              const std::vector<MomentBalanceRow>& rows);

}  // namespace landau
