#pragma once

#include <cmath>
#include <string>

#include "landau/errors.hpp"

namespace landau {

// Angular cross-section factor h(r), r = |z|^2, pinched between m and M.
// Constant h is the Maxwellian-molecules case; the other two kinds give
// non-constant coefficients while keeping the same bounds.
struct HFunction {
    enum class Kind { Constant, ExponentialFloor, RationalFloor };

    Kind kind = Kind::Constant;
    double m = 1.0;  // lower bound, > 0
    double M = 1.0;  // upper bound, >= m

    static HFunction constant(double c) {
        if (!(c > 0)) throw PreconditionError("constant h requires c > 0");
        return {Kind::Constant, c, c};
    }
    // h(r) = m + (M-m) e^{-r}
    static HFunction exponential_floor(double m, double M) {
        check_bounds(m, M);
        return {Kind::ExponentialFloor, m, M};
    }
    // h(r) = m + (M-m) / (1+r)
    static HFunction rational_floor(double m, double M) {
        check_bounds(m, M);
        return {Kind::RationalFloor, m, M};
    }

    double operator()(double r) const {
        switch (kind) {
            case Kind::Constant: return m;
            case Kind::ExponentialFloor: return m + (M - m) * std::exp(-r);
            case Kind::RationalFloor: return m + (M - m) / (1.0 + r);
        }
        return m;
    }

    // h'(r), used by divergence self-checks
    double deriv(double r) const {
        switch (kind) {
            case Kind::Constant: return 0.0;
            case Kind::ExponentialFloor: return -(M - m) * std::exp(-r);
            case Kind::RationalFloor: {
                const double s = 1.0 + r;
                return -(M - m) / (s * s);
            }
        }
        return 0.0;
    }

    bool is_constant() const { return kind == Kind::Constant; }

    std::string kind_name() const;
    static HFunction from_kind_name(const std::string& name, double m, double M);

  private:
    static void check_bounds(double m, double M) {
        if (!(m > 0) || !(M >= m))
            throw PreconditionError("h-function bounds require 0 < m <= M");
    }
};

}  // namespace landau
