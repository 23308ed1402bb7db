#include "landau/hfunction.hpp"

namespace landau {

std::string HFunction::kind_name() const {
    switch (kind) {
        case Kind::Constant: return "constant";
        case Kind::ExponentialFloor: return "exponential-floor";
        case Kind::RationalFloor: return "rational-floor";
    }
    return "constant";
}

HFunction HFunction::from_kind_name(const std::string& name, double m, double M) {
    if (name == "constant") {
        if (m != M)
            throw ConfigError("constant h requires m == M (got m=" +
                              std::to_string(m) + ", M=" + std::to_string(M) + ")");
        return constant(m);
    }
    if (name == "exponential-floor") return exponential_floor(m, M);
    if (name == "rational-floor") return rational_floor(m, M);
    throw ConfigError("unknown h-function kind '" + name + "'");
}

}  // namespace landau
