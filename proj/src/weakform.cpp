#include "landau/weakform.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "landau/errors.hpp"
#include "landau/simulator.hpp"
#include "landau/stats.hpp"

namespace landau {

TestFunction::TestFunction(int d, std::vector<Monomial> monomials, std::string name)
    : d_(d), monomials_(std::move(monomials)), name_(std::move(name)) {
    for (const auto& m : monomials_) {
        if (static_cast<int>(m.powers.size()) != d)
            throw PreconditionError("monomial arity does not match dimension");
        int deg = 0;
        for (int p : m.powers) {
            if (p < 0) throw PreconditionError("negative monomial exponent");
            deg += p;
        }
        if (deg > 4) throw PreconditionError("test functions are limited to degree 4");
    }
}

TestFunction TestFunction::coordinate(int d, int i) {
    Monomial m{1.0, std::vector<int>(d, 0)};
    m.powers[i] = 1;
    return TestFunction(d, {m}, "v_" + std::to_string(i + 1));
}

TestFunction TestFunction::energy(int d) {
    std::vector<Monomial> ms;
    for (int i = 0; i < d; ++i) {
        Monomial m{1.0, std::vector<int>(d, 0)};
        m.powers[i] = 2;
        ms.push_back(m);
    }
    return TestFunction(d, std::move(ms), "energy");
}

TestFunction TestFunction::quadratic(int d, int i, int j) {
    Monomial m{1.0, std::vector<int>(d, 0)};
    m.powers[i] += 1;
    m.powers[j] += 1;
    return TestFunction(d, {m},
                        "v_" + std::to_string(i + 1) + "v_" + std::to_string(j + 1));
}

TestFunction TestFunction::polynomial(int d, std::vector<Monomial> monomials) {
    return TestFunction(d, std::move(monomials), "polynomial");
}

namespace {

double mono_eval(const TestFunction::Monomial& m, const Vec& v) {
    double r = m.coef;
    for (size_t k = 0; k < m.powers.size(); ++k)
        for (int p = 0; p < m.powers[k]; ++p) r *= v(k);
    return r;
}

}  // namespace

double TestFunction::value(const Vec& v) const {
    double r = 0.0;
    for (const auto& m : monomials_) r += mono_eval(m, v);
    return r;
}

Vec TestFunction::gradient(const Vec& v) const {
    Vec g = Vec::Zero(d_);
    for (const auto& m : monomials_) {
        for (int k = 0; k < d_; ++k) {
            if (m.powers[k] == 0) continue;
            Monomial dm = m;
            dm.coef *= m.powers[k];
            dm.powers[k] -= 1;
            g(k) += mono_eval(dm, v);
        }
    }
    return g;
}

Mat TestFunction::hessian(const Vec& v) const {
    Mat hess = Mat::Zero(d_, d_);
    for (const auto& m : monomials_) {
        for (int k = 0; k < d_; ++k) {
            if (m.powers[k] == 0) continue;
            Monomial dm = m;
            dm.coef *= m.powers[k];
            dm.powers[k] -= 1;
            for (int l = 0; l < d_; ++l) {
                if (dm.powers[l] == 0) continue;
                Monomial d2m = dm;
                d2m.coef *= dm.powers[l];
                d2m.powers[l] -= 1;
                hess(k, l) += mono_eval(d2m, v);
            }
        }
    }
    return hess;
}

double weakform_rhs(const Population& pop, const TestFunction& phi,
                    const HFunction& h) {
    if (pop.P < 2) throw PreconditionError("weakform_rhs requires P >= 2");
    const int d = pop.d;
    const long P = pop.P;

    // per-particle derivative tables (independent of the partner q)
    std::vector<double> grads(P * d), hess_tr(P), hess_full(P * d * d);
    for (long p = 0; p < P; ++p) {
        const Vec g = phi.gradient(pop.particle(p));
        const Mat H = phi.hessian(pop.particle(p));
        for (int k = 0; k < d; ++k) grads[p * d + k] = g(k);
        hess_tr[p] = H.trace();
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) hess_full[(p * d + r) * d + c] = H(r, c);
    }

    // stratified partner subsampling above the O(P^2) comfort limit
    const long max_partners = 512;
    const long stride = P > 4096 ? (P + max_partners - 1) / max_partners : 1;

    const double* X = pop.X.data();
    double acc = 0.0;
    for (long p = 0; p < P; ++p) {
        const double* xp = X + p * d;
        const double* gp = grads.data() + p * d;
        const double* Hp = hess_full.data() + p * d * d;
        double local = 0.0;
        long count = 0;
        for (long q = p % stride; q < P; q += stride) {
            ++count;
            if (q == p) continue;  // z = 0 contributes nothing
            double z[3], r2 = 0.0;
            for (int k = 0; k < d; ++k) {
                z[k] = xp[k] - X[q * d + k];
                r2 += z[k] * z[k];
            }
            const double hh = h(r2);
            double zHz = 0.0, zg = 0.0;
            for (int r = 0; r < d; ++r) {
                zg += z[r] * gp[r];
                for (int c = 0; c < d; ++c) zHz += z[r] * Hp[r * d + c] * z[c];
            }
            local += 0.5 * hh * (r2 * hess_tr[p] - zHz) - (d - 1) * hh * zg;
        }
        acc += local * (static_cast<double>(P) / static_cast<double>(count));
    }
    return acc / (static_cast<double>(P) * static_cast<double>(P));
}

std::vector<MomentBalanceRow> moment_balance_check(
    const std::vector<Trajectory>& replicas, const TestFunction& phi,
    const HFunction& h, double window_lo, double window_hi) {
    if (replicas.empty()) throw PreconditionError("no replica trajectories");

    // snapshot times inside the window (shared grid across replicas)
    std::vector<double> times;
    for (const auto& pop : replicas[0].snapshots)
        if (pop.t >= window_lo - 1e-12 && pop.t <= window_hi + 1e-12)
            times.push_back(pop.t);
    if (times.size() < 5)
        throw PreconditionError(
            "moment balance needs >= 5 recorded times in the window");

    const auto R = replicas.size();
    const auto T = times.size();
    std::vector<std::vector<double>> mom(R, std::vector<double>(T)),
        rhs(R, std::vector<double>(T));
    for (size_t r = 0; r < R; ++r) {
        size_t ti = 0;
        for (const auto& pop : replicas[r].snapshots) {
            if (pop.t < window_lo - 1e-12 || pop.t > window_hi + 1e-12) continue;
            if (ti >= T || std::abs(pop.t - times[ti]) > 1e-9)
                throw PreconditionError("replica snapshot grids do not match");
            double m = 0.0;
            for (long p = 0; p < pop.P; ++p) m += phi.value(pop.particle(p));
            mom[r][ti] = m / static_cast<double>(pop.P);
            rhs[r][ti] = weakform_rhs(pop, phi, h);
            ++ti;
        }
    }

    std::vector<MomentBalanceRow> rows;
    for (size_t i = 1; i + 1 < T; ++i) {
        const double dt = times[i + 1] - times[i - 1];
        std::vector<double> res(R), lhs_r(R);
        double mom_mean = 0.0, rhs_mean = 0.0;
        for (size_t r = 0; r < R; ++r) {
            lhs_r[r] = (mom[r][i + 1] - mom[r][i - 1]) / dt;
            res[r] = lhs_r[r] - rhs[r][i];
            mom_mean += mom[r][i];
            rhs_mean += rhs[r][i];
        }
        MomentBalanceRow row;
        row.t = times[i];
        row.moment = mom_mean / static_cast<double>(R);
        row.lhs_derivative = mean(lhs_r);
        row.rhs = rhs_mean / static_cast<double>(R);
        row.residual = mean(res);
        row.se = R > 1 ? standard_error(res) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

void write_moment_balance_csv(const std::string& path,
                              const std::vector<MomentBalanceRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "t,moment,lhs_derivative,rhs,residual,se\n";
    for (const auto& r : rows)
        out << format_double(r.t) << "," << format_double(r.moment) << ","
            << format_double(r.lhs_derivative) << "," << format_double(r.rhs) << ","
            << format_double(r.residual) << "," << format_double(r.se) << "\n";
}

}  // namespace landau
