#include "landau/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "landau/bounds.hpp"
#include "landau/errors.hpp"
#include "landau/rng.hpp"
#include "landau/scheme_analysis.hpp"
#include "landau/simulator.hpp"
#include "landau/stats.hpp"
#include "landau/weakform.hpp"

namespace landau {

const char* kVersion = "0.1.0";

namespace {

using nlohmann::json;

Vec to_vec(const json& j, const char* field) {
    if (!j.is_array()) throw ConfigError(std::string(field) + ": expected an array");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

Mat to_mat(const json& j, const char* field) {
    if (!j.is_array() || j.empty())
        throw ConfigError(std::string(field) + ": expected a matrix");
    const auto rows = j.size(), cols = j[0].size();
    Mat m(rows, cols);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    return m;
}

InitialLaw parse_init(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian")
        return InitialLaw::gaussian(to_vec(j.at("mean"), "init.mean"),
                                    to_mat(j.at("cov"), "init.cov"));
    if (kind == "two-point")
        return InitialLaw::two_point(to_vec(j.at("x1"), "init.x1"),
                                     to_vec(j.at("x2"), "init.x2"));
    if (kind == "uniform-ball")
        return InitialLaw::uniform_ball(to_vec(j.at("center"), "init.center"),
                                        j.at("radius").get<double>());
    if (kind == "empirical") {
        InitialLaw law = InitialLaw::empirical(j.at("file").get<std::string>());
        std::ifstream in(law.file);
        if (!in) throw ConfigError("init.file: cannot open '" + law.file + "'");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::vector<double> row;
            size_t pos = 0;
            while (pos < line.size()) {
                size_t next = line.find(',', pos);
                if (next == std::string::npos) next = line.size();
                row.push_back(std::stod(line.substr(pos, next - pos)));
                pos = next + 1;
            }
            law.points.push_back(Eigen::Map<const Vec>(row.data(), row.size()));
        }
        return law;
    }
    throw ConfigError("init.kind: unknown initial law '" + kind + "'");
}

json init_to_json(const InitialLaw& law) {
    json j;
    j["kind"] = law.kind_name();
    auto arr = [](const Vec& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    switch (law.kind) {
        case InitialLaw::Kind::Gaussian: {
            j["mean"] = arr(law.mean);
            std::vector<std::vector<double>> cov;
            for (Eigen::Index r = 0; r < law.cov.rows(); ++r)
                cov.push_back(std::vector<double>(law.cov.row(r).begin(),
                                                  law.cov.row(r).end()));
            j["cov"] = cov;
            break;
        }
        case InitialLaw::Kind::TwoPoint:
            j["x1"] = arr(law.x1);
            j["x2"] = arr(law.x2);
            break;
        case InitialLaw::Kind::UniformBall:
            j["center"] = arr(law.center);
            j["radius"] = law.radius;
            break;
        case InitialLaw::Kind::Empirical:
            j["file"] = law.file;
            break;
    }
    return j;
}

const std::vector<std::string> kExperiments = {
    "simulate",       "analyze-scheme", "estimate-density",
    "verify-bounds",  "check-moments",  "full-suite"};

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    cfg.raw = j;
    try {
        const json& m = j.at("model");
        cfg.model.d = m.at("d").get<int>();
        const json& h = m.at("h");
        cfg.model.h = HFunction::from_kind_name(h.at("kind").get<std::string>(),
                                                h.at("m").get<double>(),
                                                h.at("M").get<double>());
        cfg.model.P = m.at("P").get<long>();
        cfg.model.delta = m.at("delta").get<double>();
        cfg.model.T = m.at("T").get<double>();
        cfg.model.scheme = scheme_from_name(m.at("scheme").get<std::string>());
        cfg.model.seed = m.at("seed").get<uint64_t>();
        cfg.model.init = parse_init(m.at("init"));

        cfg.experiment = j.at("experiment").get<std::string>();
        if (std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) ==
            kExperiments.end())
            throw ConfigError("experiment: unknown experiment '" + cfg.experiment +
                              "'");

        if (j.contains("recording")) {
            const json& r = j.at("recording");
            cfg.recording.snapshot_every = r.value("snapshot_every", 0L);
            cfg.recording.moment_every = r.value("moment_every", 1L);
            cfg.recording.tagged_path = r.value("tagged_path", false);
        }
        cfg.replicas = j.value("replicas", 1);
        cfg.out_dir = j.value("out_dir", std::string("out"));
        cfg.strict = j.value("strict", false);
        cfg.workers = j.value("workers", 0);

        if (j.contains("density")) {
            const json& d = j.at("density");
            DensitySection sec;
            sec.x0 = to_vec(d.at("x0"), "density.x0");
            sec.times = d.at("times").get<std::vector<double>>();
            sec.grid_half_width = d.value("grid_half_width", 3.0);
            sec.grid_points = d.value("grid_points", 13);
            sec.eta = d.value("eta", 0.0);
            if (d.value("mollifier", std::string("bump")) == "product-cosine")
                sec.kind = Mollifier::Kind::ProductCosine;
            cfg.density = sec;
        }
        if (j.contains("scaling")) {
            const json& s = j.at("scaling");
            ScalingSection sec;
            sec.deltas = s.at("deltas").get<std::vector<double>>();
            sec.replicas = s.value("replicas", 200);
            sec.n_inner = s.value("n_inner", 50);
            cfg.scaling = sec;
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    // eager validation: surface bad fields before any work starts
    try {
        cfg.model.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config validation error: ") + e.what());
    }
    if (cfg.model.init.kind == InitialLaw::Kind::TwoPoint) {
        // collinear support would fail the run later; reject now
        const Vec& a = cfg.model.init.x1;
        const Vec& b = cfg.model.init.x2;
        const double cross2 =
            a.squaredNorm() * b.squaredNorm() - a.dot(b) * a.dot(b);
        if (cross2 <= 1e-12 * a.squaredNorm() * b.squaredNorm())
            throw ConfigError(
                "config validation error: two-point initial law with collinear "
                "support is degenerate");
    }
    if (cfg.replicas < 1) throw ConfigError("replicas must be >= 1");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error in '") + path + "': " +
                          e.what());
    }
    return parse_config(j);
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["model"] = {{"d", cfg.model.d},
                  {"h",
                   {{"kind", cfg.model.h.kind_name()},
                    {"m", cfg.model.h.m},
                    {"M", cfg.model.h.M}}},
                  {"P", cfg.model.P},
                  {"delta", cfg.model.delta},
                  {"T", cfg.model.T},
                  {"scheme", scheme_name(cfg.model.scheme)},
                  {"seed", cfg.model.seed},
                  {"init", init_to_json(cfg.model.init)}};
    j["experiment"] = cfg.experiment;
    j["recording"] = {{"snapshot_every", cfg.recording.snapshot_every},
                      {"moment_every", cfg.recording.moment_every},
                      {"tagged_path", cfg.recording.tagged_path}};
    j["replicas"] = cfg.replicas;
    j["out_dir"] = cfg.out_dir;
    j["strict"] = cfg.strict;
    j["workers"] = cfg.workers;
    if (cfg.density) {
        const auto& d = *cfg.density;
        j["density"] = {
            {"x0", std::vector<double>(d.x0.data(), d.x0.data() + d.x0.size())},
            {"times", d.times},
            {"grid_half_width", d.grid_half_width},
            {"grid_points", d.grid_points},
            {"eta", d.eta},
            {"mollifier",
             d.kind == Mollifier::Kind::Bump ? "bump" : "product-cosine"}};
    }
    if (cfg.scaling)
        j["scaling"] = {{"deltas", cfg.scaling->deltas},
                        {"replicas", cfg.scaling->replicas},
                        {"n_inner", cfg.scaling->n_inner}};
    return j;
}

std::string ExperimentConfig::hash_hex() const {
    json j = config_to_json(*this);
    j.erase("out_dir");
    j.erase("strict");
    j.erase("workers");
    const uint64_t h = fnv1a64(j.dump());
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool RunManifest::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string RunManifest::to_json() const {
    json j;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["version"] = version;
    j["start_time"] = start_time;
    j["end_time"] = end_time;
    json cs = json::array();
    for (const auto& c : checks)
        cs.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = cs;
    j["artifacts"] = artifacts;
    return j.dump(2);
}

// ---- experiment pipelines ----

namespace {

namespace fs = std::filesystem;

struct Pipeline {
    const ExperimentConfig& cfg;
    RunManifest& manifest;
    std::string spec_hash;

    std::string emit(const std::string& name) {
        manifest.artifacts.push_back(name);
        return (fs::path(cfg.out_dir) / name).string();
    }

    void check(const std::string& name, bool pass, const std::string& detail) {
        manifest.checks.push_back({name, pass, detail});
    }

    void simulate() {
        for (int r = 0; r < cfg.replicas; ++r) {
            const std::string tag = "_r" + std::to_string(r);
            Trajectory traj = run(cfg.model, cfg.recording, std::nullopt, r);
            write_moments_csv(emit("moments" + tag + ".csv"), traj.moments,
                              cfg.model.d);
            const Population& last = traj.snapshots.back();
            write_snapshot_csv(emit("snapshot" + tag + "_final.csv"), last,
                               cfg.model.seed, spec_hash);
            if (cfg.model.scheme == Scheme::PairwiseSharedNoise) {
                const Vec drift = (last.mean_velocity() -
                                   traj.snapshots.front().mean_velocity()) *
                                  static_cast<double>(cfg.model.P);
                const double tol = 1e-9 * static_cast<double>(cfg.model.P) *
                                   static_cast<double>(cfg.model.n_steps());
                check("momentum-conservation" + tag,
                      drift.lpNorm<Eigen::Infinity>() <= tol,
                      "drift=" + format_double(drift.lpNorm<Eigen::Infinity>()));
            }
        }
    }

    void analyze_scheme() {
        RecordingPlan plan = cfg.recording;
        if (plan.snapshot_every <= 0)
            plan.snapshot_every = std::max(1L, cfg.model.n_steps() / 50);
        Trajectory traj = run(cfg.model, plan, std::nullopt, 0);
        const auto reports = spectrum_bounds_check(traj, cfg.model);
        write_spectrum_csv(emit("spectrum.csv"), reports);
        long bad_lo = 0, bad_hi = 0;
        for (const auto& r : reports) {
            if (!r.lower_ok) ++bad_lo;
            if (!r.upper_ok) ++bad_hi;
        }
        check("spectrum-lower-bound", bad_lo == 0,
              std::to_string(bad_lo) + " violations");
        check("spectrum-upper-bound", bad_hi == 0,
              std::to_string(bad_hi) + " violations");

        if (cfg.scaling) {
            const auto rep =
                increment_scaling(cfg.model, cfg.scaling->deltas,
                                  cfg.scaling->replicas, cfg.scaling->n_inner);
            std::ofstream(emit("scaling.json")) << scaling_report_json(rep);
            // pass if the 95% bootstrap interval sits inside the stated band
            check("increment-scaling-slope",
                  0.4 <= rep.slope_increment.lo && rep.slope_increment.hi <= 0.6,
                  "slope=" + format_double(rep.slope_increment.estimate));
            check("gamma-scaling-slope",
                  0.85 <= rep.slope_gamma.lo && rep.slope_gamma.hi <= 1.15,
                  "slope=" + format_double(rep.slope_gamma.estimate));
        }
    }

    std::vector<DensityField> density_fields() {
        if (!cfg.density)
            throw ConfigError("experiment requires a 'density' config section");
        const auto& sec = *cfg.density;
        const auto grid =
            make_grid(sec.x0, sec.grid_half_width, sec.grid_points);
        return conditional_density_experiment(cfg.model, sec.x0, sec.times, grid,
                                              cfg.replicas, sec.kind, sec.eta);
    }

    void estimate_density_exp() {
        const auto fields = density_fields();
        for (size_t i = 0; i < fields.size(); ++i) {
            const std::string tag = "_t" + std::to_string(i);
            write_density_csv(emit("density" + tag + ".csv"), fields[i]);
            std::ofstream(emit("density" + tag + ".json"))
                << density_metadata_json(fields[i], spec_hash);
        }
        bool nonneg = true;
        for (const auto& f : fields)
            for (double v : f.values)
                if (v < 0) nonneg = false;
        check("density-nonnegative", nonneg, "");
    }

    void verify_bounds_exp() {
        if (!cfg.density)
            throw ConfigError("experiment requires a 'density' config section");
        const auto& sec = *cfg.density;
        const auto fields = density_fields();
        const auto sandwich = verify_sandwich(fields, sec.x0);
        std::ofstream(emit("sandwich.json")) << sandwich_report_json(sandwich);
        check("density-positivity", sandwich.positivity_ok || sandwich.inconclusive,
              sandwich.inconclusive ? "inconclusive" : "");
        check("density-sandwich",
              sandwich.inconclusive || sandwich.violation_fraction <= 0.01,
              "violation_fraction=" + format_double(sandwich.violation_fraction));

        // tail of |X_t| at the last requested time from fresh tagged replicas
        const double t_tail = sec.times.back();
        ModelSpec tail_spec = cfg.model;
        tail_spec.T = t_tail;
        std::vector<double> abs_xt(cfg.replicas);
        for (int r = 0; r < cfg.replicas; ++r) {
            Population pop =
                init_population(tail_spec, sec.x0, 1000000u + static_cast<uint64_t>(r));
            for (long k = 1; k <= tail_spec.n_steps(); ++k) step(pop, tail_spec);
            abs_xt[r] = pop.particle(pop.tagged).norm();
        }
        const auto tail = verify_tail(abs_xt, t_tail, sec.x0);
        write_tail_csv(emit("tail.csv"), tail);
        check("tail-bound",
              tail.n_test == 0 ||
                  static_cast<double>(tail.violations) /
                          static_cast<double>(tail.n_test) <=
                      0.01,
              std::to_string(tail.violations) + "/" + std::to_string(tail.n_test) +
                  " violations");

        // log-transform martingale on a per-step-recorded trajectory
        RecordingPlan fine;
        fine.snapshot_every = 1;
        fine.moment_every = 0;
        Trajectory traj = run(cfg.model, fine, sec.x0, 0);
        const auto marty = verify_logmartingale(traj, cfg.model);
        nlohmann::json mj;
        mj["qv_slope"] = marty.qv_slope;
        mj["c_fit"] = marty.c_fit;
        mj["max_drift_b"] = marty.max_drift_b;
        mj["max_drift_tr"] = marty.max_drift_tr;
        mj["max_drift_quad"] = marty.max_drift_quad;
        mj["mesh_warning"] = marty.mesh_warning;
        std::ofstream(emit("logmartingale.json")) << mj.dump(2);
        check("logmartingale-qv", marty.slope_ok,
              "slope=" + format_double(marty.qv_slope) +
                  " c=" + format_double(marty.c_fit));
    }

    void check_moments() {
        RecordingPlan plan = cfg.recording;
        if (plan.snapshot_every <= 0)
            plan.snapshot_every = std::max(1L, cfg.model.n_steps() / 20);
        std::vector<Trajectory> trajs;
        for (int r = 0; r < cfg.replicas; ++r)
            trajs.push_back(run(cfg.model, plan, std::nullopt, r));

        const auto phis = {TestFunction::energy(cfg.model.d),
                           TestFunction::coordinate(cfg.model.d, 0),
                           TestFunction::quadratic(cfg.model.d, 0, 1)};
        for (const auto& phi : phis) {
            const auto rows = moment_balance_check(trajs, phi, cfg.model.h, 0.0,
                                                   cfg.model.T);
            write_moment_balance_csv(emit("moment_balance_" + phi.name() + ".csv"),
                                     rows);
            long bad = 0;
            for (const auto& r : rows)
                if (std::abs(r.residual) > 3.0 * r.se + 1e-12) ++bad;
            // a few 3-SE excursions are expected over many rows
            const bool ok =
                static_cast<double>(bad) <= 0.1 * static_cast<double>(rows.size()) + 1;
            check("moment-balance-" + phi.name(), ok,
                  std::to_string(bad) + "/" + std::to_string(rows.size()) +
                      " rows outside 3 SE");
        }
    }

    void dispatch(const std::string& experiment) {
        if (experiment == "simulate") simulate();
        else if (experiment == "analyze-scheme") analyze_scheme();
        else if (experiment == "estimate-density") estimate_density_exp();
        else if (experiment == "verify-bounds") verify_bounds_exp();
        else if (experiment == "check-moments") check_moments();
        else if (experiment == "full-suite") {
            simulate();
            analyze_scheme();
            estimate_density_exp();
            verify_bounds_exp();
            check_moments();
        } else {
            throw ConfigError("unknown experiment '" + experiment + "'");
        }
    }
};

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg) {
#ifdef _OPENMP
    if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
#endif
    fs::create_directories(cfg.out_dir);

    RunManifest manifest;
    manifest.config_hash = cfg.hash_hex();
    manifest.seed = cfg.model.seed;
    manifest.version = kVersion;
    manifest.start_time = timestamp();

    Pipeline pipe{cfg, manifest, cfg.hash_hex()};
    pipe.dispatch(cfg.experiment);

    manifest.end_time = timestamp();
    {
        const std::string path = (fs::path(cfg.out_dir) / "manifest.json").string();
        manifest.artifacts.push_back("manifest.json");
        std::ofstream out(path);
        out << manifest.to_json();
    }
    return manifest;
}

}  // namespace landau
