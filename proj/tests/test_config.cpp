#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "landau/config.hpp"
#include "landau/errors.hpp"

using namespace landau;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal_config() {
    return json{
        {"model",
         {{"d", 2},
          {"h", {{"kind", "constant"}, {"m", 1.0}, {"M", 1.0}}},
          {"P", 100},
          {"delta", 1e-2},
          {"T", 0.1},
          {"scheme", "pairwise-shared-noise"},
          {"seed", 42},
          {"init",
           {{"kind", "gaussian"},
            {"mean", {0.0, 0.0}},
            {"cov", {{1.0, 0.0}, {0.0, 1.0}}}}}}},
        {"experiment", "simulate"},
        {"replicas", 1},
        {"out_dir", "/tmp/landau_cfg_out"}};
}

}  // namespace

TEST_CASE("minimal config is accepted and round-trips") {
    const ExperimentConfig cfg = parse_config(minimal_config());
    CHECK(cfg.model.d == 2);
    CHECK(cfg.model.P == 100);
    CHECK(cfg.experiment == "simulate");
    const ExperimentConfig again = parse_config(config_to_json(cfg));
    CHECK(again.hash_hex() == cfg.hash_hex());
}

TEST_CASE("validation errors name the offending field") {
    json j = minimal_config();
    j["model"]["delta"] = 0.0;
    CHECK_THROWS_WITH_AS(parse_config(j),
                         doctest::Contains("delta must be positive"), ConfigError);

    j = minimal_config();
    j["model"]["d"] = 4;
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = minimal_config();
    j["model"]["init"] = {{"kind", "two-point"}, {"x1", {1.0, 0.0}}, {"x2", {2.0, 0.0}}};
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("collinear"), ConfigError);

    j = minimal_config();
    j["experiment"] = "explode";
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("unknown experiment"),
                         ConfigError);

    j = minimal_config();
    j["model"]["scheme"] = "magic";
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = minimal_config();
    j["model"].erase("P");
    CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("hash tracks semantic fields only") {
    ExperimentConfig a = parse_config(minimal_config());
    json j = minimal_config();
    j["out_dir"] = "/somewhere/else";
    j["strict"] = true;
    j["workers"] = 7;
    CHECK(parse_config(j).hash_hex() == a.hash_hex());

    j = minimal_config();
    j["model"]["seed"] = 43;
    CHECK(parse_config(j).hash_hex() != a.hash_hex());
    j = minimal_config();
    j["model"]["delta"] = 5e-2;
    CHECK(parse_config(j).hash_hex() != a.hash_hex());
}

TEST_CASE("load_config parses files and reports failures") {
    const std::string path = "/tmp/landau_cfg_test.json";
    {
        std::ofstream out(path);
        out << minimal_config().dump(2);
    }
    CHECK(load_config(path).model.seed == 42);
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_config(path), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/nowhere.json"), ConfigError);
    fs::remove(path);
}

TEST_CASE("run_experiment writes a complete manifest") {
    const fs::path out = "/tmp/landau_manifest_test";
    fs::remove_all(out);
    json j = minimal_config();
    j["out_dir"] = out.string();
    j["model"]["P"] = 30;
    const RunManifest manifest = run_experiment(parse_config(j));
    CHECK(!manifest.config_hash.empty());
    CHECK(manifest.seed == 42);
    CHECK(!manifest.checks.empty());  // pairwise momentum check
    CHECK(manifest.all_pass());
    for (const auto& name : manifest.artifacts)
        CHECK(fs::exists(out / name));
    CHECK(fs::exists(out / "manifest.json"));
    // every file created during the run is listed
    size_t file_count = 0;
    for (const auto& e : fs::directory_iterator(out)) {
        (void)e;
        ++file_count;
    }
    CHECK(file_count == manifest.artifacts.size());
    fs::remove_all(out);
}

TEST_CASE("determinism of numeric artifacts across runs") {
    const fs::path o1 = "/tmp/landau_det_1", o2 = "/tmp/landau_det_2";
    fs::remove_all(o1);
    fs::remove_all(o2);
    json j = minimal_config();
    j["model"]["P"] = 30;
    j["out_dir"] = o1.string();
    run_experiment(parse_config(j));
    j["out_dir"] = o2.string();
    j["workers"] = 2;
    run_experiment(parse_config(j));
    for (const auto& e : fs::directory_iterator(o1)) {
        const auto name = e.path().filename().string();
        if (name == "manifest.json") continue;  // carries wall-clock timestamps
        std::ifstream f1(e.path()), f2(o2 / name);
        REQUIRE(f2.good());
        const std::string s1((std::istreambuf_iterator<char>(f1)), {});
        const std::string s2((std::istreambuf_iterator<char>(f2)), {});
        CHECK(s1 == s2);
    }
    fs::remove_all(o1);
    fs::remove_all(o2);
}
