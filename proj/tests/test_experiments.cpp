#include "doctest.h"

#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lab/experiments.hpp"
#include "lab/seminorms.hpp"

using namespace lab;
using doctest::Approx;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("curve spec parsing") {
    SUBCASE("shorthand forms") {
        CurveSpec c = CurveSpec::parse("circle:2@512");
        CHECK(c.family == "circle");
        CHECK(c.radius == Approx(2.0));
        CHECK(c.n_samples == 512);

        CurveSpec p = CurveSpec::parse("polynomial:0.35");
        CHECK(p.c == Approx(0.35));

        CurveSpec s = CurveSpec::parse("square@256");
        CHECK(s.family == "polygon");
        CHECK(s.points.size() == 4);

        CurveSpec k = CurveSpec::parse("koch:3");
        CHECK(k.level == 3);
    }
    SUBCASE("JSON form and round trip") {
        CurveSpec c = CurveSpec::parse(R"({"family":"polynomial","params":{"c":0.3},"n_samples":128})");
        CHECK(c.c == Approx(0.3));
        CurveSpec back = CurveSpec::parse(c.to_json());
        CHECK(back.family == c.family);
        CHECK(back.c == Approx(c.c));
        CHECK(back.n_samples == c.n_samples);

        CurveSpec pl = CurveSpec::parse(R"({"family":"polyline","points":[[0,0],[1,0],[1,1],[0,1]]})");
        CHECK(pl.points.size() == 4);
    }
    SUBCASE("unknown families are rejected") {
        CHECK_THROWS_AS(CurveSpec::parse("blob:3"), std::invalid_argument);
        CHECK_THROWS_AS(CurveSpec::parse(R"({"family":"blob"})"), std::invalid_argument);
    }
}

TEST_CASE("function spec parsing") {
    CHECK_NOTHROW(FnSpec::parse("cos:3"));
    CHECK_NOTHROW(FnSpec::parse("pole:1.5,0"));
    CHECK(FnSpec::parse("pole:1.5,0").is_pole());
    CHECK_THROWS(FnSpec::parse("wiggle:1"));
    // Random draws are reproducible for a fixed seed.
    FnSpec r = FnSpec::parse("random:4");
    CurveSample circle = CurveSpec::parse("circle:1@64").build();
    cplx a = r.build(7).eval_at_sample(circle, 3);
    cplx b = r.build(7).eval_at_sample(circle, 3);
    cplx c = r.build(8).eval_at_sample(circle, 3);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("config round trip and validation") {
    ExperimentConfig cfg;
    cfg.experiment = "douglas";
    cfg.curves.push_back(CurveSpec::parse("circle:1@256"));
    cfg.functions.push_back(FnSpec::parse("cos:2"));
    cfg.p_values = {2.0};
    cfg.tolerances["douglas_oracle_rel"] = 5e-3;
    cfg.seed = 11;
    cfg.output_path = "out.txt";
    ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.experiment == cfg.experiment);
    CHECK(back.curves.size() == 1);
    CHECK(back.functions.at(0).text == "cos:2");
    CHECK(back.tol("douglas_oracle_rel", 0.0) == Approx(5e-3));
    CHECK(back.seed == 11);
    CHECK(back.output_path == "out.txt");

    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"experiment":"mystery"})"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"experiment":"douglas","p":[1.5]})"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json("{not json"), std::invalid_argument);
}

TEST_CASE("config file round trip preserves all fields") {
    ExperimentConfig cfg;
    cfg.experiment = "equivalence";
    cfg.curves.push_back(CurveSpec::parse("koch:2@256"));
    cfg.curves.push_back(CurveSpec::parse(R"({"family":"polygon","params":{"vertices":[[0,0],[2,0],[1,2]]},"n_samples":128})"));
    cfg.p_values = {2.0, 3.0};
    cfg.functions.push_back(FnSpec::parse("sin:2"));
    cfg.quad.n_trunc = 96;
    cfg.tolerances["sandwich_slack"] = 2e-6;
    cfg.output_format = "delimited-table";
    std::string path = temp_path("lab_roundtrip_config.json");
    std::ofstream(path) << cfg.to_json();
    ExperimentConfig back = load_config(path);
    CHECK(back.to_json() == cfg.to_json());
    CHECK(back.curves.at(1).points.size() == 3);
}

TEST_CASE("results do not depend on the worker count") {
    CurveSample curve = CurveSpec::parse("koch:2@256").build();
    auto run = [&] { return besov_seminorm(curve, BoundaryFunction::cosine(2), 3.0); };
    setenv("LAB_WORKERS", "1", 1);
    double serial = run();
    setenv("LAB_WORKERS", "5", 1);
    double threaded = run();
    unsetenv("LAB_WORKERS");
    CHECK(serial == threaded);
}

TEST_CASE("load_config reports the offending file") {
    std::string path = temp_path("lab_bad_config.json");
    std::ofstream(path) << "{broken";
    try {
        load_config(path);
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
    CHECK_THROWS_AS(load_config(temp_path("lab_missing_config.json")), std::runtime_error);
}

TEST_CASE("douglas experiment at reduced knobs") {
    ExperimentConfig cfg;
    cfg.experiment = "douglas";
    cfg.quad.n_samples = 512;
    cfg.quad.n_trunc = 64;
    cfg.quad.analysis_samples = 512;
    cfg.quad.angular_order = 256;
    for (int n : {1, 4}) cfg.functions.push_back(FnSpec::parse("cos:" + std::to_string(n)));
    ExperimentReport rep = run_douglas(cfg);
    CHECK(rep.all_pass());
    // cos:4 row carries the sqrt(2) oracle.
    bool found = false;
    for (const auto& c : rep.checks)
        if (c.name == "douglas_cos:4_oracle") {
            found = true;
            CHECK(c.pass);
        }
    CHECK(found);

    ExperimentConfig bad = cfg;
    bad.curves.push_back(CurveSpec::parse("square"));
    CHECK_THROWS_AS(run_douglas(bad), std::invalid_argument);
    ExperimentConfig badp = cfg;
    badp.p_values = {3.0};
    CHECK_THROWS_AS(run_douglas(badp), std::invalid_argument);
}

TEST_CASE("douglas equality holds for seeded random real traces") {
    ExperimentConfig cfg;
    cfg.experiment = "douglas";
    cfg.quad.n_samples = 512;
    cfg.quad.n_trunc = 64;
    cfg.quad.analysis_samples = 512;
    cfg.quad.angular_order = 256;
    cfg.seed = 99;
    cfg.functions.push_back(FnSpec::parse("random:6"));
    ExperimentReport rep = run_douglas(cfg);
    CHECK(rep.all_pass());
    bool found = false;
    for (const auto& c : rep.checks)
        if (c.name == "douglas_random:6_pairwise") {
            found = true;
            CHECK(c.pass);
        }
    CHECK(found);
}

TEST_CASE("declared tolerances drive the verdicts") {
    ExperimentConfig cfg;
    cfg.experiment = "douglas";
    cfg.quad.n_samples = 256;
    cfg.quad.n_trunc = 32;
    cfg.quad.analysis_samples = 256;
    cfg.quad.angular_order = 128;
    cfg.functions.push_back(FnSpec::parse("cos:1"));
    CHECK(run_douglas(cfg).all_pass());
    cfg.tolerances["douglas_oracle_rel"] = 1e-15; // stricter than the quadrature
    ExperimentReport rep = run_douglas(cfg);
    CHECK_FALSE(rep.all_pass());
    for (const auto& c : rep.checks)
        if (c.name == "douglas_cos:1_oracle") CHECK(c.tolerance == 1e-15);
}

TEST_CASE("report bodies are deterministic and emitted in all formats") {
    ExperimentConfig cfg;
    cfg.experiment = "douglas";
    cfg.quad.n_samples = 256;
    cfg.quad.n_trunc = 32;
    cfg.quad.analysis_samples = 256;
    cfg.quad.angular_order = 128;
    cfg.functions.push_back(FnSpec::parse("cos:1"));
    ExperimentReport a = run_douglas(cfg);
    ExperimentReport b = run_douglas(cfg);
    CHECK(a.body_text() == b.body_text());

    std::string base = temp_path("lab_report_test");
    auto f1 = emit_report(a, base + ".txt", "structured-text");
    CHECK(slurp(f1.at(0)).find("experiment: douglas") != std::string::npos);
    auto f2 = emit_report(a, base + ".tsv", "delimited-table");
    CHECK(slurp(f2.at(0)).find('\t') != std::string::npos);
    CHECK_THROWS_AS(emit_report(a, base, "csv"), std::invalid_argument);

    // The wall-time footer is the only nondeterministic line.
    std::string t1 = slurp(f1.at(0));
    emit_report(b, base + ".txt", "structured-text");
    std::string t2 = slurp(base + ".txt");
    auto strip = [](std::string s) { return s.substr(0, s.rfind("# wall_ms")); };
    CHECK(strip(t1) == strip(t2));
}

TEST_CASE("plot-data emission writes one series file per series") {
    ExperimentReport rep;
    rep.experiment = "demo";
    rep.series.push_back({"alpha", {{0.0, 1.0}, {1.0, 2.5}}});
    rep.series.push_back({"beta", {{2.0, -1.0}}});
    std::string base = temp_path("lab_plot_test");
    auto files = emit_report(rep, base, "plot-data");
    REQUIRE(files.size() == 2);
    CHECK(slurp(files.at(0)) == "0 1\n1 2.5\n");
    CHECK(slurp(files.at(1)) == "2 -1\n");
}

TEST_CASE("regularity sweep experiment") {
    ExperimentConfig cfg;
    cfg.experiment = "regularity_sweep";
    cfg.quad.n_samples = 256;
    for (const char* s : {"circle:1@256", "square@256", "polynomial:0.3@256", "koch:1@256", "koch:2@256", "koch:3@256"})
        cfg.curves.push_back(CurveSpec::parse(s));
    ExperimentReport rep = run_regularity_sweep(cfg);
    CHECK(rep.all_pass());
    CHECK(rep.rows.size() == cfg.curves.size());
}

TEST_CASE("equivalence experiment keeps circle ratios near one") {
    ExperimentConfig cfg;
    cfg.experiment = "equivalence";
    cfg.quad.n_samples = 256;
    cfg.quad.n_trunc = 64;
    cfg.quad.analysis_samples = 256;
    cfg.quad.angular_order = 128;
    cfg.curves.push_back(CurveSpec::parse("circle:1@256"));
    cfg.curves.push_back(CurveSpec::parse("square@256"));
    cfg.p_values = {2.0};
    cfg.functions.push_back(FnSpec::parse("cos:1"));
    cfg.functions.push_back(FnSpec::parse("sin:2"));
    ExperimentReport rep = run_equivalence(cfg);
    CHECK(rep.all_pass());
}

TEST_CASE("equivalence rows survive per-row failures") {
    ExperimentConfig cfg;
    cfg.experiment = "equivalence";
    cfg.quad.n_samples = 256;
    cfg.quad.n_trunc = 32;
    cfg.quad.analysis_samples = 256;
    cfg.quad.angular_order = 128;
    cfg.curves.push_back(CurveSpec::parse("circle:1@256"));
    cfg.p_values = {2.0};
    cfg.functions.push_back(FnSpec::parse("pole:1.0001,0"));  // below the resolution floor
    cfg.functions.push_back(FnSpec::parse("cos:1"));
    ExperimentReport rep = run_equivalence(cfg);
    bool saw_error = false, saw_value = false;
    for (const auto& row : rep.rows) {
        for (const auto& cell : row) {
            if (cell.rfind("error:", 0) == 0) saw_error = true;
            if (row.at(3) == "cos:1" && cell == row.at(4) && cell != "-") saw_value = true;
        }
    }
    CHECK(saw_error);
    CHECK(saw_value);
}

TEST_CASE("report bodies are identical across worker counts") {
    ExperimentConfig cfg;
    cfg.experiment = "regularity_sweep";
    cfg.curves.push_back(CurveSpec::parse("koch:2@256"));
    cfg.curves.push_back(CurveSpec::parse("circle:1@256"));
    setenv("LAB_WORKERS", "1", 1);
    std::string serial = run_regularity_sweep(cfg).body_text();
    setenv("LAB_WORKERS", "3", 1);
    std::string threaded = run_regularity_sweep(cfg).body_text();
    unsetenv("LAB_WORKERS");
    CHECK(serial == threaded);
}

TEST_CASE("experiment wall time scales quadratically at worst") {
    // Doubling the resolution of the Besov double sum must not blow past
    // the O(N^2) budget; allow generous noise margin on a busy machine.
    ExperimentConfig small;
    small.experiment = "douglas";
    small.quad = QuadKnobs{512, 32, 16, 64, 512};
    small.functions.push_back(FnSpec::parse("cos:1"));
    ExperimentConfig large = small;
    large.quad.n_samples = 1024;
    large.quad.analysis_samples = 1024;
    large.curves.clear();

    auto time_run = [](const ExperimentConfig& cfg) {
        double best = 1e300;
        for (int rep = 0; rep < 3; ++rep) {
            auto t0 = std::chrono::steady_clock::now();
            run_douglas(cfg);
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        return best;
    };
    double t_small = time_run(small);
    double t_large = time_run(large);
    CHECK(t_large / t_small <= 5.0);
}
