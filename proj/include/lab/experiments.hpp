#ifndef LAB_EXPERIMENTS_HPP
#define LAB_EXPERIMENTS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lab/curve.hpp"
#include "lab/seminorms.hpp"

namespace lab {

// Textual curve description; accepts the structured JSON form
//   {"family":"circle","params":{"r":1.0},"n_samples":1024}
//   {"family":"polyline","points":[[x,y],...]}
// and a compact shorthand ("circle:1@1024", "polynomial:0.3", "square",
// "koch:2@768", "polygon:x,y;x,y;...").
struct CurveSpec {
    std::string family = "circle";
    double radius = 1.0;
    double c = 0.0;
    int level = 1;
    double side = 1.0;
    std::vector<cplx> points;  // polygon vertices or raw polyline
    int n_samples = 1024;

    static CurveSpec parse(const std::string& text);
    std::string to_json() const;
    CurveSample build() const;
    bool is_circle() const { return family == "circle"; }
    bool has_closed_form() const { return family == "circle" || family == "polynomial"; }
    CurveFamily family_variant() const;
    std::string label() const;
};

// Test-function description: "cos:3", "sin:2", "const:1.5",
// "pole:re,im", "random:8" (degree; draw fixed by the config seed).
struct FnSpec {
    std::string text;
    static FnSpec parse(const std::string& s);
    BoundaryFunction build(unsigned seed) const;
    bool is_pole() const;
};

struct QuadKnobs {
    int n_samples = 1024;
    int n_trunc = 256;
    int radial_order = 64;
    int angular_order = 512;
    int analysis_samples = 1024;
    SeminormQuad seminorm_quad() const;
};

struct ExperimentConfig {
    std::string experiment;  // douglas | equivalence | necessity | regularity_sweep | selftest
    std::vector<CurveSpec> curves;
    std::vector<double> p_values;
    std::vector<FnSpec> functions;
    QuadKnobs quad;
    std::map<std::string, double> tolerances;
    unsigned seed = 1;
    std::string output_path;
    std::string output_format = "structured-text";

    double tol(const std::string& name, double fallback) const;
    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct ExperimentReport {
    std::string experiment;
    std::string provenance;  // deterministic knob dump
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<CheckResult> checks;
    std::vector<PlotSeries> series;
    double wall_ms = 0.0;  // excluded from the deterministic body

    bool all_pass() const;
    std::string body_text() const;
    std::string delimited() const;
};

ExperimentConfig load_config(const std::string& path);
// Writes the report; structured-text and delimited-table produce one file
// at `path`, plot-data writes one `<path>.<series>.dat` per series.
// Returns the list of files written.
std::vector<std::string> emit_report(const ExperimentReport& report, const std::string& path,
                                     const std::string& format);

ExperimentReport run_douglas(const ExperimentConfig& config);
ExperimentReport run_equivalence(const ExperimentConfig& config);
ExperimentReport run_necessity(const ExperimentConfig& config);
ExperimentReport run_regularity_sweep(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

// Deterministic %.12g rendering used for every number in report bodies.
std::string fmt_num(double v);

} // namespace lab

#endif
