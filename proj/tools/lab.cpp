#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "lab/conformal.hpp"
#include "lab/curve.hpp"
#include "lab/experiments.hpp"
#include "lab/regularity.hpp"
#include "lab/selftest.hpp"
#include "lab/seminorms.hpp"

namespace {

// Curve specs may be given inline ("circle:1@1024", JSON) or as a path to
// a spec file.
lab::CurveSpec resolve_curve_spec(const std::string& arg) {
    if (std::filesystem::exists(arg)) {
        std::ifstream in(arg);
        std::stringstream ss;
        ss << in.rdbuf();
        return lab::CurveSpec::parse(ss.str());
    }
    return lab::CurveSpec::parse(arg);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for boundary seminorms on Jordan curves"};
    app.require_subcommand(1);

    std::string config_path, out_path, out_format, curve_arg, fn_arg, engine = "auto";
    double p_value = 2.0;
    unsigned seed = 1;

    auto* cmd_run = app.add_subcommand("run", "run an experiment from a config file");
    cmd_run->add_option("config", config_path, "config JSON file")->required();
    cmd_run->add_option("--out", out_path, "override the report output path");
    cmd_run->add_option("--format", out_format, "override the report format");
    cmd_run->add_option("--seed", seed, "seed for randomized test-function draws");

    auto* cmd_curve = app.add_subcommand("curve", "curve utilities");
    auto* cmd_info = cmd_curve->add_subcommand("info", "print geometric measurements of a curve");
    cmd_info->add_option("spec", curve_arg, "curve spec (inline or file)")->required();

    auto* cmd_semi = app.add_subcommand("seminorm", "compute the three seminorms of a trace");
    cmd_semi->add_option("spec", curve_arg, "curve spec (inline or file)")->required();
    cmd_semi->add_option("--p", p_value, "exponent p >= 2")->required();
    cmd_semi->add_option("--fn", fn_arg, "trace spec (cos:n, sin:n, const:v, pole:re,im)")->required();
    cmd_semi->add_option("--engine", engine, "conformal engine: auto | zipper");
    cmd_semi->add_option("--seed", seed, "seed for randomized test-function draws");

    auto* cmd_reg = app.add_subcommand("regularity", "estimate chord-arc and Ahlfors regularity");
    cmd_reg->add_option("spec", curve_arg, "curve spec (inline or file)")->required();

    app.add_subcommand("selftest", "run the acceptance suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            lab::ExperimentConfig cfg = lab::load_config(config_path);
            if (seed != 1) cfg.seed = seed;
            lab::ExperimentReport rep = lab::run_experiment(cfg);
            std::cout << rep.body_text();
            std::string path = !out_path.empty() ? out_path : cfg.output_path;
            std::string format = !out_format.empty() ? out_format : cfg.output_format;
            if (!path.empty())
                for (const auto& f : lab::emit_report(rep, path, format)) std::cout << "# wrote " << f << "\n";
            return rep.all_pass() ? 0 : 1;
        }

        if (cmd_info->parsed()) {
            lab::CurveSpec spec = resolve_curve_spec(curve_arg);
            lab::CurveSample curve = spec.build();
            std::cout << "curve: " << spec.label() << "\n";
            std::cout << "n_samples: " << curve.size() << "\n";
            std::cout << "length: " << lab::fmt_num(lab::curve_length(curve)) << "\n";
            std::cout << "diameter: " << lab::fmt_num(lab::curve_diameter(curve)) << "\n";
            std::cout << "chord_arc_hat: " << lab::fmt_num(lab::chord_arc_constant(curve)) << "\n";
            lab::cplx a = lab::anchor_point(curve);
            std::cout << "anchor: " << lab::fmt_num(a.real()) << " " << lab::fmt_num(a.imag()) << "\n";
            return 0;
        }

        if (cmd_semi->parsed()) {
            lab::CurveSpec spec = resolve_curve_spec(curve_arg);
            lab::CurveSample curve = spec.build();
            bool closed_ok = engine != "zipper" && spec.has_closed_form();
            lab::ConformalMap interior = closed_ok
                                             ? lab::closed_form_interior_map(spec.family_variant(), curve.size())
                                             : lab::fit_numeric_map(curve, lab::ConformalMap::Side::interior);
            lab::ConformalMap exterior = (engine != "zipper" && spec.is_circle())
                                             ? lab::closed_form_exterior_map(spec.family_variant(), curve.size())
                                             : lab::fit_numeric_map(curve, lab::ConformalMap::Side::exterior_reflected);
            lab::BoundaryFunction u = lab::FnSpec::parse(fn_arg).build(seed);
            lab::SeminormReport r = lab::seminorm_triple(curve, interior, exterior, u, p_value);
            std::cout << "curve: " << spec.label() << "  fn: " << fn_arg << "  p: " << lab::fmt_num(p_value) << "\n";
            std::cout << "besov: " << lab::fmt_num(r.besov) << "\n";
            std::cout << "interior: " << lab::fmt_num(r.interior) << " (" << r.interior_engine << ")\n";
            std::cout << "exterior: " << lab::fmt_num(*r.exterior) << " (" << r.exterior_engine << ")\n";
            if (r.besov_over_interior) {
                std::cout << "besov/interior: " << lab::fmt_num(*r.besov_over_interior) << "\n";
                std::cout << "exterior/interior: " << lab::fmt_num(*r.exterior_over_interior) << "\n";
            }
            return 0;
        }

        if (cmd_reg->parsed()) {
            lab::CurveSpec spec = resolve_curve_spec(curve_arg);
            lab::CurveSample curve = spec.build();
            lab::RegularityReport r = lab::regularity_report(curve);
            std::cout << "curve: " << spec.label() << "\n";
            std::cout << "chord_arc_hat: " << lab::fmt_num(r.k_hat) << "\n";
            std::cout << "ball_m_hat: " << lab::fmt_num(r.m_hat) << " at r=" << lab::fmt_num(r.ball.argmax_radius)
                      << "\n";
            std::cout << "dual_c_hat: " << lab::fmt_num(r.c_hat) << " at w=" << lab::fmt_num(r.dual.argmax_w.real())
                      << "+" << lab::fmt_num(r.dual.argmax_w.imag()) << "i\n";
            std::cout << "probes: " << r.dual.probes.size() << " (excluded " << r.dual.excluded << ")\n";
            return 0;
        }

        // selftest
        auto results = lab::selftest::run_all();
        bool all = true;
        for (const auto& r : results) {
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
            all = all && r.pass;
        }
        std::cout << (all ? "acceptance: all criteria passed" : "acceptance: FAILURES present") << "\n";
        return all ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
