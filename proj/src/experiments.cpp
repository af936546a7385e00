#include "lab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "lab/conformal.hpp"
#include "lab/regularity.hpp"
#include "lab/selftest.hpp"

namespace lab {

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<cplx> square_vertices(double side) {
    double h = side / 2.0;
    return {cplx(-h, -h), cplx(h, -h), cplx(h, h), cplx(-h, h)};
}

std::vector<cplx> parse_point_list(const std::string& s) {
    std::vector<cplx> pts;
    std::stringstream ss(s);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        auto comma = pair.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("expected 'x,y' in point list: " + pair);
        pts.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
    }
    return pts;
}

} // namespace

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// CurveSpec
// ---------------------------------------------------------------------------

CurveSpec CurveSpec::parse(const std::string& text) {
    CurveSpec spec;
    if (!text.empty() && text.front() == '{') {
        nlohmann::json j = nlohmann::json::parse(text);
        spec.family = j.at("family").get<std::string>();
        if (j.contains("n_samples")) spec.n_samples = j.at("n_samples").get<int>();
        nlohmann::json params = j.value("params", nlohmann::json::object());
        if (spec.family == "circle") {
            spec.radius = params.value("r", 1.0);
        } else if (spec.family == "polynomial") {
            spec.c = params.value("c", 0.0);
        } else if (spec.family == "koch") {
            spec.level = params.value("level", 1);
            spec.side = params.value("side", 1.0);
        } else if (spec.family == "polygon" || spec.family == "polyline") {
            nlohmann::json pts = j.contains("points") ? j.at("points") : params.at("vertices");
            for (const auto& p : pts) spec.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        } else {
            throw std::invalid_argument("unknown curve family: " + spec.family);
        }
        return spec;
    }

    std::string body = text;
    auto at = body.rfind('@');
    if (at != std::string::npos) {
        spec.n_samples = std::stoi(body.substr(at + 1));
        body = body.substr(0, at);
    }
    auto colon = body.find(':');
    std::string name = colon == std::string::npos ? body : body.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : body.substr(colon + 1);

    if (name == "circle") {
        spec.family = "circle";
        spec.radius = arg.empty() ? 1.0 : std::stod(arg);
    } else if (name == "polynomial") {
        spec.family = "polynomial";
        spec.c = arg.empty() ? 0.0 : std::stod(arg);
    } else if (name == "koch") {
        spec.family = "koch";
        spec.level = arg.empty() ? 1 : std::stoi(arg);
    } else if (name == "square") {
        spec.family = "polygon";
        spec.points = square_vertices(arg.empty() ? 1.0 : std::stod(arg));
    } else if (name == "polygon") {
        spec.family = "polygon";
        spec.points = parse_point_list(arg);
    } else if (name == "polyline") {
        spec.family = "polyline";
        spec.points = parse_point_list(arg);
    } else {
        throw std::invalid_argument("unknown curve spec: " + text);
    }
    return spec;
}

std::string CurveSpec::to_json() const {
    nlohmann::json j;
    j["family"] = family;
    if (family == "polyline") {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : points) pts.push_back({p.real(), p.imag()});
        j["points"] = std::move(pts);
    } else {
        nlohmann::json params;
        if (family == "circle") params["r"] = radius;
        if (family == "polynomial") params["c"] = c;
        if (family == "koch") {
            params["level"] = level;
            params["side"] = side;
        }
        if (family == "polygon") {
            nlohmann::json pts = nlohmann::json::array();
            for (const auto& p : points) pts.push_back({p.real(), p.imag()});
            params["vertices"] = std::move(pts);
        }
        j["params"] = std::move(params);
        j["n_samples"] = n_samples;
    }
    return j.dump();
}

CurveFamily CurveSpec::family_variant() const {
    if (family == "circle") return CircleFamily{radius};
    if (family == "polynomial") return PolynomialFamily{c};
    if (family == "koch") return KochFamily{level, side};
    if (family == "polygon") return PolygonFamily{points};
    throw std::invalid_argument("family '" + family + "' has no parametric form");
}

CurveSample CurveSpec::build() const {
    if (family == "polyline") return make_polyline_curve(points);
    return make_named_curve(family_variant(), n_samples);
}

std::string CurveSpec::label() const {
    std::ostringstream os;
    if (family == "circle") os << "circle(" << fmt_num(radius) << ")";
    else if (family == "polynomial") os << "polynomial(" << fmt_num(c) << ")";
    else if (family == "koch") os << "koch(" << level << ")";
    else if (family == "polygon") os << "polygon[" << points.size() << "]";
    else os << "polyline[" << points.size() << "]";
    return os.str();
}

// ---------------------------------------------------------------------------
// FnSpec
// ---------------------------------------------------------------------------

FnSpec FnSpec::parse(const std::string& s) {
    FnSpec f;
    f.text = s;
    f.build(1); // validate eagerly
    return f;
}

bool FnSpec::is_pole() const { return text.rfind("pole:", 0) == 0; }

BoundaryFunction FnSpec::build(unsigned seed) const {
    auto colon = text.find(':');
    std::string name = colon == std::string::npos ? text : text.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (name == "cos") return BoundaryFunction::cosine(std::stoi(arg));
    if (name == "sin") return BoundaryFunction::sine(std::stoi(arg));
    if (name == "const") return BoundaryFunction::constant(arg.empty() ? 1.0 : std::stod(arg));
    if (name == "pole") {
        auto comma = arg.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("pole spec needs 're,im'");
        return BoundaryFunction::pole(cplx(std::stod(arg.substr(0, comma)), std::stod(arg.substr(comma + 1))));
    }
    if (name == "random") {
        int degree = arg.empty() ? 8 : std::stoi(arg);
        if (degree < 1) throw std::invalid_argument("random trig degree must be >= 1");
        std::seed_seq seq{seed, static_cast<unsigned>(std::hash<std::string>{}(text))};
        std::mt19937 rng(seq);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        std::vector<double> ca(static_cast<std::size_t>(degree)), sa(static_cast<std::size_t>(degree));
        for (int n = 0; n < degree; ++n) {
            ca[static_cast<std::size_t>(n)] = unif(rng) / (n + 1.0);
            sa[static_cast<std::size_t>(n)] = unif(rng) / (n + 1.0);
        }
        return BoundaryFunction::real_trig(unif(rng), std::move(ca), std::move(sa));
    }
    throw std::invalid_argument("unknown function spec: " + text);
}

SeminormQuad QuadKnobs::seminorm_quad() const {
    SeminormQuad q;
    q.n_trunc = n_trunc;
    q.analysis_samples = analysis_samples;
    q.disk = DiskQuadSpec{radial_order, angular_order};
    return q;
}

// ---------------------------------------------------------------------------
// ExperimentConfig
// ---------------------------------------------------------------------------

double ExperimentConfig::tol(const std::string& name, double fallback) const {
    auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : curves) cs.push_back(nlohmann::json::parse(c.to_json()));
    j["curves"] = std::move(cs);
    j["p"] = p_values;
    nlohmann::json fs = nlohmann::json::array();
    for (const auto& f : functions) fs.push_back(f.text);
    j["functions"] = std::move(fs);
    j["quadrature"] = {{"n_samples", quad.n_samples},
                       {"n_trunc", quad.n_trunc},
                       {"radial_order", quad.radial_order},
                       {"angular_order", quad.angular_order},
                       {"analysis_samples", quad.analysis_samples}};
    j["tolerances"] = tolerances;
    j["seed"] = seed;
    j["output"] = {{"path", output_path}, {"format", output_format}};
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig cfg;
    cfg.experiment = j.at("experiment").get<std::string>();
    const bool known = cfg.experiment == "douglas" || cfg.experiment == "equivalence" ||
                       cfg.experiment == "necessity" || cfg.experiment == "regularity_sweep" ||
                       cfg.experiment == "selftest";
    if (!known) throw std::invalid_argument("unknown experiment name: " + cfg.experiment);
    for (const auto& c : j.value("curves", nlohmann::json::array())) cfg.curves.push_back(CurveSpec::parse(c.dump()));
    for (const auto& p : j.value("p", nlohmann::json::array())) cfg.p_values.push_back(p.get<double>());
    for (double p : cfg.p_values)
        if (p < 2.0) throw std::invalid_argument("config p values must be >= 2");
    for (const auto& f : j.value("functions", nlohmann::json::array()))
        cfg.functions.push_back(FnSpec::parse(f.get<std::string>()));
    if (j.contains("quadrature")) {
        const auto& q = j.at("quadrature");
        cfg.quad.n_samples = q.value("n_samples", cfg.quad.n_samples);
        cfg.quad.n_trunc = q.value("n_trunc", cfg.quad.n_trunc);
        cfg.quad.radial_order = q.value("radial_order", cfg.quad.radial_order);
        cfg.quad.angular_order = q.value("angular_order", cfg.quad.angular_order);
        cfg.quad.analysis_samples = q.value("analysis_samples", cfg.quad.analysis_samples);
    }
    if (j.contains("tolerances"))
        for (const auto& [k, v] : j.at("tolerances").items()) cfg.tolerances[k] = v.get<double>();
    cfg.seed = j.value("seed", 1u);
    if (j.contains("output")) {
        cfg.output_path = j.at("output").value("path", std::string());
        cfg.output_format = j.at("output").value("format", std::string("structured-text"));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return ExperimentConfig::from_json(ss.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

bool ExperimentReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string ExperimentReport::body_text() const {
    std::ostringstream os;
    os << "# lab report\n";
    os << "experiment: " << experiment << "\n";
    os << "provenance: " << provenance << "\n";
    os << "columns:";
    for (const auto& c : columns) os << " " << c;
    os << "\n";
    for (const auto& row : rows) {
        os << "row:";
        for (const auto& v : row) os << " " << v;
        os << "\n";
    }
    int n_pass = 0;
    for (const auto& c : checks) {
        os << "check: " << c.name << " " << (c.pass ? "pass" : "FAIL") << " value=" << fmt_num(c.value)
           << " tol=" << fmt_num(c.tolerance);
        if (!c.detail.empty()) os << " " << c.detail;
        os << "\n";
        if (c.pass) ++n_pass;
    }
    os << "summary: " << n_pass << "/" << checks.size() << " checks passed\n";
    return os.str();
}

std::string ExperimentReport::delimited() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "\t" : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "\t" : "") << row[i];
        os << "\n";
    }
    os << "# check\tstatus\tvalue\ttol\tdetail\n";
    for (const auto& c : checks)
        os << "# " << c.name << "\t" << (c.pass ? "pass" : "FAIL") << "\t" << fmt_num(c.value) << "\t"
           << fmt_num(c.tolerance) << "\t" << c.detail << "\n";
    return os.str();
}

std::vector<std::string> emit_report(const ExperimentReport& report, const std::string& path,
                                     const std::string& format) {
    std::vector<std::string> written;
    auto write_file = [&](const std::string& p, const std::string& content) {
        std::ofstream out(p);
        if (!out) throw std::runtime_error("cannot write report file: " + p);
        out << content;
        written.push_back(p);
    };
    if (format == "structured-text") {
        write_file(path, report.body_text() + "# wall_ms " + fmt_num(report.wall_ms) + "\n");
    } else if (format == "delimited-table") {
        write_file(path, report.delimited() + "# wall_ms\t" + fmt_num(report.wall_ms) + "\n");
    } else if (format == "plot-data") {
        for (const auto& s : report.series) {
            std::ostringstream os;
            for (const auto& [x, y] : s.points) os << fmt_num(x) << " " << fmt_num(y) << "\n";
            write_file(path + "." + s.name + ".dat", os.str());
        }
    } else {
        throw std::invalid_argument("unknown report format: " + format);
    }
    return written;
}

// ---------------------------------------------------------------------------
// Shared experiment plumbing
// ---------------------------------------------------------------------------

namespace {

std::string knob_string(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "n_samples=" << cfg.quad.n_samples << " n_trunc=" << cfg.quad.n_trunc
       << " radial=" << cfg.quad.radial_order << " angular=" << cfg.quad.angular_order
       << " analysis=" << cfg.quad.analysis_samples << " seed=" << cfg.seed;
    return os.str();
}

struct CurveContext {
    CurveSpec spec;
    CurveSample curve;
    ConformalMap interior;
    ConformalMap exterior;
};

CurveContext make_context(const CurveSpec& spec_in, int default_n) {
    CurveSpec spec = spec_in;
    if (spec.n_samples <= 0) spec.n_samples = default_n;
    CurveSample curve = spec.build();
    ConformalMap interior = spec.has_closed_form()
                                ? closed_form_interior_map(spec.family_variant(), curve.size())
                                : fit_numeric_map(curve, ConformalMap::Side::interior);
    ConformalMap exterior = spec.is_circle()
                                ? closed_form_exterior_map(spec.family_variant(), curve.size())
                                : fit_numeric_map(curve, ConformalMap::Side::exterior_reflected);
    return CurveContext{std::move(spec), std::move(curve), std::move(interior), std::move(exterior)};
}

// Default probe set for a curve: the anchor plus two-sided normal offsets
// at two boundary locations (one of them opposite the start, where the
// polynomial family develops its cusp).
std::vector<ProbePoint> default_probes(const CurveSample& curve) {
    std::vector<ProbePoint> probes;
    double diam = curve_diameter(curve);
    double floor = pole_resolution_floor(curve);
    auto try_add = [&](cplx w) {
        double d = distance_to_curve(curve, w);
        if (d < std::max(floor, 0.01 * diam)) return;
        probes.push_back(make_probe(curve, w));
    };
    try_add(anchor_point(curve));
    const int n = curve.size();
    for (int k : {0, n / 2}) {
        cplx tangent = curve.point(k + 1) - curve.point(k);
        tangent /= std::abs(tangent);
        cplx normal = cplx(0.0, 1.0) * tangent;
        for (double frac : {0.125}) {
            try_add(curve.point(k) + frac * diam * normal);
            try_add(curve.point(k) - frac * diam * normal);
        }
    }
    return probes;
}

} // namespace

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

ExperimentReport run_douglas(const ExperimentConfig& cfg_in) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = cfg_in;
    if (cfg.curves.empty()) cfg.curves.push_back(CurveSpec::parse("circle:1@" + std::to_string(cfg.quad.n_samples)));
    if (cfg.p_values.empty()) cfg.p_values = {2.0};
    if (cfg.functions.empty())
        for (int n = 1; n <= 8; ++n) cfg.functions.push_back(FnSpec::parse("cos:" + std::to_string(n)));

    for (const auto& spec : cfg.curves)
        if (!spec.is_circle()) throw std::invalid_argument("douglas experiment requires circle curves (equality holds on the circle only)");
    for (double p : cfg.p_values)
        if (p != 2.0) throw std::invalid_argument("douglas experiment requires p = 2");
    for (const auto& f : cfg.functions)
        if (f.is_pole()) throw std::invalid_argument("douglas experiment uses real trigonometric traces");

    ExperimentReport rep;
    rep.experiment = "douglas";
    rep.provenance = knob_string(cfg);
    rep.columns = {"curve", "fn", "besov", "interior", "exterior", "max_rel_dev"};
    const double tol_oracle = cfg.tol("douglas_oracle_rel", 1e-3);
    const double tol_dev = cfg.tol("douglas_pairwise_rel", 2e-3);

    for (const auto& spec : cfg.curves) {
        CurveContext ctx = make_context(spec, cfg.quad.n_samples);
        for (const auto& fn : cfg.functions) {
            BoundaryFunction u = fn.build(cfg.seed);
            SeminormReport tr = seminorm_triple(ctx.curve, ctx.interior, ctx.exterior, u, 2.0,
                                                cfg.quad.seminorm_quad());
            double vals[3] = {tr.besov, tr.interior, *tr.exterior};
            double vmax = std::max({vals[0], vals[1], vals[2]});
            double vmin = std::min({vals[0], vals[1], vals[2]});
            double dev = vmax > 0 ? (vmax - vmin) / vmax : 0.0;
            rep.rows.push_back({ctx.spec.label(), fn.text, fmt_num(tr.besov), fmt_num(tr.interior),
                                fmt_num(*tr.exterior), fmt_num(dev)});
            // cos:n has the closed-form value sqrt(n/2).
            if (fn.text.rfind("cos:", 0) == 0) {
                int n = std::stoi(fn.text.substr(4));
                double expect = std::sqrt(n / 2.0);
                double worst = 0.0;
                for (double v : vals) worst = std::max(worst, std::abs(v - expect) / expect);
                rep.checks.push_back({"douglas_" + fn.text + "_oracle", worst <= tol_oracle, worst, tol_oracle,
                                      "expected " + fmt_num(expect)});
            }
            rep.checks.push_back({"douglas_" + fn.text + "_pairwise", dev <= tol_dev, dev, tol_dev, ""});
        }
    }
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

ExperimentReport run_equivalence(const ExperimentConfig& cfg_in) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = cfg_in;
    if (cfg.curves.empty()) {
        for (const char* s : {"circle:1", "polynomial:0.2", "polynomial:0.35", "square", "koch:1", "koch:2"})
            cfg.curves.push_back(CurveSpec::parse(std::string(s) + "@" + std::to_string(cfg.quad.n_samples)));
    }
    if (cfg.p_values.empty()) cfg.p_values = {2.0, 3.0};
    if (cfg.functions.empty())
        for (const char* s : {"cos:1", "cos:2", "cos:3", "cos:4", "sin:2", "sin:3"})
            cfg.functions.push_back(FnSpec::parse(s));

    ExperimentReport rep;
    rep.experiment = "equivalence";
    rep.provenance = knob_string(cfg);
    rep.columns = {"curve", "k_hat", "p", "fn", "besov", "interior", "exterior", "b_over_i", "e_over_i"};
    const double lo = cfg.tol("circle_ratio_lo", 0.9);
    const double hi = cfg.tol("circle_ratio_hi", 1.1);
    const double sandwich_slack = cfg.tol("sandwich_slack", 1e-6);

    for (const auto& spec : cfg.curves) {
        std::optional<CurveContext> ctx_opt;
        try {
            ctx_opt.emplace(make_context(spec, cfg.quad.n_samples));
        } catch (const std::exception& e) {
            rep.rows.push_back({spec.label(), "-", "-", "-", "-", "-", "-", "-", std::string("error:") + e.what()});
            continue;
        }
        CurveContext& ctx = *ctx_opt;
        double k_hat = chord_arc_constant(ctx.curve);
        CurveSample unit_curve = reparametrize_arclength(ctx.curve, 2.0 * kPi);
        for (double p : cfg.p_values) {
            double worst_bi = 0.0, best_bi = 1e300, worst_ei = 0.0, best_ei = 1e300;
            for (const auto& fn : cfg.functions) {
                BoundaryFunction u = fn.build(cfg.seed);
                SeminormReport tr;
                try {
                    tr = seminorm_triple(ctx.curve, ctx.interior, ctx.exterior, u, p, cfg.quad.seminorm_quad());
                } catch (const std::exception& e) {
                    rep.rows.push_back({ctx.spec.label(), fmt_num(k_hat), fmt_num(p), fn.text, "-", "-", "-", "-",
                                        std::string("error:") + e.what()});
                    continue;
                }
                rep.rows.push_back({ctx.spec.label(), fmt_num(k_hat), fmt_num(p), fn.text, fmt_num(tr.besov),
                                    fmt_num(tr.interior), fmt_num(*tr.exterior),
                                    tr.besov_over_interior ? fmt_num(*tr.besov_over_interior) : "-",
                                    tr.exterior_over_interior ? fmt_num(*tr.exterior_over_interior) : "-"});
                if (tr.besov_over_interior) {
                    worst_bi = std::max(worst_bi, *tr.besov_over_interior);
                    best_bi = std::min(best_bi, *tr.besov_over_interior);
                    worst_ei = std::max(worst_ei, *tr.exterior_over_interior);
                    best_ei = std::min(best_ei, *tr.exterior_over_interior);
                }
                if (ctx.spec.is_circle() && p == 2.0 && tr.besov_over_interior) {
                    bool ok = *tr.besov_over_interior >= lo && *tr.besov_over_interior <= hi &&
                              *tr.exterior_over_interior >= lo && *tr.exterior_over_interior <= hi;
                    rep.checks.push_back({"circle_ratio_p2_" + fn.text, ok, *tr.besov_over_interior, hi,
                                          "bracket [" + fmt_num(lo) + "," + fmt_num(hi) + "]"});
                }
                // Chord-arc sandwich on the length-2pi reparametrization:
                // (4/pi^2) B_S^p <= B_Gamma^p <= K^2 B_S^p. Pole locations
                // do not transport under the rescaling, so only
                // parametrization-borne traces take part.
                if (fn.is_pole()) continue;
                double b_curve = besov_seminorm(unit_curve, u, p);
                double b_circle = circle_pullback_besov(unit_curve, u, p);
                double bp = std::pow(b_curve, p), sp = std::pow(b_circle, p);
                double lo_slack = bp - (4.0 / (kPi * kPi)) * sp;
                double hi_slack = k_hat * k_hat * (1.0 + 1e-12) * sp - bp;
                double scale = std::max(bp, sp);
                bool ok = lo_slack >= -sandwich_slack * scale && hi_slack >= -sandwich_slack * scale;
                rep.checks.push_back({"sandwich_" + ctx.spec.label() + "_p" + fmt_num(p) + "_" + fn.text, ok,
                                      std::min(lo_slack, hi_slack) / (scale > 0 ? scale : 1.0), sandwich_slack,
                                      "K=" + fmt_num(k_hat)});
            }
            rep.rows.push_back({ctx.spec.label(), fmt_num(k_hat), fmt_num(p), "WORST", "-", "-", "-",
                                fmt_num(worst_bi) + "/" + fmt_num(best_bi),
                                fmt_num(worst_ei) + "/" + fmt_num(best_ei)});
            rep.series.push_back({"ratio_vs_khat_p" + fmt_num(p), {{k_hat, worst_bi}}});
        }
    }
    // Merge per-curve series of the same p into one plot series.
    std::map<std::string, PlotSeries> merged;
    for (const auto& s : rep.series) {
        auto& m = merged[s.name];
        m.name = s.name;
        m.points.insert(m.points.end(), s.points.begin(), s.points.end());
    }
    rep.series.clear();
    for (auto& [name, s] : merged) rep.series.push_back(std::move(s));
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

ExperimentReport run_necessity(const ExperimentConfig& cfg_in) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = cfg_in;
    if (cfg.curves.empty()) {
        cfg.curves.push_back(CurveSpec::parse("circle:1@" + std::to_string(cfg.quad.n_samples)));
        for (double c : {0.0, 0.1, 0.2, 0.3, 0.4, 0.45, 0.49})
            cfg.curves.push_back(CurveSpec::parse("polynomial:" + fmt_num(c) + "@" + std::to_string(cfg.quad.n_samples)));
        for (int l : {1, 2, 3, 4})
            cfg.curves.push_back(CurveSpec::parse("koch:" + std::to_string(l) + "@" + std::to_string(cfg.quad.n_samples)));
    }
    if (cfg.p_values.empty()) cfg.p_values = {2.0, 3.0};

    ExperimentReport rep;
    rep.experiment = "necessity";
    rep.provenance = knob_string(cfg);
    rep.columns = {"curve", "w", "side", "d", "p", "besov_p", "identity_rel", "energy_p", "bound_ii_slack",
                   "bound_iii_slack"};
    // Corner-heavy curves converge to the image-curve identity slower than
    // the smooth families (measured up to ~5e-3 on Koch at p=3); the
    // acceptance suite separately pins 1e-3 for the circle and the
    // quadratic curve, where the error is ~2e-4.
    const double tol_identity = cfg.tol("identity_rel", 1e-2);
    const double tol_slack = cfg.tol("bound_slack_min", 0.0);

    struct SweepRow {
        double param;
        double k_hat;
        double c_hat;
        double qs_hat;
        double worst_ratio;
    };
    std::vector<SweepRow> poly_sweep, koch_sweep;

    for (const auto& spec : cfg.curves) {
        CurveContext ctx = make_context(spec, cfg.quad.n_samples);
        double k_hat = chord_arc_constant(ctx.curve);
        double c_hat = dual_regularity(ctx.curve).c_hat;
        double qs_hat = 0.0;
        if (spec.family == "polynomial" || spec.family == "koch") {
            // Welding quasisymmetry tracks the quasicircle degradation of
            // the family; both maps are refitted numerically so the welding
            // compares like with like.
            ConformalMap num_int = spec.has_closed_form()
                                       ? fit_numeric_map(ctx.curve, ConformalMap::Side::interior)
                                       : ctx.interior;
            qs_hat = quasisymmetry_constant(compute_welding(num_int, ctx.exterior), dyadic_alpha_grid(6));
        }
        double worst_ratio = 0.0;

        std::vector<ProbePoint> probes = default_probes(ctx.curve);
        for (const auto& probe : probes) {
            BoundaryFunction u = BoundaryFunction::pole(probe.w);
            for (double p : cfg.p_values) {
                double besov = 0.0;
                try {
                    besov = besov_seminorm(ctx.curve, u, p);
                } catch (const std::exception& e) {
                    rep.rows.push_back({ctx.spec.label(), fmt_num(probe.w.real()) + "+" + fmt_num(probe.w.imag()) + "i",
                                        "-", fmt_num(probe.dist), fmt_num(p), "-", "-", "-", "-",
                                        std::string("skipped:") + e.what()});
                    continue;
                }
                double besov_p = std::pow(besov, p);
                double lhs = 4.0 * kPi * kPi * besov_p;
                double rhs = image_pair_integral(ctx.curve, probe.w, p);
                double identity_rel = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);

                bool is_ext = probe.side == ProbePoint::Side::exterior;
                double energy_p;
                if (is_ext) {
                    double v = interior_seminorm(ctx.curve, ctx.interior, u, p, cfg.quad.seminorm_quad());
                    energy_p = std::pow(v, p);
                    double ratio = besov / v;
                    worst_ratio = std::max(worst_ratio, ratio);
                } else {
                    double v = exterior_seminorm(ctx.curve, ctx.exterior, u, p, cfg.quad.seminorm_quad());
                    energy_p = std::pow(v, p);
                }
                double bound_ii = std::pow(4.0, p - 2.0) / p * std::pow(probe.dist, -p);
                double slack_ii = bound_ii - energy_p;
                double len_img = image_curve_length(ctx.curve, probe.w);
                double bound_iii = std::pow(8.0, 1.0 - p) * len_img * std::pow(probe.dist, 1.0 - p) /
                                   (4.0 * kPi * kPi);
                double slack_iii = besov_p - bound_iii;

                rep.rows.push_back({ctx.spec.label(), fmt_num(probe.w.real()) + "+" + fmt_num(probe.w.imag()) + "i",
                                    is_ext ? "ext" : "int", fmt_num(probe.dist), fmt_num(p), fmt_num(besov_p),
                                    fmt_num(identity_rel), fmt_num(energy_p), fmt_num(slack_ii), fmt_num(slack_iii)});
                std::string tag = ctx.spec.label() + "_" + (is_ext ? "ext" : "int") + "_p" + fmt_num(p);
                rep.checks.push_back({"identity_" + tag, identity_rel <= tol_identity, identity_rel, tol_identity, ""});
                rep.checks.push_back({"bound_ii_" + tag, slack_ii >= tol_slack, slack_ii, tol_slack, ""});
                rep.checks.push_back({"bound_iii_" + tag, slack_iii >= tol_slack, slack_iii, tol_slack, ""});
            }
        }

        if (ctx.spec.family == "polynomial") poly_sweep.push_back({ctx.spec.c, k_hat, c_hat, qs_hat, worst_ratio});
        if (ctx.spec.family == "koch")
            koch_sweep.push_back({static_cast<double>(ctx.spec.level), k_hat, c_hat, qs_hat, worst_ratio});
    }

    auto check_sweep = [&](const std::string& name, std::vector<SweepRow> sweep) {
        if (sweep.size() < 2) return;
        std::sort(sweep.begin(), sweep.end(), [](const SweepRow& a, const SweepRow& b) { return a.param < b.param; });
        auto mono = [&](auto field) {
            for (std::size_t i = 1; i < sweep.size(); ++i)
                if (field(sweep[i]) < field(sweep[i - 1]) * (1.0 - 1e-9)) return false;
            return true;
        };
        bool mono_k = mono([](const SweepRow& r) { return r.k_hat; });
        bool mono_c = mono([](const SweepRow& r) { return r.c_hat; });
        bool mono_r = mono([](const SweepRow& r) { return r.worst_ratio; });
        rep.checks.push_back({name + "_k_hat_monotone", mono_k, sweep.back().k_hat, 0.0,
                              "first " + fmt_num(sweep.front().k_hat)});
        rep.checks.push_back({name + "_c_hat_monotone", mono_c, sweep.back().c_hat, 0.0,
                              "first " + fmt_num(sweep.front().c_hat)});
        rep.checks.push_back({name + "_ratio_monotone", mono_r, sweep.back().worst_ratio, 0.0,
                              "first " + fmt_num(sweep.front().worst_ratio)});
        PlotSeries sk{name + "_k_hat", {}}, sc{name + "_c_hat", {}}, sq{name + "_qs_hat", {}}, sr{name + "_ratio", {}};
        for (const auto& r : sweep) {
            sk.points.push_back({r.param, r.k_hat});
            sc.points.push_back({r.param, r.c_hat});
            sq.points.push_back({r.param, r.qs_hat});
            sr.points.push_back({r.param, r.worst_ratio});
        }
        rep.series.push_back(std::move(sk));
        rep.series.push_back(std::move(sc));
        rep.series.push_back(std::move(sq));
        rep.series.push_back(std::move(sr));
        rep.rows.push_back({name + "_sweep", "-", "-", "-", "-", "-", "-", "-",
                            "c_hat_last_over_first=" + fmt_num(sweep.back().c_hat / sweep.front().c_hat),
                            "qs_hat_last_over_first=" + fmt_num(sweep.back().qs_hat / sweep.front().qs_hat)});
    };
    check_sweep("polynomial", poly_sweep);
    check_sweep("koch", koch_sweep);

    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

ExperimentReport run_regularity_sweep(const ExperimentConfig& cfg_in) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = cfg_in;
    if (cfg.curves.empty())
        for (const char* s : {"circle:1", "square", "polynomial:0.2", "polynomial:0.4", "koch:1", "koch:2", "koch:3"})
            cfg.curves.push_back(CurveSpec::parse(std::string(s) + "@" + std::to_string(cfg.quad.n_samples)));

    ExperimentReport rep;
    rep.experiment = "regularity_sweep";
    rep.provenance = knob_string(cfg);
    rep.columns = {"curve", "k_hat", "m_hat", "c_hat", "c_argmax"};
    const double concord_min = cfg.tol("rank_concordance_min", 0.8);

    std::vector<double> m_hats, c_hats;
    for (const auto& spec : cfg.curves) {
        CurveSample curve = [&] {
            CurveSpec s = spec;
            if (s.n_samples <= 0) s.n_samples = cfg.quad.n_samples;
            return s.build();
        }();
        RegularityReport r = regularity_report(curve);
        m_hats.push_back(r.m_hat);
        c_hats.push_back(r.c_hat);
        rep.rows.push_back({spec.label(), fmt_num(r.k_hat), fmt_num(r.m_hat), fmt_num(r.c_hat),
                            fmt_num(r.dual.argmax_w.real()) + "+" + fmt_num(r.dual.argmax_w.imag()) + "i"});
        if (spec.is_circle()) {
            double expect = 2.0 * kPi;
            double rel = std::abs(r.c_hat - expect) / expect;
            double tol = cfg.tol("circle_dual_rel", 0.01);
            rep.checks.push_back({"circle_dual_2pi", rel <= tol, rel, tol, "c_hat=" + fmt_num(r.c_hat)});
            double center_dist = std::abs(r.dual.argmax_w);
            double tol_center = cfg.tol("circle_dual_argmax_dist", 0.05);
            rep.checks.push_back({"circle_dual_argmax_center", center_dist <= tol_center, center_dist, tol_center, ""});
        }
    }
    if (m_hats.size() >= 2) {
        double rho = spearman_rank_correlation(m_hats, c_hats);
        rep.checks.push_back({"rank_concordance", rho >= concord_min, rho, concord_min, ""});
    }
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == "douglas") return run_douglas(cfg);
    if (cfg.experiment == "equivalence") return run_equivalence(cfg);
    if (cfg.experiment == "necessity") return run_necessity(cfg);
    if (cfg.experiment == "regularity_sweep") return run_regularity_sweep(cfg);
    if (cfg.experiment == "selftest") {
        auto t0 = std::chrono::steady_clock::now();
        ExperimentReport rep;
        rep.experiment = "selftest";
        rep.provenance = knob_string(cfg);
        rep.columns = {"criterion", "status", "detail"};
        for (const auto& r : selftest::run_all()) {
            rep.rows.push_back({r.name, r.pass ? "pass" : "FAIL", r.detail});
            rep.checks.push_back({r.name, r.pass, r.value, r.tolerance, r.detail});
        }
        rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }
    throw std::invalid_argument("unknown experiment name: " + cfg.experiment);
}

} // namespace lab
