#include "lab/selftest.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lab/conformal.hpp"
#include "lab/curve.hpp"
#include "lab/experiments.hpp"
#include "lab/harmonic.hpp"
#include "lab/regularity.hpp"
#include "lab/seminorms.hpp"

namespace lab::selftest {

namespace {

constexpr double kPi = std::numbers::pi;

// Pilot-fixed thresholds for the necessity trend (criterion 7); the pilot
// sweep is recorded in tests/data/necessity_regression.tsv.
constexpr double kNecessityChatRatioMin = 1.5;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CriterionResult douglas_suite() {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.experiment = "douglas";
    ExperimentReport rep = run_douglas(cfg);
    double elapsed = seconds_since(t0);
    double worst = 0.0;
    bool pass = true;
    for (const auto& c : rep.checks) {
        if (c.name.find("oracle") == std::string::npos) continue;
        worst = std::max(worst, c.value);
        pass = pass && c.pass;
    }
    pass = pass && elapsed < 60.0;
    std::ostringstream os;
    os << "worst rel dev " << fmt_num(worst) << ", " << fmt_num(elapsed) << " s";
    return {"1_douglas_suite", pass, worst, 1e-3, os.str()};
}

CriterionResult circle_equivalence_bracket() {
    const int n_samples = 1024;
    const int n_trunc = 128;
    std::vector<std::vector<cplx>> family;
    for (int n = 1; n <= 8; ++n) {
        std::vector<cplx> g(n_samples);
        for (int j = 0; j < n_samples; ++j) g[static_cast<std::size_t>(j)] = std::cos(n * 2.0 * kPi * j / n_samples);
        family.push_back(std::move(g));
    }
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int t = 0; t < 4; ++t) {
        std::vector<double> ca(8), sa(8);
        for (int n = 0; n < 8; ++n) {
            ca[static_cast<std::size_t>(n)] = unif(rng) / (n + 1.0);
            sa[static_cast<std::size_t>(n)] = unif(rng) / (n + 1.0);
        }
        std::vector<cplx> g(n_samples);
        for (int j = 0; j < n_samples; ++j) {
            double th = 2.0 * kPi * j / n_samples;
            double v = 0.0;
            for (int n = 0; n < 8; ++n)
                v += ca[static_cast<std::size_t>(n)] * std::cos((n + 1) * th) +
                     sa[static_cast<std::size_t>(n)] * std::sin((n + 1) * th);
            g[static_cast<std::size_t>(j)] = v;
        }
        family.push_back(std::move(g));
    }

    double c0 = 1.0;
    std::ostringstream brackets;
    for (double p : {2.0, 3.0, 4.0}) {
        double c0p = 1.0;
        for (const auto& g : family) {
            double besov = circle_besov_seminorm(g, p);
            DiskHarmonic ext = analyze_boundary(g, n_trunc);
            double interior = std::pow(disk_dirichlet_energy(ext, p), 1.0 / p);
            double ratio = besov / interior;
            c0p = std::max(c0p, std::max(ratio, 1.0 / ratio));
        }
        brackets << " p" << fmt_num(p) << ":C0=" << fmt_num(c0p);
        c0 = std::max(c0, c0p);
    }
    return {"2_circle_equivalence_bracket", c0 <= 50.0, c0, 50.0, "bracket" + brackets.str()};
}

CriterionResult lemma_sin_suite() {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<CurveSpec> corpus;
    for (const char* s : {"circle:1@1024", "square@1024", "polynomial:0.3@1024", "polynomial:0.45@1024",
                          "koch:1@768", "koch:2@768", "koch:3@768"})
        corpus.push_back(CurveSpec::parse(s));
    double worst1 = 1e300, worst2 = 1e300;
    for (const auto& spec : corpus) {
        CurveSample curve = reparametrize_arclength(spec.build(), 2.0 * kPi);
        double k_hat = chord_arc_constant(curve) * (1.0 + 1e-6);
        LemmaSinResult r = lemma_sin_slack(curve, k_hat);
        worst1 = std::min(worst1, r.slack1);
        worst2 = std::min(worst2, *r.slack2);
    }
    double elapsed = seconds_since(t0);
    bool pass = worst1 >= -1e-9 && worst2 >= -1e-9 && elapsed < 30.0;
    std::ostringstream os;
    os << "min slack1 " << fmt_num(worst1) << ", min slack2 " << fmt_num(worst2) << ", " << fmt_num(elapsed) << " s";
    return {"3_lemma_sin", pass, std::min(worst1, worst2), -1e-9, os.str()};
}

CriterionResult geometry_oracles() {
    CurveSample circle = make_named_curve(CircleFamily{1.0}, 2048);
    CurveSample square = CurveSpec::parse("square@2048").build();
    double k_circle = chord_arc_constant(circle);
    double k_square = chord_arc_constant(square);
    double err_c = std::abs(k_circle - kPi / 2.0);
    double err_s = std::abs(k_square - 2.0);

    CurveSample circle_d = make_named_curve(CircleFamily{1.0}, 1024);
    DualRegularityResult dual = dual_regularity(circle_d);
    double err_d = std::abs(dual.c_hat - 2.0 * kPi) / (2.0 * kPi);
    double argmax_off = std::abs(dual.argmax_w);

    bool pass = err_c <= 1e-3 && err_s <= 1e-3 && err_d <= 0.01 && argmax_off <= 0.05;
    std::ostringstream os;
    os << "K(circle)=" << fmt_num(k_circle) << " K(square)=" << fmt_num(k_square)
       << " C(circle)=" << fmt_num(dual.c_hat) << " argmax_off=" << fmt_num(argmax_off);
    return {"4_geometry_oracles", pass, std::max({err_c, err_s, err_d}), 1e-3, os.str()};
}

std::vector<ProbePoint> two_sided_probes(const CurveSample& curve) {
    std::vector<ProbePoint> probes;
    double diam = curve_diameter(curve);
    const int n = curve.size();
    for (int k : {0, n / 2}) {
        cplx tangent = curve.point(k + 1) - curve.point(k);
        tangent /= std::abs(tangent);
        cplx normal = cplx(0.0, 1.0) * tangent;
        for (double sgn : {1.0, -1.0}) {
            cplx w = curve.point(k) + sgn * 0.125 * diam * normal;
            if (distance_to_curve(curve, w) >= pole_resolution_floor(curve)) probes.push_back(make_probe(curve, w));
        }
    }
    return probes;
}

CriterionResult image_identity() {
    double worst = 0.0;
    auto check = [&](const CurveSample& curve, cplx w, double p) {
        BoundaryFunction u = BoundaryFunction::pole(w);
        double lhs = 4.0 * kPi * kPi * std::pow(besov_seminorm(curve, u, p), p);
        double rhs = image_pair_integral(curve, w, p);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    };
    CurveSample circle = make_named_curve(CircleFamily{1.0}, 1024);
    for (double p : {2.0, 3.0}) {
        check(circle, cplx(0.0, 0.0), p);
        check(circle, cplx(1.5, 0.0), p);
    }
    CurveSample poly = make_named_curve(PolynomialFamily{0.3}, 1024);
    for (const auto& probe : two_sided_probes(poly))
        for (double p : {2.0, 3.0}) check(poly, probe.w, p);
    return {"5_image_identity", worst <= 1e-3, worst, 1e-3, "worst rel err " + fmt_num(worst)};
}

CriterionResult pole_bounds() {
    double worst_slack = 1e300;
    std::ostringstream os;
    auto check_curve = [&](const CurveSpec& spec) {
        CurveSample curve = spec.build();
        ConformalMap interior = spec.has_closed_form()
                                    ? closed_form_interior_map(spec.family_variant(), curve.size())
                                    : fit_numeric_map(curve, ConformalMap::Side::interior);
        ConformalMap exterior = spec.is_circle()
                                    ? closed_form_exterior_map(spec.family_variant(), curve.size())
                                    : fit_numeric_map(curve, ConformalMap::Side::exterior_reflected);
        SeminormQuad quad;
        for (const auto& probe : two_sided_probes(curve)) {
            BoundaryFunction u = BoundaryFunction::pole(probe.w);
            for (double p : {2.0, 3.0}) {
                double energy_p;
                if (probe.side == ProbePoint::Side::exterior) {
                    energy_p = std::pow(interior_seminorm(curve, interior, u, p, quad), p);
                } else {
                    energy_p = std::pow(exterior_seminorm(curve, exterior, u, p, quad), p);
                }
                double slack_ii = std::pow(4.0, p - 2.0) / p * std::pow(probe.dist, -p) - energy_p;
                double besov_p = std::pow(besov_seminorm(curve, u, p), p);
                double bound_iii = std::pow(8.0, 1.0 - p) * image_curve_length(curve, probe.w) *
                                   std::pow(probe.dist, 1.0 - p) / (4.0 * kPi * kPi);
                double slack_iii = besov_p - bound_iii;
                worst_slack = std::min({worst_slack, slack_ii, slack_iii});
            }
        }
    };
    check_curve(CurveSpec::parse("circle:1@1024"));
    check_curve(CurveSpec::parse("polynomial:0.3@1024"));
    os << "min slack " << fmt_num(worst_slack);
    return {"6_pole_bounds", worst_slack >= 0.0, worst_slack, 0.0, os.str()};
}

CriterionResult necessity_trend() {
    ExperimentConfig cfg;
    cfg.experiment = "necessity";
    cfg.quad.n_samples = 512;
    cfg.quad.n_trunc = 128;
    cfg.quad.analysis_samples = 512;
    cfg.quad.angular_order = 256;
    ExperimentReport rep = run_necessity(cfg);

    bool pass = true;
    std::ostringstream os;
    for (const auto& c : rep.checks) {
        if (c.name.find("monotone") == std::string::npos) continue;
        pass = pass && c.pass;
        if (!c.pass) os << c.name << " FAILED (" << c.detail << " -> " << fmt_num(c.value) << "); ";
    }
    double koch_ratio = 0.0;
    for (const auto& s : rep.series)
        if (s.name == "koch_c_hat" && !s.points.empty()) koch_ratio = s.points.back().second / s.points.front().second;
    pass = pass && koch_ratio >= kNecessityChatRatioMin;
    os << "koch C_hat last/first " << fmt_num(koch_ratio) << " (threshold " << fmt_num(kNecessityChatRatioMin) << ")";
    return {"7_necessity_trend", pass, koch_ratio, kNecessityChatRatioMin, os.str()};
}

CriterionResult engine_validation() {
    double worst_boundary = 0.0, worst_deriv = 0.0;
    auto check_family = [&](const CurveFamily& family, int n) {
        CurveSample curve = make_named_curve(family, n);
        ConformalMap numeric = fit_numeric_map(curve, ConformalMap::Side::interior);
        ConformalMap exact = closed_form_interior_map(family, n);
        for (const auto& e : numeric.boundary_table()) {
            cplx ref = exact.boundary_point_on_curve(e.theta);
            worst_boundary = std::max(worst_boundary, std::abs(e.curve_point - ref));
        }
        for (double r : {0.3, 0.6, 0.9}) {
            for (int j = 0; j < 16; ++j) {
                cplx z = std::polar(r, 2.0 * kPi * j / 16.0);
                cplx dn = numeric.eval_derivative(z);
                cplx de = exact.eval_derivative(z);
                worst_deriv = std::max(worst_deriv, std::abs(dn - de) / std::abs(de));
            }
        }
    };
    check_family(CircleFamily{1.0}, 256);
    check_family(PolynomialFamily{0.2}, 256);
    check_family(PolynomialFamily{0.3}, 256);

    CurveSample circle = make_named_curve(CircleFamily{1.0}, 256);
    Welding w = compute_welding(fit_numeric_map(circle, ConformalMap::Side::interior),
                                fit_numeric_map(circle, ConformalMap::Side::exterior_reflected));
    double c_hat = quasisymmetry_constant(w, dyadic_alpha_grid(8));

    bool pass = worst_boundary <= 1e-2 && worst_deriv <= 5e-2 && c_hat <= 1.0 + 1e-2;
    std::ostringstream os;
    os << "boundary sup " << fmt_num(worst_boundary) << ", deriv rel " << fmt_num(worst_deriv)
       << ", circle welding C " << fmt_num(c_hat);
    return {"8_engine_validation", pass, worst_boundary, 1e-2, os.str()};
}

CriterionResult invariant_suites() {
    std::ostringstream os;
    bool pass = true;

    // Similarity invariance of the Besov seminorm, K_hat and C_hat.
    CurveSample base = make_named_curve(PolynomialFamily{0.3}, 512);
    cplx lambda(1.3, -0.6);
    cplx offset(0.4, 2.0);
    std::vector<cplx> scaled_pts;
    for (const auto& z : base.points()) scaled_pts.push_back(lambda * z + offset);
    CurveSample scaled = make_polyline_curve(std::move(scaled_pts), "scaled");
    BoundaryFunction u = BoundaryFunction::cosine(2);
    double sim_err = 0.0;
    for (double p : {2.0, 3.0})
        sim_err = std::max(sim_err, std::abs(besov_seminorm(base, u, p) - besov_seminorm(scaled, u, p)) /
                                        besov_seminorm(base, u, p));
    sim_err = std::max(sim_err, std::abs(chord_arc_constant(base) - chord_arc_constant(scaled)) /
                                    chord_arc_constant(base));
    double c_base = dual_regularity(base).c_hat;
    // Scale-only similarity for C_hat: probe geometry follows the curve.
    std::vector<cplx> scaled2;
    for (const auto& z : base.points()) scaled2.push_back(2.0 * z);
    double c_scaled = dual_regularity(make_polyline_curve(std::move(scaled2), "scaled2")).c_hat;
    sim_err = std::max(sim_err, std::abs(c_base - c_scaled) / c_base);
    pass = pass && sim_err <= 1e-10;
    os << "similarity err " << fmt_num(sim_err);

    // Homogeneity in u.
    CurveSample circle = make_named_curve(CircleFamily{1.0}, 512);
    ConformalMap map = closed_form_interior_map(CircleFamily{1.0}, 512);
    SeminormQuad quad;
    quad.n_trunc = 64;
    quad.analysis_samples = 512;
    double b1 = besov_seminorm(circle, u, 3.0);
    double b2 = besov_seminorm(circle, u.scaled(2.5), 3.0);
    double i1 = interior_seminorm(circle, map, u, 3.0, quad);
    double i2 = interior_seminorm(circle, map, u.scaled(2.5), 3.0, quad);
    double hom_err = std::max(std::abs(b2 - 2.5 * b1) / (2.5 * b1), std::abs(i2 - 2.5 * i1) / (2.5 * i1));
    pass = pass && hom_err <= 1e-10;
    os << ", homogeneity err " << fmt_num(hom_err);

    // Conformal reparametrization invariance of the interior seminorm:
    // precompose the boundary parametrization with a disk automorphism.
    const int m = 1024;
    cplx a(0.3, 0.2);
    std::vector<cplx> g(m), gm(m);
    CurveSample poly = make_named_curve(PolynomialFamily{0.3}, 512);
    ConformalMap pmap = closed_form_interior_map(PolynomialFamily{0.3}, 512);
    for (int j = 0; j < m; ++j) {
        double th = 2.0 * kPi * j / m;
        cplx z = std::polar(1.0, th);
        cplx zm = (z - a) / (1.0 - std::conj(a) * z);
        g[static_cast<std::size_t>(j)] = u.eval(poly, pmap.boundary_point_on_curve(th), pmap.boundary_arclength(th));
        double thm = std::arg(zm);
        gm[static_cast<std::size_t>(j)] =
            u.eval(poly, pmap.boundary_point_on_curve(thm), pmap.boundary_arclength(thm));
    }
    double e1 = disk_dirichlet_energy(analyze_boundary(g, 128), 3.0);
    double e2 = disk_dirichlet_energy(analyze_boundary(gm, 128), 3.0);
    double conf_err = std::abs(std::pow(e1, 1.0 / 3.0) - std::pow(e2, 1.0 / 3.0)) / std::pow(e1, 1.0 / 3.0);
    pass = pass && conf_err <= 1e-3;
    os << ", reparam err " << fmt_num(conf_err);

    // Wirtinger gradient against centered finite differences.
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<cplx> coeffs(2 * 16 + 1);
    for (auto& cval : coeffs) cval = cplx(unif(rng), unif(rng));
    DiskHarmonic uh(coeffs, 16);
    cplx z0(0.3, 0.2);
    double h = 1e-6;
    auto [uw, uwb] = wirtinger_gradient(uh, z0);
    cplx ux = (eval_harmonic(uh, z0 + h) - eval_harmonic(uh, z0 - h)) / (2.0 * h);
    cplx uy = (eval_harmonic(uh, z0 + h * cplx(0, 1)) - eval_harmonic(uh, z0 - h * cplx(0, 1))) / (2.0 * h);
    cplx uw_fd = 0.5 * (ux - cplx(0, 1) * uy);
    cplx uwb_fd = 0.5 * (ux + cplx(0, 1) * uy);
    double fd_err = std::max(std::abs(uw - uw_fd) / std::abs(uw), std::abs(uwb - uwb_fd) / std::abs(uwb));
    pass = pass && fd_err <= 1e-8;
    os << ", gradient fd err " << fmt_num(fd_err);

    return {"9_invariant_suites", pass, sim_err, 1e-10, os.str()};
}

CriterionResult universal_lower_bound() {
    std::vector<CurveSpec> corpus;
    for (const char* s : {"circle:1@1024", "square@1024", "polynomial:0.3@1024", "polynomial:0.45@1024",
                          "polynomial:0.49@1024", "koch:1@768", "koch:2@768", "koch:3@768", "koch:4@768"})
        corpus.push_back(CurveSpec::parse(s));
    double worst = 1e300;
    for (const auto& spec : corpus) {
        CurveSample curve = reparametrize_arclength(spec.build(), 2.0 * kPi);
        for (double p : {2.0, 3.0}) {
            for (int n : {1, 2}) {
                BoundaryFunction u = BoundaryFunction::cosine(n);
                double bp = std::pow(besov_seminorm(curve, u, p), p);
                double sp = std::pow(circle_pullback_besov(curve, u, p), p);
                double slack = (bp - (4.0 / (kPi * kPi)) * sp) / std::max(bp, sp);
                worst = std::min(worst, slack);
            }
        }
    }
    return {"10_universal_lower_bound", worst >= -1e-6, worst, -1e-6, "min normalized slack " + fmt_num(worst)};
}

} // namespace

std::vector<CriterionResult> run_all() {
    std::vector<CriterionResult> results;
    results.push_back(douglas_suite());
    results.push_back(circle_equivalence_bracket());
    results.push_back(lemma_sin_suite());
    results.push_back(geometry_oracles());
    results.push_back(image_identity());
    results.push_back(pole_bounds());
    results.push_back(necessity_trend());
    results.push_back(engine_validation());
    results.push_back(invariant_suites());
    results.push_back(universal_lower_bound());
    return results;
}

} // namespace lab::selftest
