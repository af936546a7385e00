#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "lab/conformal.hpp"
#include "lab/curve.hpp"

using namespace lab;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("closed-form registry evaluates exactly") {
    ConformalMap ident = closed_form_interior_map(CircleFamily{1.0}, 64);
    CHECK(ident.eval(cplx(0.0, 0.5)) == cplx(0.0, 0.5));
    CHECK(ident.eval_derivative(cplx(0.2, 0.1)) == cplx(1.0));

    ConformalMap poly = closed_form_interior_map(PolynomialFamily{0.3}, 64);
    CHECK(poly.eval(cplx(0.5, 0.0)).real() == Approx(0.575));
    CHECK(poly.eval(cplx(0.5, 0.0)).imag() == Approx(0.0));
    CHECK(std::abs(poly.eval_derivative(cplx(-0.999999, 0.0)) - cplx(1.0 - 2.0 * 0.3 * 0.999999)) < 1e-9);

    ConformalMap poly49 = closed_form_interior_map(PolynomialFamily{0.49}, 64);
    double min_deriv = 1e300;
    for (int j = 0; j < 256; ++j) {
        cplx z = std::polar(1.0 - 1e-7, 2.0 * kPi * j / 256.0);
        min_deriv = std::min(min_deriv, std::abs(poly49.eval_derivative(z)));
    }
    CHECK(min_deriv == Approx(0.02).epsilon(1e-4));
}

TEST_CASE("numeric circle map matches the identity") {
    CurveSample curve = make_named_curve(CircleFamily{1.0}, 256);
    ConformalMap map = fit_numeric_map(curve, ConformalMap::Side::interior);
    CHECK(std::abs(map.eval(cplx(0.0, 0.0))) < 1e-9);
    for (cplx z : {cplx(0.5, 0.0), cplx(0.0, 0.5), cplx(-0.3, 0.4)}) {
        CAPTURE(z.real());
        CAPTURE(z.imag());
        CHECK(std::abs(map.eval(z) - z) < 1e-2);
        CHECK(std::abs(map.eval_derivative(z) - cplx(1.0)) < 5e-2);
    }
}

TEST_CASE("numeric polynomial map matches the closed form") {
    for (double c : {0.2, 0.3}) {
        CAPTURE(c);
        CurveSample curve = make_named_curve(PolynomialFamily{c}, 256);
        ConformalMap numeric = fit_numeric_map(curve, ConformalMap::Side::interior);
        ConformalMap exact = closed_form_interior_map(PolynomialFamily{c}, 256);
        double sup = 0.0;
        for (const auto& e : numeric.boundary_table())
            sup = std::max(sup, std::abs(e.curve_point - exact.boundary_point_on_curve(e.theta)));
        CHECK(sup < 1e-2);
        double dsup = 0.0;
        for (double r : {0.3, 0.6, 0.9})
            for (int j = 0; j < 16; ++j) {
                cplx z = std::polar(r, 2.0 * kPi * j / 16.0);
                dsup = std::max(dsup, std::abs(numeric.eval_derivative(z) - exact.eval_derivative(z)) /
                                          std::abs(exact.eval_derivative(z)));
            }
        CHECK(dsup < 5e-2);
    }
}

TEST_CASE("derivative consistency against finite differences") {
    CurveSample curve = make_named_curve(PolynomialFamily{0.25}, 256);
    ConformalMap map = fit_numeric_map(curve, ConformalMap::Side::interior);
    double h = 1e-7;
    for (cplx z : {cplx(0.1, 0.2), cplx(-0.4, 0.1), cplx(0.3, -0.3)}) {
        cplx fd = (map.eval(z + h) - map.eval(z - h)) / (2.0 * h);
        CHECK(std::abs(fd - map.eval_derivative(z)) < 1e-5);
    }
    ConformalMap cf = closed_form_interior_map(PolynomialFamily{0.25}, 256);
    for (cplx z : {cplx(0.1, 0.2), cplx(-0.4, 0.1)}) {
        cplx fd = (cf.eval(z + h) - cf.eval(z - h)) / (2.0 * h);
        CHECK(std::abs(fd - cf.eval_derivative(z)) / std::abs(cf.eval_derivative(z)) < 1e-6);
    }
}

TEST_CASE("hyperbolic density identities and distance comparison") {
    ConformalMap ident = closed_form_interior_map(CircleFamily{1.0}, 64);
    CHECK(ident.hyperbolic_density(cplx(0.0)) == Approx(1.0));
    ConformalMap big = closed_form_interior_map(CircleFamily{5.0}, 64);
    CHECK(big.hyperbolic_density(cplx(0.0)) == Approx(0.2));

    CurveSample curve = make_named_curve(PolynomialFamily{0.3}, 512);
    ConformalMap map = closed_form_interior_map(PolynomialFamily{0.3}, 512);
    for (int j = 0; j < 8; ++j) {
        for (double r : {0.0, 0.4, 0.8, 0.95}) {
            cplx z = std::polar(r, 2.0 * kPi * j / 8.0);
            double lam = map.hyperbolic_density(z);
            double d = distance_to_curve(curve, map.eval(z));
            CHECK(lam <= 1.0 / d * (1.0 + 1e-6));
            CHECK(lam >= 1.0 / (4.0 * d) * (1.0 - 1e-6));
        }
    }

    // Same two-sided comparison through the numeric engine on a polygon.
    CurveSample sq = make_named_curve(PolygonFamily{{cplx(-0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5), cplx(-0.5, 0.5)}}, 256);
    ConformalMap zmap = fit_numeric_map(sq, ConformalMap::Side::interior);
    for (int j = 0; j < 8; ++j) {
        cplx z = std::polar(0.7, 2.0 * kPi * j / 8.0 + 0.2);
        double lam = zmap.hyperbolic_density(z);
        double d = distance_to_curve(sq, zmap.eval(z));
        CHECK(lam <= 1.0 / d * (1.0 + 1e-2));
        CHECK(lam >= 1.0 / (4.0 * d) * (1.0 - 1e-2));
    }
}

TEST_CASE("welding of the circle is a rotation") {
    CurveSample curve = make_named_curve(CircleFamily{1.0}, 256);
    Welding w = compute_welding(closed_form_interior_map(CircleFamily{1.0}, 256),
                                closed_form_exterior_map(CircleFamily{1.0}, 256));
    CHECK(quasisymmetry_constant(w, dyadic_alpha_grid(8)) == Approx(1.0).epsilon(1e-9));

    Welding wn = compute_welding(fit_numeric_map(curve, ConformalMap::Side::interior),
                                 fit_numeric_map(curve, ConformalMap::Side::exterior_reflected));
    CHECK(quasisymmetry_constant(wn, dyadic_alpha_grid(8)) < 1.0 + 1e-2);
}

TEST_CASE("rotation weldings have quasisymmetry constant one") {
    const int n = 128;
    Welding h;
    h.theta.resize(n);
    h.lift.resize(n);
    for (int k = 0; k < n; ++k) {
        double t = 2.0 * kPi * k / n;
        h.theta[static_cast<std::size_t>(k)] = t;
        h.lift[static_cast<std::size_t>(k)] = t + 1.3;
    }
    CHECK(quasisymmetry_constant(h, dyadic_alpha_grid(8)) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quasisymmetry constant grows for a non-QS welding") {
    // h(theta) = 2 pi (theta/2pi)^2: quasisymmetry degenerates at 0.
    const int n = 512;
    Welding h;
    h.theta.resize(n);
    h.lift.resize(n);
    for (int k = 0; k < n; ++k) {
        double t = 2.0 * kPi * k / n;
        h.theta[static_cast<std::size_t>(k)] = t;
        h.lift[static_cast<std::size_t>(k)] = t * t / (2.0 * kPi);
    }
    h.lift[0] = 0.0;
    double c4 = quasisymmetry_constant(h, dyadic_alpha_grid(4));
    double c8 = quasisymmetry_constant(h, dyadic_alpha_grid(8));
    CHECK(c8 > c4);
    CHECK(c4 > 3.0);
}

TEST_CASE("square map construction yields a monotone winding-one table") {
    CurveSample sq = make_named_curve(PolygonFamily{{cplx(-0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5), cplx(-0.5, 0.5)}}, 256);
    ConformalMap map = fit_numeric_map(sq, ConformalMap::Side::interior);
    // Construction enforces monotonicity; spot-check the angles advance
    // once around the circle in curve order.
    const auto& t = map.boundary_table();
    double total = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
        double d = t[k].theta - t[k - 1].theta;
        while (d < 0) d += 2.0 * kPi;
        total += d;
    }
    CHECK(total < 2.0 * kPi);
    CHECK(std::abs(map.eval(cplx(0.0)) - sq.centroid()) < 1e-12);
}

TEST_CASE("welding quasisymmetry is similarity invariant") {
    CurveSample base = make_named_curve(PolynomialFamily{0.35}, 256);
    std::vector<cplx> moved;
    for (const auto& z : base.points()) moved.push_back(cplx(0.8, 1.4) * z + cplx(-2.0, 5.0));
    CurveSample scaled = make_polyline_curve(std::move(moved));
    auto qs = [](const CurveSample& c) {
        return quasisymmetry_constant(compute_welding(fit_numeric_map(c, ConformalMap::Side::interior),
                                                      fit_numeric_map(c, ConformalMap::Side::exterior_reflected)),
                                      dyadic_alpha_grid(6));
    };
    double a = qs(base);
    double b = qs(scaled);
    CHECK(a > 1.0);
    CHECK(b == Approx(a).epsilon(1e-6));
}

TEST_CASE("welding rejects mismatched inputs") {
    CurveSample circle = make_named_curve(CircleFamily{1.0}, 256);
    CurveSample poly = make_named_curve(PolynomialFamily{0.3}, 256);
    ConformalMap ci = fit_numeric_map(circle, ConformalMap::Side::interior);
    ConformalMap pe = fit_numeric_map(poly, ConformalMap::Side::exterior_reflected);
    CHECK_THROWS(compute_welding(ci, pe));
    CHECK_THROWS(compute_welding(ci, ci));
}

TEST_CASE("map cache round-trips") {
    CurveSample curve = make_named_curve(PolynomialFamily{0.3}, 128);
    ConformalMap map = fit_numeric_map(curve, ConformalMap::Side::interior);
    ConformalMap back = ConformalMap::from_cache_json(map.cache_json(), curve);
    for (cplx z : {cplx(0.3, 0.1), cplx(-0.2, -0.4)}) {
        CHECK(std::abs(map.eval(z) - back.eval(z)) < 1e-12);
        CHECK(std::abs(map.eval_derivative(z) - back.eval_derivative(z)) < 1e-12);
    }

    ConformalMap ext = fit_numeric_map(curve, ConformalMap::Side::exterior_reflected);
    ConformalMap ext_back = ConformalMap::from_cache_json(ext.cache_json(), curve);
    CHECK(std::abs(ext.eval(cplx(0.2, 0.3)) - ext_back.eval(cplx(0.2, 0.3))) < 1e-12);
    CHECK(ext_back.boundary_arclength(1.0) == Approx(ext.boundary_arclength(1.0)));

    ConformalMap cf = closed_form_interior_map(PolynomialFamily{0.3}, 128);
    ConformalMap cf_back = ConformalMap::from_cache_json(cf.cache_json(), curve);
    CHECK(std::abs(cf.eval(cplx(0.25, 0.5)) - cf_back.eval(cplx(0.25, 0.5))) == 0.0);
}

TEST_CASE("eval rejects points outside the disk") {
    ConformalMap map = closed_form_interior_map(CircleFamily{1.0}, 64);
    CHECK_THROWS_AS(map.eval(cplx(1.0, 0.5)), std::domain_error);
    CHECK_THROWS_AS(map.eval_derivative(cplx(1.0, 0.0)), std::domain_error);
}
