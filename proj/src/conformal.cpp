#include "lab/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace lab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
const cplx kI(0.0, 1.0);

cplx iota(cplx z) { return 1.0 / std::conj(z); }

// Square root with branch cut along [0, inf), image in the closed upper
// half-plane: sqrt_h(r e^{i t}) = sqrt(r) e^{i t/2} for t in (0, 2pi).
cplx sqrt_h(cplx u) { return kI * std::sqrt(-u); }

double wrap_angle(double t) {
    t = std::fmod(t, 2.0 * kPi);
    if (t < 0) t += 2.0 * kPi;
    return t;
}

} // namespace

// ---------------------------------------------------------------------------
// Zipper construction
// ---------------------------------------------------------------------------

namespace {

struct SlitParams {
    double x0; // infinity means the geodesic is already vertical
    double h;
};

// Forward slit map f(z) = sqrt_h(T(z)^2 + h^2), T(z) = z / (1 - z/x0):
// straightens the hyperbolic geodesic from 0 to a and opens the slit so
// that H minus the geodesic maps onto H with the tip landing at 0.
SlitParams make_slit(cplx a, int index) {
    if (!(a.imag() > 0.0) || !std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw std::runtime_error("conformal fit: ill-conditioned elementary map at sample " + std::to_string(index) +
                                 " (image " + std::to_string(a.real()) + " + " + std::to_string(a.imag()) + "i)");
    double x0;
    if (std::abs(a.real()) < 1e-14 * std::abs(a)) {
        x0 = kInf;
    } else {
        x0 = std::norm(a) / a.real();
    }
    cplx ta = std::isinf(x0) ? a : a / (1.0 - a / x0);
    double h = std::abs(ta);
    if (!(h > 0.0)) throw std::runtime_error("conformal fit: degenerate slit at sample " + std::to_string(index));
    return SlitParams{x0, h};
}

// Each slit map is followed by the dilation 1/h; without it the working
// configuration grows geometrically with the step count and overflows on
// long compositions.
cplx slit_forward(cplx z, const SlitParams& s, cplx* deriv) {
    cplx t, dt;
    if (std::isinf(s.x0)) {
        t = z;
        dt = 1.0;
    } else {
        cplx den = 1.0 - z / s.x0;
        t = z / den;
        dt = 1.0 / (den * den);
    }
    cplx w = sqrt_h(t * t + s.h * s.h);
    if (deriv) *deriv = dt * t / (w * s.h);
    return w / s.h;
}

// Boundary (real-axis) version of the forward slit map. Infinity is a
// legitimate boundary value and transforms like any other point of the
// circle R u {inf}.
double slit_forward_real(double x, const SlitParams& s) {
    double t;
    if (std::isinf(s.x0)) {
        t = x;
    } else if (std::isinf(x)) {
        t = -s.x0;
    } else {
        double den = 1.0 - x / s.x0;
        t = (den == 0.0) ? kInf : x / den;
    }
    if (std::isinf(t)) return t;
    return std::copysign(std::hypot(t, s.h) / s.h, t);
}

double mobius_to_inf_real(double x, double x_star) {
    if (std::isinf(x_star)) return x;
    if (std::isinf(x)) return -x_star;
    double den = 1.0 - x / x_star;
    return (den == 0.0) ? kInf : x / den;
}

} // namespace

ConformalMap fit_numeric_map(const CurveSample& curve, ConformalMap::Side side) {
    const int n = curve.size();
    ConformalMap map;
    map.engine_ = ConformalMap::Engine::zipper;
    map.side_ = side;
    map.shift_ = anchor_point(curve);
    map.curve_length_ = curve.length();
    map.source_curve_ = std::make_shared<CurveSample>(curve);

    // Working coordinates: interior maps translate the anchor to 0;
    // exterior maps additionally reflect through iota, which takes the
    // exterior domain to a bounded Jordan domain with 0 = iota(inf) inside.
    std::vector<cplx> pts(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        cplx w = curve.point(k) - map.shift_;
        pts[static_cast<std::size_t>(k)] = (side == ConformalMap::Side::interior) ? w : iota(w);
    }
    {
        double total = 0.0;
        for (int k = 0; k < n; ++k)
            total += std::arg(pts[static_cast<std::size_t>((k + 1) % n)] / pts[static_cast<std::size_t>(k)]);
        if (std::lround(total / (2.0 * kPi)) != 1)
            throw std::runtime_error("conformal fit: working curve does not wind once around the anchor");
    }

    map.zip_z0_ = pts[0];
    map.zip_z1_ = pts[1];

    // Initial map i sqrt((z - z1)/(z - z0)) opens the complement of the
    // first segment onto H; z0 -> inf, z1 -> 0.
    enum class St { complex_pt, real_single, real_pair };
    std::vector<St> state(static_cast<std::size_t>(n), St::complex_pt);
    std::vector<cplx> cz(static_cast<std::size_t>(n));
    std::vector<double> ra(static_cast<std::size_t>(n), 0.0), rb(static_cast<std::size_t>(n), 0.0);

    auto f0 = [&](cplx z, cplx* deriv) {
        cplx den = z - map.zip_z0_;
        cplx m = (z - map.zip_z1_) / den;
        cplx s = std::sqrt(m);
        if (deriv) {
            cplx dm = (map.zip_z1_ - map.zip_z0_) / (den * den);
            *deriv = kI * dm / (2.0 * s);
        }
        return kI * s;
    };

    state[0] = St::real_single;
    ra[0] = kInf;
    state[1] = St::real_single;
    ra[1] = 0.0;
    for (int k = 2; k < n; ++k) cz[static_cast<std::size_t>(k)] = f0(pts[static_cast<std::size_t>(k)], nullptr);

    cplx dg;
    cplx anchor_img = f0(cplx(0.0), &dg);

    map.steps_.reserve(static_cast<std::size_t>(n) - 2);
    for (int k = 2; k < n; ++k) {
        SlitParams sp = make_slit(cz[static_cast<std::size_t>(k)], k);
        for (int j = 0; j < n; ++j) {
            auto ju = static_cast<std::size_t>(j);
            switch (state[ju]) {
                case St::complex_pt:
                    if (j > k) cz[ju] = slit_forward(cz[ju], sp, nullptr);
                    break;
                case St::real_single:
                    if (j == k - 1) {
                        // The previous tip sits at the base of this slit and
                        // splits into its two prime ends (at +-h before the
                        // 1/h dilation).
                        state[ju] = St::real_pair;
                        ra[ju] = 1.0;
                        rb[ju] = -1.0;
                    } else {
                        ra[ju] = slit_forward_real(ra[ju], sp);
                    }
                    break;
                case St::real_pair:
                    ra[ju] = slit_forward_real(ra[ju], sp);
                    rb[ju] = slit_forward_real(rb[ju], sp);
                    break;
            }
        }
        cplx step_deriv;
        anchor_img = slit_forward(anchor_img, sp, &step_deriv);
        dg *= step_deriv;
        state[static_cast<std::size_t>(k)] = St::real_single;
        ra[static_cast<std::size_t>(k)] = 0.0;
        map.steps_.push_back(ConformalMap::SlitStep{sp.x0, sp.h});
    }

    // Close up: send the image of z0 to infinity so the final gap becomes
    // the geodesic from 0 to infinity (the positive imaginary axis).
    map.x_star_ = ra[0];
    {
        cplx den = 1.0 - anchor_img / map.x_star_;
        if (std::isinf(map.x_star_)) den = 1.0;
        cplx ma = std::isinf(map.x_star_) ? anchor_img : anchor_img / den;
        dg *= std::isinf(map.x_star_) ? cplx(1.0) : 1.0 / (den * den);
        map.interior_left_ = (ma.real() < 0.0);
        // Squaring opens the interior quadrant onto H.
        map.w0_ = map.interior_left_ ? -ma * ma : ma * ma;
        dg *= map.interior_left_ ? -2.0 * ma : 2.0 * ma;
        if (!(map.w0_.imag() > 0.0))
            throw std::runtime_error("conformal fit: anchor image left the half-plane");
        dg *= 1.0 / (map.w0_ - std::conj(map.w0_));
        map.beta_ = -std::arg(dg);
    }

    // Boundary correspondence: pick the prime end on the interior side of
    // the zipped-up curve for every sample.
    map.table_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        auto ku = static_cast<std::size_t>(k);
        double y_pre;
        if (k == 0) {
            y_pre = kInf;
        } else if (k == n - 1) {
            y_pre = 0.0;
        } else {
            double u = mobius_to_inf_real(ra[ku], map.x_star_);
            double v = mobius_to_inf_real(rb[ku], map.x_star_);
            bool u_in = std::isinf(u) ? false : (map.interior_left_ ? u < 0.0 : u > 0.0);
            bool v_in = std::isinf(v) ? false : (map.interior_left_ ? v < 0.0 : v > 0.0);
            if (u_in == v_in)
                throw std::runtime_error("conformal fit: prime-end selection failed at sample " + std::to_string(k));
            y_pre = u_in ? u : v;
        }
        double y = std::isinf(y_pre) ? kInf : (map.interior_left_ ? -y_pre * y_pre : y_pre * y_pre);
        cplx xi = std::isinf(y) ? cplx(1.0) : (y - map.w0_) / (y - std::conj(map.w0_));
        double theta = wrap_angle(std::arg(xi) + map.beta_);
        map.table_[ku] = ConformalMap::TableEntry{theta, k, curve.point(k), curve.arc(k)};
    }
    map.finalize_table();
    return map;
}

// ---------------------------------------------------------------------------
// Closed-form registry
// ---------------------------------------------------------------------------

namespace {

CurveSample canonical_curve(const CurveFamily& family, int n_samples) { return make_named_curve(family, n_samples); }

} // namespace

ConformalMap closed_form_interior_map(const CurveFamily& family, int n_samples) {
    ConformalMap map;
    map.engine_ = ConformalMap::Engine::closed_form;
    map.side_ = ConformalMap::Side::interior;
    map.shift_ = 0.0;
    if (const auto* fc = std::get_if<CircleFamily>(&family)) {
        map.form_ = ConformalMap::Form::circle;
        map.radius_ = fc->radius;
    } else if (const auto* fp = std::get_if<PolynomialFamily>(&family)) {
        if (std::abs(fp->c) >= 0.5) throw std::invalid_argument("closed-form map requires |c| < 1/2");
        map.form_ = ConformalMap::Form::polynomial;
        map.poly_c_ = fp->c;
    } else {
        throw std::invalid_argument("no closed-form interior map for this family");
    }
    CurveSample curve = canonical_curve(family, n_samples);
    map.curve_length_ = curve.length();
    const int n = curve.size();
    map.table_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        map.table_[static_cast<std::size_t>(k)] =
            ConformalMap::TableEntry{2.0 * kPi * k / n, k, curve.point(k), curve.arc(k)};
    map.source_curve_ = std::make_shared<CurveSample>(std::move(curve));
    map.finalize_table();
    return map;
}

ConformalMap closed_form_exterior_map(const CurveFamily& family, int n_samples) {
    const auto* fc = std::get_if<CircleFamily>(&family);
    if (!fc) throw std::invalid_argument("closed-form exterior map exists only for the circle family");
    ConformalMap map;
    map.engine_ = ConformalMap::Engine::closed_form;
    map.side_ = ConformalMap::Side::exterior_reflected;
    map.shift_ = 0.0;
    map.form_ = ConformalMap::Form::circle;
    map.radius_ = fc->radius;
    CurveSample curve = canonical_curve(family, n_samples);
    map.curve_length_ = curve.length();
    const int n = curve.size();
    map.table_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        map.table_[static_cast<std::size_t>(k)] =
            ConformalMap::TableEntry{2.0 * kPi * k / n, k, curve.point(k), curve.arc(k)};
    map.source_curve_ = std::make_shared<CurveSample>(std::move(curve));
    map.finalize_table();
    return map;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

cplx ConformalMap::eval_working(cplx z, cplx* deriv) const {
    // Inverse of the zipper chain: rotation, Mobius from the disk to H,
    // root of the closing square, reopening every slit, then the inverse
    // of the initial two-point map.
    cplx d = 1.0;
    cplx xi = std::polar(1.0, -beta_) * z;
    if (deriv) d *= std::polar(1.0, -beta_);

    cplx den = 1.0 - xi;
    cplx w = (w0_ - xi * std::conj(w0_)) / den;
    if (deriv) d *= (w0_ - std::conj(w0_)) / (den * den);

    cplx q = interior_left_ ? sqrt_h(-w) : std::sqrt(w);
    if (deriv) d *= (interior_left_ ? -1.0 : 1.0) / (2.0 * q);

    cplx u = q;
    if (!std::isinf(x_star_)) {
        cplx mden = 1.0 + q / x_star_;
        u = q / mden;
        if (deriv) d *= 1.0 / (mden * mden);
    }

    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
        cplx v = u * it->h; // undo the per-step dilation
        cplx s = sqrt_h(v * v - it->h * it->h);
        if (deriv) d *= it->h * v / s;
        if (std::isinf(it->x0)) {
            u = s;
        } else {
            cplx tden = 1.0 + s / it->x0;
            u = s / tden;
            if (deriv) d *= 1.0 / (tden * tden);
        }
    }

    cplx v = -u * u;
    if (deriv) d *= -2.0 * u;
    cplx vden = 1.0 - v;
    cplx out = (zip_z1_ - zip_z0_ * v) / vden;
    if (deriv) {
        d *= (zip_z1_ - zip_z0_) / (vden * vden);
        *deriv = d;
    }
    return out;
}

cplx ConformalMap::eval(cplx z) const {
    if (std::abs(z) >= 1.0) throw std::domain_error("conformal map evaluation requires |z| < 1");
    switch (form_) {
        case Form::circle:
            return side_ == Side::interior ? shift_ + radius_ * z : z / radius_;
        case Form::polynomial:
            return shift_ + z + poly_c_ * z * z;
        case Form::none:
            break;
    }
    cplx w = eval_working(z, nullptr);
    return side_ == Side::interior ? shift_ + w : w;
}

cplx ConformalMap::eval_derivative(cplx z) const {
    if (std::abs(z) > 1.0 - 1e-9) throw std::domain_error("derivative evaluation requires |z| <= 1 - 1e-9");
    switch (form_) {
        case Form::circle:
            return side_ == Side::interior ? cplx(radius_) : cplx(1.0 / radius_);
        case Form::polynomial:
            return 1.0 + 2.0 * poly_c_ * z;
        case Form::none:
            break;
    }
    cplx d;
    eval_working(z, &d);
    return d;
}

double ConformalMap::hyperbolic_density(cplx z) const {
    double r2 = std::norm(z);
    if (r2 >= 1.0) throw std::domain_error("hyperbolic density requires |z| < 1");
    return 1.0 / ((1.0 - r2) * std::abs(eval_derivative(z)));
}

void ConformalMap::finalize_table() {
    const int n = static_cast<int>(table_.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return table_[static_cast<std::size_t>(a)].theta < table_[static_cast<std::size_t>(b)].theta;
    });

    // The samples must appear in curve order around the circle.
    int pos0 = 0;
    for (int i = 0; i < n; ++i)
        if (table_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])].sample_index == 0) pos0 = i;
    for (int i = 0; i < n; ++i) {
        int expect = i;
        int got = table_[static_cast<std::size_t>(order[static_cast<std::size_t>((pos0 + i) % n)])].sample_index;
        if (got != expect)
            throw std::runtime_error("boundary correspondence is not monotone (sample " + std::to_string(got) + ")");
    }

    sorted_theta_.resize(static_cast<std::size_t>(n));
    sorted_arc_.resize(static_cast<std::size_t>(n));
    const double L = curve_length_;
    double prev_theta = -1.0;
    for (int i = 0; i < n; ++i) {
        const auto& e = table_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        if (e.theta <= prev_theta)
            throw std::runtime_error("boundary correspondence has duplicate angles");
        prev_theta = e.theta;
        sorted_theta_[static_cast<std::size_t>(i)] = e.theta;
        double arc = e.arclength;
        if (i > 0) {
            // Unwrap the arclength so it grows monotonically with theta.
            double base = sorted_arc_[static_cast<std::size_t>(i - 1)];
            while (arc < base) arc += L;
        }
        sorted_arc_[static_cast<std::size_t>(i)] = arc;
    }
    if (sorted_arc_.back() - sorted_arc_.front() > L + 1e-9 * L)
        throw std::runtime_error("boundary correspondence wraps the curve more than once");
}

double ConformalMap::boundary_arclength(double theta) const {
    theta = wrap_angle(theta);
    const int n = static_cast<int>(sorted_theta_.size());
    const double L = curve_length_;
    // Locate theta in the cyclic table.
    int hi = static_cast<int>(std::lower_bound(sorted_theta_.begin(), sorted_theta_.end(), theta) - sorted_theta_.begin());
    double t0, t1, s0, s1;
    if (hi == 0 || hi == n) {
        t0 = sorted_theta_.back();
        t1 = sorted_theta_.front() + 2.0 * kPi;
        s0 = sorted_arc_.back();
        s1 = sorted_arc_.front() + L;
        if (hi == 0) theta += 2.0 * kPi;
    } else {
        t0 = sorted_theta_[static_cast<std::size_t>(hi - 1)];
        t1 = sorted_theta_[static_cast<std::size_t>(hi)];
        s0 = sorted_arc_[static_cast<std::size_t>(hi - 1)];
        s1 = sorted_arc_[static_cast<std::size_t>(hi)];
    }
    double t = (theta - t0) / (t1 - t0);
    double s = s0 + t * (s1 - s0);
    s = std::fmod(s, L);
    if (s < 0) s += L;
    return s;
}

cplx ConformalMap::boundary_point_on_curve(double theta) const {
    switch (form_) {
        case Form::circle:
            // Interior and reflected exterior tables both traverse the
            // circle itself (iota fixes it pointwise).
            return shift_ + radius_ * std::polar(1.0, theta);
        case Form::polynomial: {
            cplx z = std::polar(1.0, theta);
            return shift_ + z + poly_c_ * z * z;
        }
        case Form::none:
            break;
    }
    return source_curve_->at_arclength(boundary_arclength(theta));
}

// ---------------------------------------------------------------------------
// Welding and quasisymmetry
// ---------------------------------------------------------------------------

Welding compute_welding(const ConformalMap& interior_map, const ConformalMap& exterior_map) {
    if (interior_map.side() != ConformalMap::Side::interior ||
        exterior_map.side() != ConformalMap::Side::exterior_reflected)
        throw std::invalid_argument("compute_welding needs an interior and an exterior_reflected map");
    const auto& ti = interior_map.boundary_table();
    const auto& te = exterior_map.boundary_table();
    if (ti.size() != te.size())
        throw std::invalid_argument("welding: boundary tables have different sizes");
    if (std::abs(interior_map.shift() - exterior_map.shift()) > 1e-9)
        throw std::invalid_argument("welding: maps were fitted with different anchors");
    const int n = static_cast<int>(ti.size());
    double scale = 0.0;
    for (int k = 0; k < n; ++k) scale = std::max(scale, std::abs(ti[static_cast<std::size_t>(k)].curve_point));
    for (int k = 0; k < n; ++k) {
        if (ti[static_cast<std::size_t>(k)].sample_index != te[static_cast<std::size_t>(k)].sample_index ||
            std::abs(ti[static_cast<std::size_t>(k)].curve_point - te[static_cast<std::size_t>(k)].curve_point) >
                1e-6 * std::max(scale, 1.0))
            throw std::invalid_argument("welding: boundary tables disagree on the curve samples");
    }

    // h = phi^{-1} o psi: the exterior angle of each curve sample maps to
    // its interior angle.
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return te[static_cast<std::size_t>(a)].theta < te[static_cast<std::size_t>(b)].theta;
    });

    Welding h;
    h.theta.resize(static_cast<std::size_t>(n));
    h.lift.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& ei = ti[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        const auto& ee = te[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        h.theta[static_cast<std::size_t>(i)] = ee.theta;
        if (i == 0) {
            h.lift[0] = ei.theta;
        } else {
            double prev = h.lift[static_cast<std::size_t>(i - 1)];
            double step = wrap_angle(ei.theta - std::fmod(prev, 2.0 * kPi));
            if (step == 0.0) throw std::invalid_argument("welding table degenerate: repeated values");
            h.lift[static_cast<std::size_t>(i)] = prev + step;
        }
    }
    double closing = wrap_angle(h.lift[0] + 2.0 * kPi - std::fmod(h.lift[static_cast<std::size_t>(n - 1)], 2.0 * kPi));
    double total = h.lift[static_cast<std::size_t>(n - 1)] - h.lift[0] + closing;
    if (std::abs(total - 2.0 * kPi) > 1e-9)
        throw std::invalid_argument("welding is not a degree-1 circle homeomorphism (orientation mismatch?)");
    return h;
}

double Welding::lift_at(double t) const {
    const int n = static_cast<int>(theta.size());
    const double two_pi = 2.0 * kPi;
    double base = theta[0];
    double shift = std::floor((t - base) / two_pi);
    double tw = t - shift * two_pi; // in [theta0, theta0 + 2pi)
    int hi = static_cast<int>(std::lower_bound(theta.begin(), theta.end(), tw) - theta.begin());
    double t0, t1, l0, l1;
    if (hi == 0 || hi == n) {
        t0 = theta[static_cast<std::size_t>(n - 1)];
        t1 = theta[0] + two_pi;
        l0 = lift[static_cast<std::size_t>(n - 1)];
        l1 = lift[0] + two_pi;
        if (hi == 0) tw += two_pi;
    } else {
        t0 = theta[static_cast<std::size_t>(hi - 1)];
        t1 = theta[static_cast<std::size_t>(hi)];
        l0 = lift[static_cast<std::size_t>(hi - 1)];
        l1 = lift[static_cast<std::size_t>(hi)];
    }
    double v = l0 + (l1 - l0) * (tw - t0) / (t1 - t0);
    return v + shift * two_pi;
}

std::vector<double> dyadic_alpha_grid(int m) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) grid.push_back(kPi / std::pow(2.0, k));
    return grid;
}

double quasisymmetry_constant(const Welding& h, const std::vector<double>& alpha_grid) {
    if (h.theta.size() < 2) throw std::invalid_argument("quasisymmetry: welding table too small");
    for (double a : alpha_grid)
        if (!(a > 0.0) || a > kPi / 2.0 + 1e-15)
            throw std::invalid_argument("quasisymmetry: alpha grid must lie in (0, pi/2]");
    // The theta grid rides on the welding's own sample angles: a rotated
    // welding then produces the identical grid supremum, which keeps the
    // constant exactly invariant under pre/post rotations. For tables
    // built from uniform-angle boundary correspondences this grid is
    // itself uniform.
    double best = 1.0;
    for (double t : h.theta) {
        double ht = h.lift_at(t);
        for (double a : alpha_grid) {
            double fwd = 2.0 * std::abs(std::sin(0.5 * (h.lift_at(t + a) - ht)));
            double bwd = 2.0 * std::abs(std::sin(0.5 * (ht - h.lift_at(t - a))));
            if (fwd <= 0.0 || bwd <= 0.0)
                throw std::invalid_argument("quasisymmetry: degenerate welding increment");
            double rho = fwd / bwd;
            best = std::max(best, std::max(rho, 1.0 / rho));
        }
    }
    return best;
}

cplx anchor_point(const CurveSample& curve) {
    cplx c = curve.centroid();
    double diam = curve_diameter(curve);
    auto usable = [&](cplx w) {
        if (distance_to_curve(curve, w) < 1e-6 * diam) return false;
        return winding_number(curve, w) != 0;
    };
    if (usable(c)) return c;
    // Probe inward offsets from the samples (interior lies left of travel).
    const int n = curve.size();
    for (double frac : {0.2, 0.1, 0.05, 0.02}) {
        for (int k = 0; k < n; k += std::max(1, n / 64)) {
            cplx tangent = curve.point(k + 1) - curve.point(k);
            tangent /= std::abs(tangent);
            cplx w = curve.point(k) + kI * tangent * (frac * diam);
            if (usable(w)) return w;
        }
    }
    throw std::runtime_error("could not locate an interior anchor point");
}

// ---------------------------------------------------------------------------
// Cache serialization
// ---------------------------------------------------------------------------

std::string ConformalMap::cache_json() const {
    nlohmann::json j;
    j["engine"] = engine_ == Engine::zipper ? "zipper" : "closed_form";
    j["side"] = side_ == Side::interior ? "interior" : "exterior_reflected";
    j["shift"] = {shift_.real(), shift_.imag()};
    if (engine_ == Engine::closed_form) {
        j["form"] = form_ == Form::circle ? "circle" : "polynomial";
        j["radius"] = radius_;
        j["poly_c"] = poly_c_;
        j["n_samples"] = table_.size();
        return j.dump(2);
    }
    j["z0"] = {zip_z0_.real(), zip_z0_.imag()};
    j["z1"] = {zip_z1_.real(), zip_z1_.imag()};
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : steps_) {
        steps.push_back({{"x0", std::isinf(s.x0) ? nlohmann::json() : nlohmann::json(s.x0)}, {"h", s.h}});
    }
    j["steps"] = std::move(steps);
    j["x_star"] = std::isinf(x_star_) ? nlohmann::json() : nlohmann::json(x_star_);
    j["interior_left"] = interior_left_;
    j["w0"] = {w0_.real(), w0_.imag()};
    j["beta"] = beta_;
    nlohmann::json table = nlohmann::json::array();
    for (const auto& e : table_) table.push_back({{"theta", e.theta}, {"k", e.sample_index}});
    j["table"] = std::move(table);
    return j.dump(2);
}

ConformalMap ConformalMap::from_cache_json(const std::string& text, const CurveSample& curve) {
    nlohmann::json j = nlohmann::json::parse(text);
    const std::string engine = j.at("engine").get<std::string>();
    const std::string side_s = j.at("side").get<std::string>();
    auto side = side_s == "interior" ? Side::interior : Side::exterior_reflected;
    if (engine == "closed_form") {
        const std::string form = j.at("form").get<std::string>();
        int n = j.at("n_samples").get<int>();
        if (form == "circle") {
            CircleFamily f{j.at("radius").get<double>()};
            return side == Side::interior ? closed_form_interior_map(f, n) : closed_form_exterior_map(f, n);
        }
        PolynomialFamily f{j.at("poly_c").get<double>()};
        return closed_form_interior_map(f, n);
    }
    ConformalMap map;
    map.engine_ = Engine::zipper;
    map.side_ = side;
    map.shift_ = cplx(j.at("shift")[0].get<double>(), j.at("shift")[1].get<double>());
    map.zip_z0_ = cplx(j.at("z0")[0].get<double>(), j.at("z0")[1].get<double>());
    map.zip_z1_ = cplx(j.at("z1")[0].get<double>(), j.at("z1")[1].get<double>());
    for (const auto& s : j.at("steps"))
        map.steps_.push_back(SlitStep{s.at("x0").is_null() ? kInf : s.at("x0").get<double>(), s.at("h").get<double>()});
    map.x_star_ = j.at("x_star").is_null() ? kInf : j.at("x_star").get<double>();
    map.interior_left_ = j.at("interior_left").get<bool>();
    map.w0_ = cplx(j.at("w0")[0].get<double>(), j.at("w0")[1].get<double>());
    map.beta_ = j.at("beta").get<double>();
    map.curve_length_ = curve.length();
    map.source_curve_ = std::make_shared<CurveSample>(curve);
    for (const auto& e : j.at("table")) {
        int k = e.at("k").get<int>();
        map.table_.push_back(TableEntry{e.at("theta").get<double>(), k, curve.point(k), curve.arc(k)});
    }
    map.finalize_table();
    return map;
}

} // namespace lab
