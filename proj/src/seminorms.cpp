#include "lab/seminorms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "lab/parallel.hpp"

namespace lab {

namespace {
constexpr double kPi = std::numbers::pi;
}

BoundaryFunction BoundaryFunction::pole(cplx w) {
    BoundaryFunction f;
    f.kind_ = Kind::pole;
    f.w_ = w;
    return f;
}

BoundaryFunction BoundaryFunction::constant(double value) {
    BoundaryFunction f;
    f.kind_ = Kind::trig;
    f.a0_ = value;
    return f;
}

BoundaryFunction BoundaryFunction::cosine(int n) {
    if (n < 1) throw std::invalid_argument("cosine mode must be >= 1");
    BoundaryFunction f;
    f.kind_ = Kind::trig;
    f.ca_.assign(static_cast<std::size_t>(n), 0.0);
    f.ca_.back() = 1.0;
    return f;
}

BoundaryFunction BoundaryFunction::sine(int n) {
    if (n < 1) throw std::invalid_argument("sine mode must be >= 1");
    BoundaryFunction f;
    f.kind_ = Kind::trig;
    f.sa_.assign(static_cast<std::size_t>(n), 0.0);
    f.sa_.back() = 1.0;
    return f;
}

BoundaryFunction BoundaryFunction::real_trig(double a0, std::vector<double> cos_coeffs,
                                             std::vector<double> sin_coeffs) {
    BoundaryFunction f;
    f.kind_ = Kind::trig;
    f.a0_ = a0;
    f.ca_ = std::move(cos_coeffs);
    f.sa_ = std::move(sin_coeffs);
    return f;
}

BoundaryFunction BoundaryFunction::tabulated(std::vector<cplx> values) {
    BoundaryFunction f;
    f.kind_ = Kind::tabulated;
    f.values_ = std::move(values);
    return f;
}

cplx BoundaryFunction::eval(const CurveSample& curve, cplx point, double arclength) const {
    switch (kind_) {
        case Kind::pole:
            return 1.0 / (point - w_);
        case Kind::trig: {
            double t = 2.0 * kPi * arclength / curve.length();
            double v = a0_;
            for (std::size_t n = 0; n < ca_.size(); ++n) v += ca_[n] * std::cos((static_cast<double>(n) + 1.0) * t);
            for (std::size_t n = 0; n < sa_.size(); ++n) v += sa_[n] * std::sin((static_cast<double>(n) + 1.0) * t);
            return v;
        }
        case Kind::tabulated: {
            const int n = static_cast<int>(values_.size());
            if (n != curve.size())
                throw std::invalid_argument("tabulated trace length does not match the curve resolution");
            double L = curve.length();
            double s = std::fmod(arclength, L);
            if (s < 0) s += L;
            const auto& cum = curve.cum_len();
            int k = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin()) - 1;
            k = std::clamp(k, 0, n - 1);
            double t = (s - cum[static_cast<std::size_t>(k)]) / curve.segment_length(k);
            return values_[static_cast<std::size_t>(k)] +
                   t * (values_[static_cast<std::size_t>((k + 1) % n)] - values_[static_cast<std::size_t>(k)]);
        }
    }
    return 0.0;
}

cplx BoundaryFunction::eval_at_sample(const CurveSample& curve, int k) const {
    if (kind_ == Kind::tabulated) {
        if (static_cast<int>(values_.size()) != curve.size())
            throw std::invalid_argument("tabulated trace length does not match the curve resolution");
        int n = curve.size();
        k %= n;
        if (k < 0) k += n;
        return values_[static_cast<std::size_t>(k)];
    }
    return eval(curve, curve.point(k), curve.arc(k));
}

BoundaryFunction BoundaryFunction::scaled(double factor) const {
    BoundaryFunction f = *this;
    if (kind_ == Kind::pole)
        throw std::invalid_argument("cannot scale a pole trace in place; scale the computed seminorm instead");
    f.a0_ *= factor;
    for (auto& c : f.ca_) c *= factor;
    for (auto& c : f.sa_) c *= factor;
    for (auto& v : f.values_) v *= factor;
    return f;
}

std::string BoundaryFunction::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::pole:
            os << "pole(" << w_.real() << (w_.imag() < 0 ? "" : "+") << w_.imag() << "i)";
            break;
        case Kind::trig: {
            os << "trig(a0=" << a0_;
            for (std::size_t n = 0; n < ca_.size(); ++n)
                if (ca_[n] != 0.0) os << ",cos" << n + 1 << "=" << ca_[n];
            for (std::size_t n = 0; n < sa_.size(); ++n)
                if (sa_[n] != 0.0) os << ",sin" << n + 1 << "=" << sa_[n];
            os << ")";
            break;
        }
        case Kind::tabulated:
            os << "tabulated[" << values_.size() << "]";
            break;
    }
    return os.str();
}

double pole_resolution_floor(const CurveSample& curve) { return 3.0 * curve.max_segment_length(); }

namespace {

void require_pole_resolved(const CurveSample& curve, const BoundaryFunction& u) {
    if (!u.is_pole()) return;
    double d = distance_to_curve(curve, u.pole_location());
    if (d < pole_resolution_floor(curve))
        throw std::domain_error("pole at distance " + std::to_string(d) +
                                " is below the quadrature resolution floor " +
                                std::to_string(pole_resolution_floor(curve)));
}

} // namespace

double besov_seminorm(const CurveSample& curve, const BoundaryFunction& u, double p) {
    if (p < 2.0) throw std::invalid_argument("Besov seminorm requires p >= 2");
    require_pole_resolved(curve, u);
    const int n = curve.size();
    std::vector<cplx> uv(static_cast<std::size_t>(n));
    std::vector<double> wts(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        uv[static_cast<std::size_t>(k)] = u.eval_at_sample(curve, k);
        wts[static_cast<std::size_t>(k)] = curve.trapezoid_weight(k);
    }
    const auto& pts = curve.points();

    double sum = chunked_sum(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
                if (k == j) continue;
                double chord2 = std::norm(pts[j] - pts[k]);
                double diff = std::abs(uv[j] - uv[k]);
                acc += std::pow(diff, p) / chord2 * wts[j] * wts[k];
            }
        }
        return acc;
    });

    if (p == 2.0) {
        // Diagonal limit |du/ds|^2 (chord and arc agree to first order).
        for (int j = 0; j < n; ++j) {
            double ds = curve.segment_length(j - 1) + curve.segment_length(j);
            cplx du = (uv[static_cast<std::size_t>((j + 1) % n)] - uv[static_cast<std::size_t>((j + n - 1) % n)]) / ds;
            double w = curve.trapezoid_weight(j);
            sum += std::norm(du) * w * w;
        }
    }
    return std::pow(sum / (4.0 * kPi * kPi), 1.0 / p);
}

namespace {

void require_map_matches(const CurveSample& curve, const ConformalMap& map) {
    if (std::abs(map.curve_length() - curve.length()) > 1e-9 * curve.length())
        throw std::invalid_argument("map was not fitted to this curve (length mismatch)");
    const auto& table = map.boundary_table();
    if (static_cast<int>(table.size()) != curve.size())
        throw std::invalid_argument("map was not fitted to this curve (sample count mismatch)");
    double diam = curve_diameter(curve);
    for (int k : {0, curve.size() / 3, 2 * curve.size() / 3}) {
        const auto& e = table[static_cast<std::size_t>(k)];
        if (std::abs(curve.point(e.sample_index) - e.curve_point) > 1e-6 * diam)
            throw std::invalid_argument("map was not fitted to this curve (sample point mismatch)");
    }
}

double pullback_disk_energy(const CurveSample& curve, const ConformalMap& map, const BoundaryFunction& u,
                            double p, const SeminormQuad& quad) {
    if (p < 2.0) throw std::invalid_argument("p-Dirichlet seminorm requires p >= 2");
    require_pole_resolved(curve, u);
    require_map_matches(curve, map);
    const int m = std::max(quad.analysis_samples, 2 * quad.n_trunc + 1);
    std::vector<cplx> g(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        double theta = 2.0 * kPi * j / m;
        cplx z = map.boundary_point_on_curve(theta);
        double s = map.boundary_arclength(theta);
        g[static_cast<std::size_t>(j)] = u.eval(curve, z, s);
    }
    DiskHarmonic ext = analyze_boundary(g, quad.n_trunc);
    return disk_dirichlet_energy(ext, p, quad.disk);
}

} // namespace

double interior_seminorm(const CurveSample& curve, const ConformalMap& map, const BoundaryFunction& u,
                         double p, const SeminormQuad& quad) {
    if (map.side() != ConformalMap::Side::interior)
        throw std::invalid_argument("interior_seminorm needs an interior map");
    return std::pow(pullback_disk_energy(curve, map, u, p, quad), 1.0 / p);
}

double exterior_seminorm(const CurveSample& curve, const ConformalMap& map, const BoundaryFunction& u,
                         double p, const SeminormQuad& quad) {
    if (map.side() != ConformalMap::Side::exterior_reflected)
        throw std::invalid_argument("exterior_seminorm needs an exterior_reflected map");
    return std::pow(pullback_disk_energy(curve, map, u, p, quad), 1.0 / p);
}

SeminormReport seminorm_triple(const CurveSample& curve, const ConformalMap& interior_map,
                               const ConformalMap& exterior_map, const BoundaryFunction& u, double p,
                               const SeminormQuad& quad) {
    SeminormReport r;
    r.p = p;
    r.besov = besov_seminorm(curve, u, p);
    r.interior = interior_seminorm(curve, interior_map, u, p, quad);
    r.exterior = exterior_seminorm(curve, exterior_map, u, p, quad);
    r.n_samples = curve.size();
    r.n_trunc = quad.n_trunc;
    r.radial_order = quad.disk.radial_order;
    r.interior_engine = interior_map.engine() == ConformalMap::Engine::zipper ? "zipper" : "closed_form";
    r.exterior_engine = exterior_map.engine() == ConformalMap::Engine::zipper ? "zipper" : "closed_form";
    // Suppress ratios when the denominator is roundoff noise (constant
    // traces analyze to coefficients of order 1e-17).
    if (r.interior > 1e-12 * (1.0 + r.besov)) {
        r.besov_over_interior = r.besov / r.interior;
        r.exterior_over_interior = *r.exterior / r.interior;
    }
    return r;
}

double circle_pullback_besov(const CurveSample& curve, const BoundaryFunction& u, double p) {
    if (p < 2.0) throw std::invalid_argument("Besov seminorm requires p >= 2");
    if (std::abs(curve.length() - 2.0 * kPi) > 1e-9 * 2.0 * kPi)
        throw std::invalid_argument("circle pullback requires the curve rescaled to length 2 pi");
    require_pole_resolved(curve, u);
    const int n = curve.size();
    std::vector<cplx> uv(static_cast<std::size_t>(n));
    std::vector<double> wts(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        uv[static_cast<std::size_t>(k)] = u.eval_at_sample(curve, k);
        wts[static_cast<std::size_t>(k)] = curve.trapezoid_weight(k);
    }
    const auto& cum = curve.cum_len();

    double sum = chunked_sum(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
                if (k == j) continue;
                double chord = 2.0 * std::abs(std::sin(0.5 * (cum[j] - cum[k])));
                double diff = std::abs(uv[j] - uv[k]);
                acc += std::pow(diff, p) / (chord * chord) * wts[j] * wts[k];
            }
        }
        return acc;
    });

    if (p == 2.0) {
        for (int j = 0; j < n; ++j) {
            double ds = curve.segment_length(j - 1) + curve.segment_length(j);
            cplx du = (uv[static_cast<std::size_t>((j + 1) % n)] - uv[static_cast<std::size_t>((j + n - 1) % n)]) / ds;
            double w = curve.trapezoid_weight(j);
            sum += std::norm(du) * w * w;
        }
    }
    return std::pow(sum / (4.0 * kPi * kPi), 1.0 / p);
}

double image_curve_length(const CurveSample& curve, cplx w) {
    const int n = curve.size();
    double len = 0.0;
    for (int k = 0; k < n; ++k)
        len += std::abs(1.0 / (curve.point(k + 1) - w) - 1.0 / (curve.point(k) - w));
    return len;
}

double image_pair_integral(const CurveSample& curve, cplx w, double p) {
    if (p < 2.0) throw std::invalid_argument("pair integral requires p >= 2");
    const int n = curve.size();
    std::vector<cplx> eta(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) eta[static_cast<std::size_t>(k)] = 1.0 / (curve.point(k) - w);
    std::vector<double> wts(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        double prev = std::abs(eta[static_cast<std::size_t>(k)] - eta[static_cast<std::size_t>((k + n - 1) % n)]);
        double next = std::abs(eta[static_cast<std::size_t>((k + 1) % n)] - eta[static_cast<std::size_t>(k)]);
        wts[static_cast<std::size_t>(k)] = 0.5 * (prev + next);
    }
    return chunked_sum(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
                double kernel = (p == 2.0) ? 1.0 : std::pow(std::abs(eta[j] - eta[k]), p - 2.0);
                acc += kernel * wts[j] * wts[k];
            }
        }
        return acc;
    });
}

} // namespace lab
