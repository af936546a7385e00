#include "lab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "lab/parallel.hpp"

namespace lab {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Proper segment intersection test, excluding shared endpoints.
bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
    auto orient = [](cplx p, cplx q, cplx r) { return cross(q - p, r - p); };
    double d1 = orient(c, d, a);
    double d2 = orient(c, d, b);
    double d3 = orient(a, b, c);
    double d4 = orient(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](cplx p, cplx q, cplx r) {
        return std::min(p.real(), q.real()) <= r.real() && r.real() <= std::max(p.real(), q.real()) &&
               std::min(p.imag(), q.imag()) <= r.imag() && r.imag() <= std::max(p.imag(), q.imag());
    };
    if (d1 == 0 && on_segment(c, d, a)) return true;
    if (d2 == 0 && on_segment(c, d, b)) return true;
    if (d3 == 0 && on_segment(a, b, c)) return true;
    if (d4 == 0 && on_segment(a, b, d)) return true;
    return false;
}

// Simplicity at sample resolution via a uniform spatial hash of segment
// bounding boxes; only candidate pairs sharing a cell get the exact test.
void require_simple(const std::vector<cplx>& pts, const std::string& tag) {
    const int n = static_cast<int>(pts.size());
    double min_x = pts[0].real(), max_x = min_x, min_y = pts[0].imag(), max_y = min_y;
    double max_seg = 0.0;
    for (int k = 0; k < n; ++k) {
        min_x = std::min(min_x, pts[k].real());
        max_x = std::max(max_x, pts[k].real());
        min_y = std::min(min_y, pts[k].imag());
        max_y = std::max(max_y, pts[k].imag());
        max_seg = std::max(max_seg, std::abs(pts[(k + 1) % n] - pts[k]));
    }
    double cell = std::max(max_seg, 1e-12 * std::max(max_x - min_x, max_y - min_y));
    if (cell <= 0) throw std::invalid_argument("degenerate curve: all points coincide");

    std::unordered_map<long long, std::vector<int>> grid;
    grid.reserve(static_cast<std::size_t>(n) * 2);
    for (int k = 0; k < n; ++k) {
        cplx a = pts[k], b = pts[(k + 1) % n];
        long long x0 = static_cast<long long>(std::floor((std::min(a.real(), b.real()) - min_x) / cell));
        long long x1 = static_cast<long long>(std::floor((std::max(a.real(), b.real()) - min_x) / cell));
        long long y0 = static_cast<long long>(std::floor((std::min(a.imag(), b.imag()) - min_y) / cell));
        long long y1 = static_cast<long long>(std::floor((std::max(a.imag(), b.imag()) - min_y) / cell));
        for (long long cx = x0; cx <= x1; ++cx)
            for (long long cy = y0; cy <= y1; ++cy)
                grid[(cx << 32) ^ (cy & 0xffffffffLL)].push_back(k);
    }

    for (auto& [key, segs] : grid) {
        for (std::size_t i = 0; i < segs.size(); ++i) {
            for (std::size_t j = i + 1; j < segs.size(); ++j) {
                int p = segs[i], q = segs[j];
                int lo = std::min(p, q), hi = std::max(p, q);
                if (hi - lo <= 1 || (lo == 0 && hi == n - 1)) continue; // adjacent
                if (segments_intersect(pts[p], pts[(p + 1) % n], pts[q], pts[(q + 1) % n]))
                    throw std::invalid_argument("curve '" + tag + "' self-intersects at sample resolution (segments " +
                                                std::to_string(p) + ", " + std::to_string(q) + ")");
            }
        }
    }
}

std::vector<cplx> koch_vertices(int level, double side) {
    // Equilateral triangle, counterclockwise, centered at its centroid.
    double h = side * std::sqrt(3.0) / 2.0;
    std::vector<cplx> v = {cplx(-side / 2.0, -h / 3.0), cplx(side / 2.0, -h / 3.0), cplx(0.0, 2.0 * h / 3.0)};
    for (int l = 0; l < level; ++l) {
        std::vector<cplx> next;
        next.reserve(v.size() * 4);
        const int m = static_cast<int>(v.size());
        for (int k = 0; k < m; ++k) {
            cplx a = v[k], b = v[(k + 1) % m];
            cplx d = (b - a) / 3.0;
            // Outward bump: interior lies left of travel for a CCW polygon,
            // so the new peak goes to the right of the segment direction.
            cplx peak = a + 1.5 * d - cplx(0.0, 1.0) * d * (std::sqrt(3.0) / 2.0);
            next.push_back(a);
            next.push_back(a + d);
            next.push_back(peak);
            next.push_back(a + 2.0 * d);
        }
        v = std::move(next);
    }
    return v;
}

// Uniform arc-length resampling of a closed polyline onto n points while
// keeping every original vertex a sample point is impossible in general; we
// instead subdivide each edge into an even number of equal pieces so that
// vertices (and edge midpoints) stay on the grid.
std::vector<cplx> subdivide_polygon(const std::vector<cplx>& verts, int n_samples) {
    const int m = static_cast<int>(verts.size());
    double perimeter = 0.0;
    for (int k = 0; k < m; ++k) perimeter += std::abs(verts[(k + 1) % m] - verts[k]);
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n_samples) + 2 * static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        cplx a = verts[k], b = verts[(k + 1) % m];
        double len = std::abs(b - a);
        int pieces = std::max(2, static_cast<int>(std::lround(n_samples * len / perimeter)));
        if (pieces % 2) ++pieces;
        for (int j = 0; j < pieces; ++j)
            out.push_back(a + (b - a) * (static_cast<double>(j) / pieces));
    }
    return out;
}

} // namespace

double signed_area(const std::vector<cplx>& points) {
    double a = 0.0;
    const int n = static_cast<int>(points.size());
    for (int k = 0; k < n; ++k) a += cross(points[k], points[(k + 1) % n]);
    return 0.5 * a;
}

CurveSample::CurveSample(std::vector<cplx> points, std::string family_tag)
    : pts_(std::move(points)), tag_(std::move(family_tag)) {
    const int n = static_cast<int>(pts_.size());
    if (n < 16) throw std::invalid_argument("curve needs at least 16 samples, got " + std::to_string(n));
    if (signed_area(pts_) < 0.0) std::reverse(pts_.begin(), pts_.end());

    cum_.resize(static_cast<std::size_t>(n) + 1);
    cum_[0] = 0.0;
    for (int k = 0; k < n; ++k) {
        double seg = std::abs(pts_[(k + 1) % n] - pts_[static_cast<std::size_t>(k)]);
        if (seg <= 0.0)
            throw std::invalid_argument("coincident consecutive samples at index " + std::to_string(k));
        cum_[static_cast<std::size_t>(k) + 1] = cum_[static_cast<std::size_t>(k)] + seg;
        max_seg_ = std::max(max_seg_, seg);
    }

    require_simple(pts_, tag_);

    cplx c = 0.0;
    for (int k = 0; k < n; ++k) c += pts_[static_cast<std::size_t>(k)];
    centroid_ = c / static_cast<double>(n);
}

cplx CurveSample::point(int k) const {
    int n = size();
    k %= n;
    if (k < 0) k += n;
    return pts_[static_cast<std::size_t>(k)];
}

double CurveSample::segment_length(int k) const {
    int n = size();
    k %= n;
    if (k < 0) k += n;
    return cum_[static_cast<std::size_t>(k) + 1] - cum_[static_cast<std::size_t>(k)];
}

double CurveSample::trapezoid_weight(int k) const {
    return 0.5 * (segment_length(k - 1) + segment_length(k));
}

cplx CurveSample::at_arclength(double s) const {
    double L = length();
    s = std::fmod(s, L);
    if (s < 0) s += L;
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    int k = static_cast<int>(std::distance(cum_.begin(), it)) - 1;
    k = std::clamp(k, 0, size() - 1);
    double t = (s - cum_[static_cast<std::size_t>(k)]) / segment_length(k);
    return point(k) + t * (point(k + 1) - point(k));
}

CurveSample make_polyline_curve(std::vector<cplx> points, std::string tag) {
    return CurveSample(std::move(points), std::move(tag));
}

CurveSample make_named_curve(const CurveFamily& family, int n_samples) {
    if (n_samples < 16) throw std::invalid_argument("n_samples must be at least 16");

    if (const auto* fc = std::get_if<CircleFamily>(&family)) {
        if (fc->radius <= 0) throw std::invalid_argument("circle radius must be positive");
        std::vector<cplx> pts(static_cast<std::size_t>(n_samples));
        for (int k = 0; k < n_samples; ++k)
            pts[static_cast<std::size_t>(k)] = fc->radius * std::polar(1.0, 2.0 * kPi * k / n_samples);
        return CurveSample(std::move(pts), "circle(" + std::to_string(fc->radius) + ")");
    }

    if (const auto* fp = std::get_if<PolynomialFamily>(&family)) {
        if (std::abs(fp->c) >= 0.5)
            throw std::invalid_argument("polynomial family requires |c| < 1/2 (univalence)");
        std::vector<cplx> pts(static_cast<std::size_t>(n_samples));
        for (int k = 0; k < n_samples; ++k) {
            cplx z = std::polar(1.0, 2.0 * kPi * k / n_samples);
            pts[static_cast<std::size_t>(k)] = z + fp->c * z * z;
        }
        return CurveSample(std::move(pts), "polynomial(" + std::to_string(fp->c) + ")");
    }

    if (const auto* fg = std::get_if<PolygonFamily>(&family)) {
        if (fg->vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
        {
            // Reject self-intersecting input before densifying.
            std::vector<cplx> v = fg->vertices;
            const int m = static_cast<int>(v.size());
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) {
                    if (j - i <= 1 || (i == 0 && j == m - 1)) continue;
                    if (segments_intersect(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]))
                        throw std::invalid_argument("polygon is self-intersecting");
                }
        }
        return CurveSample(subdivide_polygon(fg->vertices, n_samples), "polygon");
    }

    const auto& fk = std::get<KochFamily>(family);
    if (fk.level < 0 || fk.level > 7) throw std::invalid_argument("koch level must be in [0, 7]");
    std::vector<cplx> corners = koch_vertices(fk.level, fk.side);
    const int base = static_cast<int>(corners.size());
    int mult = std::max(1, (n_samples + base - 1) / base);
    std::vector<cplx> pts;
    if (mult == 1 && base >= 16) {
        pts = std::move(corners);
    } else {
        // All generator segments have equal length, so inserting `mult-1`
        // equally spaced points per segment keeps spacing uniform and
        // corners on the grid.
        pts.reserve(static_cast<std::size_t>(base) * static_cast<std::size_t>(mult));
        for (int k = 0; k < base; ++k) {
            cplx a = corners[static_cast<std::size_t>(k)], b = corners[static_cast<std::size_t>((k + 1) % base)];
            for (int j = 0; j < mult; ++j)
                pts.push_back(a + (b - a) * (static_cast<double>(j) / mult));
        }
    }
    return CurveSample(std::move(pts), "koch(" + std::to_string(fk.level) + ")");
}

CurveSample reparametrize_arclength(const CurveSample& curve, std::optional<double> target_length) {
    const int n = curve.size();
    const double L = curve.length();
    double target = L;
    if (target_length) {
        if (*target_length <= 0) throw std::invalid_argument("target length must be positive");
        target = *target_length;
    }
    std::vector<cplx> pts(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) pts[static_cast<std::size_t>(k)] = curve.at_arclength(L * k / n);
    // Resampling cuts corners, so rescale to hit the requested length of
    // the new polyline exactly.
    double resampled_len = 0.0;
    for (int k = 0; k < n; ++k)
        resampled_len += std::abs(pts[static_cast<std::size_t>((k + 1) % n)] - pts[static_cast<std::size_t>(k)]);
    double scale = target / resampled_len;
    for (auto& z : pts) z *= scale;
    return CurveSample(std::move(pts), curve.family_tag());
}

double curve_length(const CurveSample& curve) { return curve.length(); }

double curve_diameter(const CurveSample& curve) {
    // Diameter of the sample set equals the diameter of its convex hull
    // (monotone chain + rotating calipers).
    std::vector<cplx> p = curve.points();
    std::sort(p.begin(), p.end(), [](cplx a, cplx b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    p.erase(std::unique(p.begin(), p.end()), p.end());
    const int n = static_cast<int>(p.size());
    if (n == 1) return 0.0;
    std::vector<cplx> hull(2 * static_cast<std::size_t>(n));
    int h = 0;
    for (int i = 0; i < n; ++i) {
        while (h >= 2 && cross(hull[h - 1] - hull[h - 2], p[i] - hull[h - 2]) <= 0) --h;
        hull[static_cast<std::size_t>(h++)] = p[i];
    }
    for (int i = n - 2, lower = h + 1; i >= 0; --i) {
        while (h >= lower && cross(hull[h - 1] - hull[h - 2], p[i] - hull[h - 2]) <= 0) --h;
        hull[static_cast<std::size_t>(h++)] = p[i];
    }
    hull.resize(static_cast<std::size_t>(h) - 1);
    double best = 0.0;
    int m = static_cast<int>(hull.size());
    int j = 1;
    for (int i = 0; i < m; ++i) {
        while (std::abs(hull[(j + 1) % m] - hull[i]) >= std::abs(hull[j % m] - hull[i])) {
            ++j;
            if (j > 4 * m) break;
        }
        best = std::max(best, std::abs(hull[j % m] - hull[i]));
        best = std::max(best, std::abs(hull[(i + 1) % m] - hull[i]));
    }
    return best;
}

double distance_to_curve(const CurveSample& curve, cplx w) {
    const int n = curve.size();
    double best = std::abs(w - curve.point(0));
    for (int k = 0; k < n; ++k) {
        cplx a = curve.point(k), b = curve.point(k + 1);
        cplx ab = b - a;
        double t = std::clamp(((w - a) * std::conj(ab)).real() / std::norm(ab), 0.0, 1.0);
        best = std::min(best, std::abs(w - (a + t * ab)));
    }
    return best;
}

int winding_number(const CurveSample& curve, cplx w) {
    const int n = curve.size();
    double total = 0.0;
    for (int k = 0; k < n; ++k)
        total += std::arg((curve.point(k + 1) - w) / (curve.point(k) - w));
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

bool contains_interior(const CurveSample& curve, cplx w) {
    double d = distance_to_curve(curve, w);
    if (d < 1e-9 * std::max(1.0, curve_diameter(curve)))
        throw std::domain_error("point is on the curve at sample resolution; interior test is ambiguous");
    return winding_number(curve, w) != 0;
}

double chord_arc_constant(const CurveSample& curve) {
    const int n = curve.size();
    const double L = curve.length();
    const double floor_chord = 1e-14 * L;
    double best = chunked_max(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        double m = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            for (std::size_t k = j + 1; k < static_cast<std::size_t>(n); ++k) {
                double chord = std::abs(curve.points()[k] - curve.points()[j]);
                if (chord < floor_chord) continue;
                double arc = curve.cum_len()[k] - curve.cum_len()[j];
                arc = std::min(arc, L - arc);
                m = std::max(m, arc / chord);
            }
        }
        return m;
    });
    if (best <= 0.0) throw std::runtime_error("chord-arc estimate degenerate: all sample pairs coincide");
    return best;
}

ProbePoint make_probe(const CurveSample& curve, cplx w) {
    double d = distance_to_curve(curve, w);
    if (d <= 0.0) throw std::domain_error("probe point lies on the curve");
    bool inside = contains_interior(curve, w);
    return ProbePoint{w, inside ? ProbePoint::Side::interior : ProbePoint::Side::exterior, d};
}

} // namespace lab
