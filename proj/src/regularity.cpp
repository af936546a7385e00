#include "lab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "lab/parallel.hpp"

namespace lab {

namespace {

constexpr double kPi = std::numbers::pi;

// Length of segment [a, b] inside the open disk B(c, r); exact quadratic.
double clipped_length(cplx a, cplx b, cplx c, double r) {
    cplx d = b - a;
    double len2 = std::norm(d);
    if (len2 == 0.0) return 0.0;
    cplx f = a - c;
    // |f + t d|^2 = r^2
    double qa = len2;
    double qb = 2.0 * (f.real() * d.real() + f.imag() * d.imag());
    double qc = std::norm(f) - r * r;
    double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) return 0.0;
    double sq = std::sqrt(disc);
    double t1 = (-qb - sq) / (2.0 * qa);
    double t2 = (-qb + sq) / (2.0 * qa);
    double lo = std::max(0.0, t1);
    double hi = std::min(1.0, t2);
    if (hi <= lo) return 0.0;
    return (hi - lo) * std::sqrt(len2);
}

double curve_length_in_ball(const CurveSample& curve, cplx c, double r) {
    const int n = curve.size();
    double total = 0.0;
    for (int k = 0; k < n; ++k) total += clipped_length(curve.point(k), curve.point(k + 1), c, r);
    return total;
}

} // namespace

BallRegularityResult ball_regularity(const CurveSample& curve, const BallGridSpec& spec) {
    const double floor = 4.0 * curve.max_segment_length();
    const double diam = curve_diameter(curve);
    if (!spec.radii.empty())
        for (double r : spec.radii)
            if (r < floor || r > diam)
                throw std::invalid_argument("ball radius grid must lie within (4 x resolution, diameter]");

    std::vector<cplx> centers;
    const int n = curve.size();
    int stride = std::max(1, n / std::max(1, spec.max_centers));
    for (int k = 0; k < n; k += stride) centers.push_back(curve.point(k));
    centers.push_back(curve.centroid());
    if (spec.include_bbox_grid) {
        double min_x = curve.point(0).real(), max_x = min_x, min_y = curve.point(0).imag(), max_y = min_y;
        for (const auto& z : curve.points()) {
            min_x = std::min(min_x, z.real());
            max_x = std::max(max_x, z.real());
            min_y = std::min(min_y, z.imag());
            max_y = std::max(max_y, z.imag());
        }
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                centers.emplace_back(min_x + (max_x - min_x) * i / 4.0, min_y + (max_y - min_y) * j / 4.0);
    }

    BallRegularityResult best;
    for (const auto& c : centers) {
        std::vector<double> radii = spec.radii;
        if (radii.empty()) {
            // Dyadic radii below the radius that just encloses the curve;
            // the enclosing radius itself recovers whole-curve ratios like
            // length/r for a ball barely containing everything.
            double r_far = 0.0;
            for (const auto& z : curve.points()) r_far = std::max(r_far, std::abs(z - c));
            r_far *= 1.0 + 1e-9;
            for (int k = 0; k < spec.radii_per_center; ++k) {
                double r = r_far * std::pow(0.5, k);
                if (r < floor) break;
                radii.push_back(r);
            }
        }
        for (double r : radii) {
            double ratio = curve_length_in_ball(curve, c, r) / r;
            if (ratio > best.m_hat) {
                best.m_hat = ratio;
                best.argmax_center = c;
                best.argmax_radius = r;
            }
        }
    }
    return best;
}

namespace {

double dual_integral(const CurveSample& curve, cplx w) {
    const int n = curve.size();
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += curve.trapezoid_weight(k) / std::norm(curve.point(k) - w);
    return acc;
}

// A probe is resolved when every segment is short against its own distance
// from the probe; this admits probes deep in finely-sampled regions (near a
// forming cusp) that a global floor would reject. Returns the distance to
// the curve, or a negative value when unresolved.
double resolved_distance(const CurveSample& curve, cplx w) {
    const int n = curve.size();
    double dist = 1e300;
    bool ok = true;
    for (int k = 0; k < n; ++k) {
        cplx a = curve.point(k), b = curve.point(k + 1);
        cplx ab = b - a;
        double t = std::clamp(((w - a) * std::conj(ab)).real() / std::norm(ab), 0.0, 1.0);
        double d = std::abs(w - (a + t * ab));
        dist = std::min(dist, d);
        if (curve.segment_length(k) > d / 3.0) ok = false;
    }
    return ok ? dist : -dist;
}

} // namespace

DualRegularityResult dual_regularity(const CurveSample& curve, const DualProbeSpec& spec) {
    const double diam = curve_diameter(curve);
    const int n = curve.size();

    std::vector<cplx> candidates = spec.extra_probes;
    int stride = std::max(1, n / std::max(1, spec.max_base_points));
    for (int k = 0; k < n; k += stride) {
        cplx tangent = curve.point(k + 1) - curve.point(k);
        tangent /= std::abs(tangent);
        cplx normal = cplx(0.0, 1.0) * tangent;
        // Dyadic offsets from the local resolution scale up to the diameter
        // scale; fine scales only exist where the sampling supports them.
        double local = 4.0 * std::max(curve.segment_length(k - 1), curve.segment_length(k));
        double top = diam * std::pow(0.5, spec.dyadic_min_k);
        for (double off = local; off <= top; off *= 2.0) {
            candidates.push_back(curve.point(k) + off * normal);
            candidates.push_back(curve.point(k) - off * normal);
        }
    }
    if (spec.bbox_grid > 1) {
        double min_x = curve.point(0).real(), max_x = min_x, min_y = curve.point(0).imag(), max_y = min_y;
        for (const auto& z : curve.points()) {
            min_x = std::min(min_x, z.real());
            max_x = std::max(max_x, z.real());
            min_y = std::min(min_y, z.imag());
            max_y = std::max(max_y, z.imag());
        }
        int g = spec.bbox_grid;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j)
                candidates.emplace_back(min_x + (max_x - min_x) * i / (g - 1.0),
                                        min_y + (max_y - min_y) * j / (g - 1.0));
    }

    DualRegularityResult res;
    res.probes.reserve(candidates.size());
    for (const auto& w : candidates) {
        double d = resolved_distance(curve, w);
        if (d <= 0.0) {
            ++res.excluded;
            continue;
        }
        DualProbe probe;
        probe.w = w;
        probe.dist = d;
        probe.integral = dual_integral(curve, w);
        probe.product = d * probe.integral;
        if (probe.product > res.c_hat) {
            res.c_hat = probe.product;
            res.argmax_w = w;
        }
        res.probes.push_back(probe);
    }
    if (res.probes.empty()) throw std::invalid_argument("no admissible probes above the resolution floor");
    return res;
}

LemmaSinResult lemma_sin_slack(const CurveSample& curve, std::optional<double> chord_arc_k) {
    const double L = curve.length();
    if (std::abs(L - 2.0 * kPi) > 1e-9 * 2.0 * kPi)
        throw std::invalid_argument("lemma_sin_slack requires the curve rescaled to length 2 pi");
    const int n = curve.size();
    const auto& pts = curve.points();
    const auto& cum = curve.cum_len();

    double neg_slack1 = chunked_max(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        double worst = -1e300;
        for (std::size_t j = lo; j < hi; ++j)
            for (std::size_t k = j + 1; k < static_cast<std::size_t>(n); ++k) {
                double sinv = std::abs(std::sin(0.5 * (cum[j] - cum[k])));
                double chord = std::abs(pts[j] - pts[k]);
                worst = std::max(worst, chord - kPi * sinv);
            }
        return worst;
    });

    LemmaSinResult out;
    out.slack1 = -neg_slack1;
    if (chord_arc_k) {
        double K = *chord_arc_k;
        if (K < 1.0) throw std::invalid_argument("chord-arc constant must be >= 1");
        double neg_slack2 = chunked_max(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
            double worst = -1e300;
            for (std::size_t j = lo; j < hi; ++j)
                for (std::size_t k = j + 1; k < static_cast<std::size_t>(n); ++k) {
                    double sinv = std::abs(std::sin(0.5 * (cum[j] - cum[k])));
                    double chord = std::abs(pts[j] - pts[k]);
                    worst = std::max(worst, (2.0 / K) * sinv - chord);
                }
            return worst;
        });
        out.slack2 = -neg_slack2;
    }
    return out;
}

RegularityReport regularity_report(const CurveSample& curve, const BallGridSpec& ball_spec,
                                   const DualProbeSpec& dual_spec) {
    RegularityReport rep;
    rep.k_hat = chord_arc_constant(curve);
    rep.ball = ball_regularity(curve, ball_spec);
    rep.dual = dual_regularity(curve, dual_spec);
    rep.m_hat = rep.ball.m_hat;
    rep.c_hat = rep.dual.c_hat;
    return rep;
}

double spearman_rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("rank correlation needs two samples of equal size >= 2");
    auto ranks = [](const std::vector<double>& v) {
        const int n = static_cast<int>(v.size());
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int i, int j) { return v[static_cast<std::size_t>(i)] < v[static_cast<std::size_t>(j)]; });
        std::vector<double> r(static_cast<std::size_t>(n));
        int i = 0;
        while (i < n) {
            int j = i;
            while (j + 1 < n &&
                   v[static_cast<std::size_t>(idx[static_cast<std::size_t>(j + 1)])] ==
                       v[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])])
                ++j;
            double avg = 0.5 * (i + j) + 1.0;
            for (int k = i; k <= j; ++k) r[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = avg;
            i = j + 1;
        }
        return r;
    };
    std::vector<double> ra = ranks(a), rb = ranks(b);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(ra.size());
    mb /= static_cast<double>(rb.size());
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) throw std::invalid_argument("rank correlation undefined for constant input");
    return cov / std::sqrt(va * vb);
}

} // namespace lab
