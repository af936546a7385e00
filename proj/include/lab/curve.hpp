#ifndef LAB_CURVE_HPP
#define LAB_CURVE_HPP

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lab {

using cplx = std::complex<double>;

// Named curve families. The polynomial family is the image of the unit
// circle under z + c z^2, univalent for |c| < 1/2; it degrades towards a
// cusp as c -> 1/2. The Koch prefractal (1/3-60 degree generator on an
// equilateral triangle) is the second degrading family.
struct CircleFamily { double radius = 1.0; };
struct PolynomialFamily { double c = 0.0; };
struct PolygonFamily { std::vector<cplx> vertices; };
struct KochFamily { int level = 1; double side = 1.0; };
using CurveFamily = std::variant<CircleFamily, PolynomialFamily, PolygonFamily, KochFamily>;

// A sampled closed Jordan curve: points z_0..z_{N-1} (z_N == z_0 implied)
// with the cumulative arc-length table s_0 = 0 < s_1 < ... < s_N = L where
// each increment equals the chord length of its segment. Immutable after
// construction; construction enforces counterclockwise orientation, N >= 16,
// and simplicity at sample resolution.
class CurveSample {
public:
    CurveSample(std::vector<cplx> points, std::string family_tag);

    int size() const { return static_cast<int>(pts_.size()); }
    double length() const { return cum_.back(); }
    const std::vector<cplx>& points() const { return pts_; }
    const std::vector<double>& cum_len() const { return cum_; }
    const std::string& family_tag() const { return tag_; }

    // Index access wraps modulo N.
    cplx point(int k) const;
    double arc(int k) const { return cum_[static_cast<std::size_t>(k)]; }
    double segment_length(int k) const;
    double max_segment_length() const { return max_seg_; }
    // Trapezoid weight at sample k: half the two adjacent segment lengths.
    double trapezoid_weight(int k) const;
    // Point on the polyline at arc-length s (taken mod L).
    cplx at_arclength(double s) const;
    // Plain mean of the sample points.
    cplx centroid() const { return centroid_; }

private:
    std::vector<cplx> pts_;
    std::vector<double> cum_;
    std::string tag_;
    double max_seg_ = 0.0;
    cplx centroid_;
};

struct ProbePoint {
    enum class Side { interior, exterior };
    cplx w;
    Side side;
    double dist;
};

CurveSample make_named_curve(const CurveFamily& family, int n_samples);
CurveSample make_polyline_curve(std::vector<cplx> points, std::string tag = "polyline");

// Resamples at uniform arc-length spacing; if target_length is given the
// curve is similarity-scaled to that length first.
CurveSample reparametrize_arclength(const CurveSample& curve,
                                    std::optional<double> target_length = std::nullopt);

double curve_length(const CurveSample& curve);
double curve_diameter(const CurveSample& curve);
double distance_to_curve(const CurveSample& curve, cplx w);
int winding_number(const CurveSample& curve, cplx w);
bool contains_interior(const CurveSample& curve, cplx w);

// Grid supremum of (shorter arc)/(chord) over all sample pairs; a lower
// bound for the true chord-arc constant.
double chord_arc_constant(const CurveSample& curve);

// Classifies w against the curve; throws if w is on the curve at resolution.
ProbePoint make_probe(const CurveSample& curve, cplx w);

// Signed area of the sample polygon (positive for counterclockwise).
double signed_area(const std::vector<cplx>& points);

} // namespace lab

#endif
