#ifndef LAB_CONFORMAL_HPP
#define LAB_CONFORMAL_HPP

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "lab/curve.hpp"

namespace lab {

// Conformal map of the unit disk onto a Jordan domain, either from the
// closed-form registry (circle, z + c z^2) or fitted numerically by a
// geodesic zipper composition. Interior maps send D onto the interior of
// the curve; exterior_reflected maps send D onto the reflected exterior
// domain obtained through iota(z) = 1/conj(z) after translating the anchor
// to the origin. Normalization: eval(0) = anchor and eval'(0) > 0.
class ConformalMap {
public:
    enum class Side { interior, exterior_reflected };
    enum class Engine { closed_form, zipper };

    struct TableEntry {
        double theta;      // angle on the unit circle, in [0, 2pi)
        int sample_index;  // index into the source curve's samples
        cplx curve_point;  // point on the original curve
        double arclength;  // arc-length position on the original curve
    };

    Side side() const { return side_; }
    Engine engine() const { return engine_; }
    cplx shift() const { return shift_; }
    cplx anchor() const { return side_ == Side::interior ? shift_ : cplx(0.0); }
    int table_size() const { return static_cast<int>(table_.size()); }
    const std::vector<TableEntry>& boundary_table() const { return table_; }
    double curve_length() const { return curve_length_; }

    // Map and derivative on the open disk (derivative needs |z| <= 1-1e-9).
    cplx eval(cplx z) const;
    cplx eval_derivative(cplx z) const;
    // Hyperbolic density of the target domain at the image of z.
    double hyperbolic_density(cplx z) const;

    // Point of the original curve corresponding to disk angle theta; uses
    // the exact formula for closed-form maps and monotone piecewise-linear
    // interpolation of the boundary table for zipper maps. For
    // exterior_reflected maps the point is transported back through iota
    // and the shift, so it lands on the original curve in both cases.
    cplx boundary_point_on_curve(double theta) const;
    double boundary_arclength(double theta) const;

    // Cache of the elementary-map parameters and normalization; reloading
    // needs the same curve the map was fitted to.
    std::string cache_json() const;
    static ConformalMap from_cache_json(const std::string& text, const CurveSample& curve);

    friend ConformalMap closed_form_interior_map(const CurveFamily& family, int n_samples);
    friend ConformalMap closed_form_exterior_map(const CurveFamily& family, int n_samples);
    friend ConformalMap fit_numeric_map(const CurveSample& curve, ConformalMap::Side side);

private:
    ConformalMap() = default;

    struct SlitStep {
        double x0;  // foot of the geodesic circle on R (infinity => vertical)
        double h;   // slit height after straightening
    };

    // Closed-form registry payload.
    enum class Form { none, circle, polynomial };
    Form form_ = Form::none;
    double radius_ = 1.0;
    double poly_c_ = 0.0;

    // Zipper payload (all in shifted/reflected working coordinates).
    cplx zip_z0_, zip_z1_;
    std::vector<SlitStep> steps_;
    double x_star_ = 0.0;           // image of the first point before closing
    bool interior_left_ = true;     // working region is {Re < 0} before squaring
    cplx w0_;                       // image of the anchor in the half-plane
    double beta_ = 0.0;             // final rotation fixing arg eval'(0) = 0

    Side side_ = Side::interior;
    Engine engine_ = Engine::closed_form;
    cplx shift_ = 0.0;
    double curve_length_ = 0.0;
    std::vector<TableEntry> table_;
    // Table sorted by theta with unwrapped arclength for interpolation.
    std::vector<double> sorted_theta_;
    std::vector<double> sorted_arc_;
    std::shared_ptr<const CurveSample> source_curve_;

    void finalize_table();
    cplx eval_working(cplx z, cplx* deriv) const;
};

// Monotone circle homeomorphism h = phi^{-1} o psi sampled at the curve
// points: theta[k] is strictly increasing in [0, 2pi) and lift[k] is the
// continuous lift of h(theta[k]) (lift(theta + 2pi) = lift(theta) + 2pi).
struct Welding {
    std::vector<double> theta;
    std::vector<double> lift;

    double lift_at(double t) const;  // piecewise-linear, degree-1 extension
};

ConformalMap closed_form_interior_map(const CurveFamily& family, int n_samples = 1024);
ConformalMap closed_form_exterior_map(const CurveFamily& family, int n_samples = 1024);
ConformalMap fit_numeric_map(const CurveSample& curve, ConformalMap::Side side);

Welding compute_welding(const ConformalMap& interior_map, const ConformalMap& exterior_map);

// Max over the table angles and the alpha grid of max(ratio, 1/ratio) for
// ratio = |h(e^{i(t+a)}) - h(e^{it})| / |h(e^{it}) - h(e^{i(t-a)})|.
double quasisymmetry_constant(const Welding& h, const std::vector<double>& alpha_grid);

// Dyadic alpha grid {pi/2, pi/4, ..., pi/2^m}.
std::vector<double> dyadic_alpha_grid(int m = 8);

// Interior anchor: sample centroid when it lies inside, otherwise a point
// found by probing inward offsets.
cplx anchor_point(const CurveSample& curve);

} // namespace lab

#endif
