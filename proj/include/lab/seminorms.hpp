#ifndef LAB_SEMINORMS_HPP
#define LAB_SEMINORMS_HPP

#include <optional>
#include <string>
#include <vector>

#include "lab/conformal.hpp"
#include "lab/curve.hpp"
#include "lab/harmonic.hpp"

namespace lab {

// Boundary trace on a curve. Three kinds:
//   pole      u(z) = 1/(z - w) with w off the curve,
//   trig      real trigonometric polynomial of the arc-length angle 2 pi s / L,
//   tabulated values at the curve samples, interpolated in arc length.
class BoundaryFunction {
public:
    static BoundaryFunction pole(cplx w);
    static BoundaryFunction constant(double value);
    static BoundaryFunction cosine(int n);
    static BoundaryFunction sine(int n);
    static BoundaryFunction real_trig(double a0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
    static BoundaryFunction tabulated(std::vector<cplx> values);

    // Evaluate at a point of the curve with known arc-length position.
    cplx eval(const CurveSample& curve, cplx point, double arclength) const;
    cplx eval_at_sample(const CurveSample& curve, int k) const;

    bool is_pole() const { return kind_ == Kind::pole; }
    cplx pole_location() const { return w_; }
    BoundaryFunction scaled(double factor) const;
    std::string describe() const;

private:
    enum class Kind { pole, trig, tabulated };
    Kind kind_ = Kind::trig;
    cplx w_ = 0.0;
    double a0_ = 0.0;
    std::vector<double> ca_, sa_;
    std::vector<cplx> values_;
};

struct SeminormQuad {
    int n_trunc = 256;
    int analysis_samples = 1024;
    DiskQuadSpec disk{64, 512};
};

struct SeminormReport {
    double p = 2.0;
    double besov = 0.0;
    double interior = 0.0;
    std::optional<double> exterior;
    std::optional<double> besov_over_interior;
    std::optional<double> exterior_over_interior;
    int n_samples = 0;
    int n_trunc = 0;
    int radial_order = 0;
    std::string interior_engine;
    std::string exterior_engine;
};

// Curve Besov seminorm ((1/4pi^2) sum over sample pairs of
// |u_j - u_k|^p / |z_j - z_k|^2 ds_j ds_k)^{1/p} with the diagonal limit
// (|du/ds|^2 for p = 2, zero for p > 2).
double besov_seminorm(const CurveSample& curve, const BoundaryFunction& u, double p);

// Interior / exterior p-Dirichlet seminorm: pull the trace back through
// the map's boundary correspondence, extend harmonically, and integrate
// the weighted gradient over the disk. The two differ only in which map
// is supplied (interior, or exterior_reflected which transports through
// the reflection).
double interior_seminorm(const CurveSample& curve, const ConformalMap& map, const BoundaryFunction& u,
                         double p, const SeminormQuad& quad = {});
double exterior_seminorm(const CurveSample& curve, const ConformalMap& map, const BoundaryFunction& u,
                         double p, const SeminormQuad& quad = {});

SeminormReport seminorm_triple(const CurveSample& curve, const ConformalMap& interior_map,
                               const ConformalMap& exterior_map, const BoundaryFunction& u, double p,
                               const SeminormQuad& quad = {});

// Besov seminorm on the unit circle of the pullback u o z, where z is the
// unit-speed parametrization of a length-2pi curve: the sample arc lengths
// serve as circle angles. Together with besov_seminorm this realizes the
// bi-Lipschitz sandwich termwise on the grid.
double circle_pullback_besov(const CurveSample& curve, const BoundaryFunction& u, double p);

// Image curve of Gamma under z -> 1/(z - w).
double image_curve_length(const CurveSample& curve, cplx w);
// Double integral over the image curve of |eta - xi|^{p-2} |d eta| |d xi|;
// equals 4 pi^2 ||u_w||_{B_p}^p by the kernel identity.
double image_pair_integral(const CurveSample& curve, cplx w, double p);

// Minimum admissible pole distance for this curve's resolution.
double pole_resolution_floor(const CurveSample& curve);

} // namespace lab

#endif
