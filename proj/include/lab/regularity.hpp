#ifndef LAB_REGULARITY_HPP
#define LAB_REGULARITY_HPP

#include <optional>
#include <vector>

#include "lab/curve.hpp"

namespace lab {

struct BallGridSpec {
    int max_centers = 128;        // curve samples are subsampled to this many
    int radii_per_center = 14;    // dyadic radii below the enclosing radius
    std::vector<double> radii;    // explicit radii override (must clear the floor)
    bool include_bbox_grid = true;
};

struct BallRegularityResult {
    double m_hat = 0.0;
    cplx argmax_center;
    double argmax_radius = 0.0;
};

// Grid supremum of length(curve within B(z, r)) / r; exact segment-disk
// clipping per polyline segment.
BallRegularityResult ball_regularity(const CurveSample& curve, const BallGridSpec& spec = {});

struct DualProbeSpec {
    int max_base_points = 128;  // boundary samples carrying normal offsets
    int dyadic_min_k = 2;       // offsets ladder up to diam * 2^-k, both sides
    int bbox_grid = 9;          // odd => the grid hits the bbox center
    std::vector<cplx> extra_probes;
};

struct DualProbe {
    cplx w;
    double dist = 0.0;
    double integral = 0.0;
    double product = 0.0;
};

struct DualRegularityResult {
    double c_hat = 0.0;
    cplx argmax_w;
    std::vector<DualProbe> probes;
    int excluded = 0;  // probes discarded for sitting below the resolution floor
};

// Grid supremum of d(w, curve) * integral over the curve of |dz|/|z-w|^2.
DualRegularityResult dual_regularity(const CurveSample& curve, const DualProbeSpec& spec = {});

struct LemmaSinResult {
    // min over sample pairs of pi |sin((t-s)/2)| - |z(t) - z(s)|
    double slack1 = 0.0;
    // min over sample pairs of |z(t) - z(s)| - (2/K) |sin((t-s)/2)|
    std::optional<double> slack2;
};

// Requires the curve rescaled to length 2 pi; the sample arc lengths serve
// as the unit-speed parameter.
LemmaSinResult lemma_sin_slack(const CurveSample& curve, std::optional<double> chord_arc_k = std::nullopt);

struct RegularityReport {
    double k_hat = 0.0;
    double m_hat = 0.0;
    double c_hat = 0.0;
    BallRegularityResult ball;
    DualRegularityResult dual;
};

RegularityReport regularity_report(const CurveSample& curve, const BallGridSpec& ball_spec = {},
                                   const DualProbeSpec& dual_spec = {});

// Spearman rank correlation (average ranks on ties).
double spearman_rank_correlation(const std::vector<double>& a, const std::vector<double>& b);

} // namespace lab

#endif
