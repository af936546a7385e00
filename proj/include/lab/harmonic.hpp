#ifndef LAB_HARMONIC_HPP
#define LAB_HARMONIC_HPP

#include <complex>
#include <utility>
#include <vector>

namespace lab {

using cplx = std::complex<double>;

// Gauss-Legendre nodes and weights on [a, b].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    GaussLegendre(int order, double a = -1.0, double b = 1.0);
};

// Harmonic function on the unit disk as a truncated Fourier series:
//   U(r e^{i t}) = sum_{|n| <= N} a_n r^{|n|} e^{i n t}.
// Wirtinger derivatives come from termwise differentiation:
//   U_w = sum_{n>=1} n a_n z^{n-1},  U_wbar = sum_{n>=1} n a_{-n} zbar^{n-1}.
class DiskHarmonic {
public:
    DiskHarmonic(std::vector<cplx> coeffs, int n_trunc);

    int truncation() const { return n_trunc_; }
    cplx coeff(int n) const;           // a_n for |n| <= N_trunc
    cplx eval(cplx z) const;           // |z| < 1
    std::pair<cplx, cplx> wirtinger(cplx z) const;

private:
    std::vector<cplx> coeffs_; // a_{-N}..a_{N}
    int n_trunc_;
};

struct DiskQuadSpec {
    int radial_order = 64;
    int angular_order = 512;
};

// Discrete Fourier analysis of boundary samples at N uniform angles
// (t_j = 2 pi j / N); requires N >= 2 n_trunc + 1 so that only aliasing
// beyond the truncation order is lost.
DiskHarmonic analyze_boundary(const std::vector<cplx>& samples, int n_trunc);

cplx eval_harmonic(const DiskHarmonic& u, cplx z);
std::pair<cplx, cplx> wirtinger_gradient(const DiskHarmonic& u, cplx z);

// p-Dirichlet energy in the conformal pullback form on the disk:
//   (1/2pi) iint_D (|U_w| + |U_wbar|)^p (1 - |z|^2)^{p-2} dA,  p >= 2.
double disk_dirichlet_energy(const DiskHarmonic& u, double p, const DiskQuadSpec& quad = {});

// Same energy with quadrature orders doubled until the relative change
// drops below rel_tol.
double disk_dirichlet_energy_converged(const DiskHarmonic& u, double p,
                                       DiskQuadSpec start = {32, 256}, double rel_tol = 1e-4,
                                       int max_doublings = 4);

// Besov seminorm of boundary samples at N uniform angles:
//   ((1/4pi^2) iint |u(t)-u(s)|^p / |e^{it}-e^{is}|^2 dt ds)^{1/p},  p >= 2.
// The diagonal carries the analytic limit: 0 for p > 2 and |u'(t)|^2
// (centered differences) for p = 2.
double circle_besov_seminorm(const std::vector<cplx>& samples, double p);

} // namespace lab

#endif
