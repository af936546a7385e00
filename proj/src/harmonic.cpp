#include "lab/harmonic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lab/parallel.hpp"

namespace lab {

namespace {
constexpr double kPi = std::numbers::pi;
}

GaussLegendre::GaussLegendre(int order, double a, double b) {
    if (order < 1) throw std::invalid_argument("quadrature order must be positive");
    nodes.resize(static_cast<std::size_t>(order));
    weights.resize(static_cast<std::size_t>(order));
    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    const int m = (order + 1) / 2;
    for (int i = 1; i <= m; ++i) {
        double z = std::cos(kPi * (i - 0.25) / (order + 0.5));
        double z1, pp;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= order; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::fabs(z - z1) > 1e-15);
        nodes[static_cast<std::size_t>(i - 1)] = xm - xl * z;
        nodes[static_cast<std::size_t>(order - i)] = xm + xl * z;
        weights[static_cast<std::size_t>(i - 1)] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        weights[static_cast<std::size_t>(order - i)] = weights[static_cast<std::size_t>(i - 1)];
    }
}

DiskHarmonic::DiskHarmonic(std::vector<cplx> coeffs, int n_trunc) : coeffs_(std::move(coeffs)), n_trunc_(n_trunc) {
    if (n_trunc < 0 || coeffs_.size() != static_cast<std::size_t>(2 * n_trunc + 1))
        throw std::invalid_argument("coefficient vector must hold a_{-N}..a_{N}");
}

cplx DiskHarmonic::coeff(int n) const {
    if (std::abs(n) > n_trunc_) return 0.0;
    return coeffs_[static_cast<std::size_t>(n + n_trunc_)];
}

cplx DiskHarmonic::eval(cplx z) const {
    if (std::abs(z) >= 1.0) throw std::domain_error("harmonic evaluation requires |z| < 1");
    // Horner in z for n >= 0 and in conj(z) for n < 0.
    cplx pos = 0.0, neg = 0.0;
    for (int n = n_trunc_; n >= 1; --n) {
        pos = (pos + coeff(n)) * z;
        neg = (neg + coeff(-n)) * std::conj(z);
    }
    return coeff(0) + pos + neg;
}

std::pair<cplx, cplx> DiskHarmonic::wirtinger(cplx z) const {
    if (std::abs(z) >= 1.0) throw std::domain_error("harmonic evaluation requires |z| < 1");
    cplx uw = 0.0, uwb = 0.0;
    for (int n = n_trunc_; n >= 2; --n) {
        uw = (uw + static_cast<double>(n) * coeff(n)) * z;
        uwb = (uwb + static_cast<double>(n) * coeff(-n)) * std::conj(z);
    }
    uw += coeff(1);
    uwb += coeff(-1);
    return {uw, uwb};
}

DiskHarmonic analyze_boundary(const std::vector<cplx>& samples, int n_trunc) {
    const int n = static_cast<int>(samples.size());
    if (n < 2 * n_trunc + 1)
        throw std::invalid_argument("need at least 2*n_trunc+1 samples for analysis");
    std::vector<cplx> coeffs(static_cast<std::size_t>(2 * n_trunc + 1), 0.0);
    for (int m = -n_trunc; m <= n_trunc; ++m) {
        cplx acc = 0.0;
        const cplx step = std::polar(1.0, -2.0 * kPi * m / n);
        cplx phase = 1.0;
        for (int j = 0; j < n; ++j) {
            acc += samples[static_cast<std::size_t>(j)] * phase;
            phase *= step;
        }
        coeffs[static_cast<std::size_t>(m + n_trunc)] = acc / static_cast<double>(n);
    }
    return DiskHarmonic(std::move(coeffs), n_trunc);
}

cplx eval_harmonic(const DiskHarmonic& u, cplx z) { return u.eval(z); }

std::pair<cplx, cplx> wirtinger_gradient(const DiskHarmonic& u, cplx z) { return u.wirtinger(z); }

double disk_dirichlet_energy(const DiskHarmonic& u, double p, const DiskQuadSpec& quad) {
    if (p < 2.0) throw std::invalid_argument("p-Dirichlet energy requires p >= 2");
    GaussLegendre radial(quad.radial_order, 0.0, 1.0);
    const int na = quad.angular_order;

    // (1/2pi) int_0^1 int_0^{2pi} (|U_w|+|U_wbar|)^p (1-r^2)^{p-2} r dt dr,
    // trapezoid in the angle (periodic), Gauss-Legendre in the radius.
    double total = chunked_sum(static_cast<std::size_t>(quad.radial_order), [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t ir = lo; ir < hi; ++ir) {
            double r = radial.nodes[ir];
            double wr = radial.weights[ir];
            double ring = 0.0;
            for (int ia = 0; ia < na; ++ia) {
                cplx z = std::polar(r, 2.0 * kPi * ia / na);
                auto [uw, uwb] = u.wirtinger(z);
                ring += std::pow(std::abs(uw) + std::abs(uwb), p);
            }
            double weight = (p == 2.0) ? 1.0 : std::pow(1.0 - r * r, p - 2.0);
            acc += wr * r * weight * ring * (2.0 * kPi / na);
        }
        return acc;
    }, 32);
    return total / (2.0 * kPi);
}

double disk_dirichlet_energy_converged(const DiskHarmonic& u, double p, DiskQuadSpec start,
                                       double rel_tol, int max_doublings) {
    double prev = disk_dirichlet_energy(u, p, start);
    for (int i = 0; i < max_doublings; ++i) {
        start.radial_order *= 2;
        start.angular_order *= 2;
        double next = disk_dirichlet_energy(u, p, start);
        double denom = std::max(std::abs(next), 1e-300);
        if (std::abs(next - prev) / denom < rel_tol) return next;
        prev = next;
    }
    return prev;
}

double circle_besov_seminorm(const std::vector<cplx>& samples, double p) {
    if (p < 2.0) throw std::invalid_argument("Besov seminorm requires p >= 2");
    const int n = static_cast<int>(samples.size());
    if (n < 16) throw std::invalid_argument("Besov seminorm needs at least 16 samples");
    const double dt = 2.0 * kPi / n;

    // Chord table |e^{it_j} - e^{it_k}|^2 depends only on j-k.
    std::vector<double> chord2(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        double s = 2.0 * std::sin(0.5 * dt * m);
        chord2[static_cast<std::size_t>(m)] = s * s;
    }

    double sum = chunked_sum(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
                if (k == j) continue;
                int m = static_cast<int>(k > j ? k - j : j - k);
                double diff = std::abs(samples[j] - samples[k]);
                acc += std::pow(diff, p) / chord2[static_cast<std::size_t>(m)];
            }
        }
        return acc;
    });

    if (p == 2.0) {
        // Diagonal limit |u'(t)|^2 via centered differences.
        for (int j = 0; j < n; ++j) {
            cplx du = (samples[static_cast<std::size_t>((j + 1) % n)] - samples[static_cast<std::size_t>((j + n - 1) % n)]) / (2.0 * dt);
            sum += std::norm(du);
        }
    }

    double value_p = sum * dt * dt / (4.0 * kPi * kPi);
    return std::pow(value_p, 1.0 / p);
}

} // namespace lab
