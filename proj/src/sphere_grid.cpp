#include "crflow/sphere_grid.hpp"

#include <cmath>

namespace crflow {

namespace {

double wrap_2pi(double x) {
    x = std::fmod(x, 2.0 * kPi);
    if (x < 0) x += 2.0 * kPi;
    return x;
}

}  // namespace

SpherePoint::SpherePoint(cplx a, cplx b) : z1(a), z2(b) {
    double r2 = std::norm(z1) + std::norm(z2);
    if (std::abs(r2 - 1.0) > 1e-12)
        throw DataError("SpherePoint: |z1|^2 + |z2|^2 deviates from 1 by " +
                        std::to_string(std::abs(r2 - 1.0)));
}

SpherePoint SpherePoint::project(cplx a, cplx b) {
    double r = std::sqrt(std::norm(a) + std::norm(b));
    if (!(r > 0.0) || !std::isfinite(r))
        throw DataError("SpherePoint::project: cannot project the origin or a non-finite point");
    return SpherePoint(a / r, b / r);
}

double SpherePoint::eta() const { return std::atan2(std::abs(z2), std::abs(z1)); }
double SpherePoint::xi1() const { return wrap_2pi(std::arg(z1)); }
double SpherePoint::xi2() const { return wrap_2pi(std::arg(z2)); }

FrameCoefficients frame_at(const SpherePoint& p) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    FrameCoefficients f;
    f.z1_dz1 = -std::conj(p.z2) * inv_sqrt2;
    f.z1_dz2 = std::conj(p.z1) * inv_sqrt2;
    f.t_dz1 = kI * p.z1 * 0.5;
    f.t_dz2 = kI * p.z2 * 0.5;
    return f;
}

double theta_of(const SpherePoint& p, cplx v1, cplx v2) {
    return 2.0 * std::imag(std::conj(p.z1) * v1 + std::conj(p.z2) * v2);
}

std::shared_ptr<const HopfGrid> build_grid(int n_eta, int n_xi1, int n_xi2) {
    if (n_eta < 4) throw ConfigError("build_grid: n_eta must be >= 4, got " + std::to_string(n_eta));
    if (n_xi1 < 4) throw ConfigError("build_grid: n_xi1 must be >= 4, got " + std::to_string(n_xi1));
    if (n_xi2 < 4) throw ConfigError("build_grid: n_xi2 must be >= 4, got " + std::to_string(n_xi2));
    if (n_xi1 % 2 || n_xi2 % 2)
        throw ConfigError("build_grid: xi counts must be even for spectral differentiation");

    auto g = std::make_shared<HopfGrid>();
    g->n_eta = n_eta;
    g->n_xi1 = n_xi1;
    g->n_xi2 = n_xi2;
    g->h_eta = (kPi / 2.0) / n_eta;
    g->h_xi1 = 2.0 * kPi / n_xi1;
    g->h_xi2 = 2.0 * kPi / n_xi2;

    g->eta = Eigen::ArrayXd::LinSpaced(n_eta, 0.5, n_eta - 0.5) * g->h_eta;
    g->xi1 = Eigen::ArrayXd::LinSpaced(n_xi1, 0.0, n_xi1 - 1.0) * g->h_xi1;
    g->xi2 = Eigen::ArrayXd::LinSpaced(n_xi2, 0.0, n_xi2 - 1.0) * g->h_xi2;

    const long nn = g->n_nodes();
    g->node_eta.resize(nn);
    g->node_xi1.resize(nn);
    g->node_xi2.resize(nn);
    g->z1.resize(nn);
    g->z2.resize(nn);
    g->weight.resize(nn);
    g->tan_eta.resize(nn);
    g->cot_eta.resize(nn);
    g->phase_neg.resize(nn);
    g->phase_cos.resize(nn);
    g->phase_sin.resize(nn);

    for (int k = 0; k < n_eta; ++k) {
        const double eta = g->eta[k];
        // Exact integral of the measure 4 sin(2 eta) over the eta-cell.
        const double eta_lo = k * g->h_eta, eta_hi = (k + 1) * g->h_eta;
        const double w_eta = 2.0 * (std::cos(2.0 * eta_lo) - std::cos(2.0 * eta_hi));
        const double w = w_eta * g->h_xi1 * g->h_xi2;
        for (int i = 0; i < n_xi1; ++i) {
            const double xi1 = g->xi1[i];
            for (int j = 0; j < n_xi2; ++j) {
                const double xi2 = g->xi2[j];
                const long n = g->index(k, i, j);
                g->node_eta[n] = eta;
                g->node_xi1[n] = xi1;
                g->node_xi2[n] = xi2;
                g->z1[n] = std::polar(std::cos(eta), xi1);
                g->z2[n] = std::polar(std::sin(eta), xi2);
                g->weight[n] = w;
                g->tan_eta[n] = std::tan(eta);
                g->cot_eta[n] = 1.0 / std::tan(eta);
                g->phase_neg[n] = std::polar(1.0, -(xi1 + xi2));
                g->phase_cos[n] = std::cos(xi1 + xi2);
                g->phase_sin[n] = std::sin(xi1 + xi2);
            }
        }
    }

    // Fourier differentiation matrix for an even number of uniform nodes:
    // D(i,j) = (1/2) (-1)^(i-j) cot((i-j) h / 2), zero diagonal.  The diagonal
    // is then adjusted to make row sums exactly zero, so constants differentiate
    // to exactly zero in floating point.
    auto spectral_d = [](int n, double h) {
        Eigen::MatrixXd d(n, n);
        for (int i = 0; i < n; ++i) {
            double row_sum = 0.0;
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const int m = i - j;
                const double sign = (m % 2 == 0) ? 1.0 : -1.0;
                d(i, j) = 0.5 * sign / std::tan(0.5 * m * h);
                row_sum += d(i, j);
            }
            d(i, i) = -row_sum;
        }
        return d;
    };
    g->d_xi1 = spectral_d(n_xi1, g->h_xi1);
    g->d_xi2 = spectral_d(n_xi2, g->h_xi2);

    g->perm_bottom.resize(g->n_slab());
    g->perm_top.resize(g->n_slab());
    for (int i = 0; i < n_xi1; ++i) {
        for (int j = 0; j < n_xi2; ++j) {
            const int s = i * n_xi2 + j;
            g->perm_bottom[s] = i * n_xi2 + (j + n_xi2 / 2) % n_xi2;
            g->perm_top[s] = ((i + n_xi1 / 2) % n_xi1) * n_xi2 + j;
        }
    }
    return g;
}

}  // namespace crflow
