#include "crflow/legendrian_path.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace crflow {

HorizontalFrame horizontal_frame(const SpherePoint& p) {
    HorizontalFrame f;
    f.e1_z1 = -0.5 * std::conj(p.z2);
    f.e1_z2 = 0.5 * std::conj(p.z1);
    f.e2_z1 = kI * f.e1_z1;
    f.e2_z2 = kI * f.e1_z2;
    return f;
}

namespace {

double chordal2(const SpherePoint& a, const SpherePoint& b) {
    return std::norm(a.z1 - b.z1) + std::norm(a.z2 - b.z2);
}

}  // namespace

LegendrianPath integrate_path(const SpherePoint& x1, const Eigen::ArrayXd& u1,
                              const Eigen::ArrayXd& u2, double t1, double t2, int substeps) {
    if (u1.size() != u2.size() || u1.size() < 2)
        throw UsageError("integrate_path: need matching control arrays with >= 2 segments");
    if (!(t2 > t1)) throw UsageError("integrate_path: need t2 > t1");
    if (substeps < 1) throw UsageError("integrate_path: substeps must be >= 1");

    const int N = static_cast<int>(u1.size());
    const double h = (t2 - t1) / (N * substeps);

    LegendrianPath path;
    path.t1 = t1;
    path.t2 = t2;
    path.u1 = u1;
    path.u2 = u2;
    path.substeps = substeps;
    path.fine.reserve(N * substeps + 1);
    path.fine_t.reserve(N * substeps + 1);
    path.fine.push_back(x1);
    path.fine_t.push_back(t1);

    cplx z1 = x1.z1, z2 = x1.z2;
    for (int s = 0; s < N; ++s) {
        const cplx w(u1[s], u2[s]);
        // dz/dt = (w/2)(-conj(z2), conj(z1)); classical RK4 with constant w,
        // renormalized to S^3 after every substep.
        auto f1 = [&](cplx a2) { return -0.5 * w * std::conj(a2); };
        auto f2 = [&](cplx a1) { return 0.5 * w * std::conj(a1); };
        for (int m = 0; m < substeps; ++m) {
            const cplx k1a = f1(z2), k1b = f2(z1);
            const cplx k2a = f1(z2 + 0.5 * h * k1b), k2b = f2(z1 + 0.5 * h * k1a);
            const cplx k3a = f1(z2 + 0.5 * h * k2b), k3b = f2(z1 + 0.5 * h * k2a);
            const cplx k4a = f1(z2 + h * k3b), k4b = f2(z1 + h * k3a);
            z1 += (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
            z2 += (h / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
            const double r = std::sqrt(std::norm(z1) + std::norm(z2));
            if (std::abs(r - 1.0) > 1e-6)
                throw DataError("integrate_path: sphere drift " + std::to_string(std::abs(r - 1.0)) +
                                " in one substep; reduce the step size");
            z1 /= r;
            z2 /= r;
            path.fine.push_back(SpherePoint(z1, z2));
            path.fine_t.push_back(t1 + (static_cast<double>(s) * substeps + m + 1) * h);
        }
    }
    path.fine_t.back() = t2;
    return path;
}

double action(const LegendrianPath& path, const FlowFieldInterpolator& lam) {
    const int N = path.n_segments();
    const int m = path.substeps;
    const double h = (path.t2 - path.t1) / (N * m);
    double acc = 0.0;
    // e^{2 lambda} at each fine node, trapezoid within each segment so control
    // jumps at segment boundaries are handled exactly.
    for (int s = 0; s < N; ++s) {
        const double speed2 = path.u1[s] * path.u1[s] + path.u2[s] * path.u2[s];
        if (speed2 == 0.0) continue;
        double seg = 0.0;
        for (int i = 0; i <= m; ++i) {
            const int n = s * m + i;
            const double g = std::exp(2.0 * lam.lambda_at(path.fine[n], path.fine_t[n]));
            seg += (i == 0 || i == m) ? 0.5 * g : g;
        }
        acc += speed2 * seg * h;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Action minimization

namespace {

using Objective = std::function<double(const Eigen::VectorXd&)>;

Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x) {
    const double eps = 1e-6;
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd p = x;
    for (int i = 0; i < x.size(); ++i) {
        const double xi = p[i];
        p[i] = xi + eps;
        const double fp = f(p);
        p[i] = xi - eps;
        const double fm = f(p);
        p[i] = xi;
        g[i] = (fp - fm) / (2.0 * eps);
    }
    return g;
}

// BFGS with Armijo backtracking; terminates on relative objective change
// below 1e-8 or a small gradient.
double bfgs(const Objective& f, Eigen::VectorXd& x, int max_iter = 200) {
    const int d = static_cast<int>(x.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d);
    double fx = f(x);
    Eigen::VectorXd g = fd_gradient(f, x);
    for (int it = 0; it < max_iter; ++it) {
        if (g.norm() < 1e-10) break;
        Eigen::VectorXd dir = -H * g;
        if (dir.dot(g) >= 0) {  // curvature update went bad; reset
            H.setIdentity();
            dir = -g;
        }
        double step = 1.0;
        const double slope = g.dot(dir);
        double f_new = fx;
        Eigen::VectorXd x_new = x;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            x_new = x + step * dir;
            f_new = f(x_new);
            if (f_new <= fx + 1e-4 * step * slope) {
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
        Eigen::VectorXd g_new = fd_gradient(f, x_new);
        Eigen::VectorXd sv = x_new - x, yv = g_new - g;
        const double sy = sv.dot(yv);
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            Eigen::MatrixXd V = Eigen::MatrixXd::Identity(d, d) - rho * sv * yv.transpose();
            H = V * H * V.transpose() + rho * sv * sv.transpose();
        }
        const double drop = fx - f_new;
        x = std::move(x_new);
        g = std::move(g_new);
        fx = f_new;
        if (drop <= 1e-8 * std::max(1.0, std::abs(fx))) break;
    }
    return fx;
}

}  // namespace

MinimizeResult minimize_action(const SpherePoint& x1, double t1, const SpherePoint& x2, double t2,
                               const FlowFieldInterpolator& lam, int n_segments,
                               std::uint32_t seed) {
    if (!(t2 > t1)) throw UsageError("minimize_action: need t2 > t1");
    if (n_segments < 2) throw UsageError("minimize_action: need >= 2 segments");
    const int N = n_segments, d = 2 * N;

    auto build = [&](const Eigen::VectorXd& u) {
        return integrate_path(x1, u.head(N).array(), u.tail(N).array(), t1, t2);
    };
    // Controls extreme enough to trip the integrator's drift guard are treated
    // as infinitely bad rather than fatal, so line searches back off of them.
    auto defect_of = [&](const Eigen::VectorXd& u) {
        try {
            return std::sqrt(chordal2(build(u).end(), x2));
        } catch (const DataError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    // --- seeds: stationary, best two-arc constant controls, random vectors.
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-3.0, 3.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Eigen::VectorXd> seeds;
    seeds.push_back(Eigen::VectorXd::Zero(d));
    {
        std::vector<std::pair<double, Eigen::VectorXd>> arcs;
        for (int trial = 0; trial < 60; ++trial) {
            Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
            const double a1 = amp(rng), a2 = amp(rng), b1 = amp(rng), b2 = amp(rng);
            for (int s = 0; s < N; ++s) {
                const bool second = s >= N / 2;
                u[s] = second ? b1 : a1;
                u[N + s] = second ? b2 : a2;
            }
            arcs.emplace_back(defect_of(u), u);
        }
        std::sort(arcs.begin(), arcs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (int i = 0; i < 3 && i < static_cast<int>(arcs.size()); ++i)
            seeds.push_back(arcs[i].second);
    }
    for (int r = 0; r < 3; ++r) {
        Eigen::VectorXd u(d);
        for (int i = 0; i < d; ++i) u[i] = gauss(rng);
        seeds.push_back(u);
    }

    const double defect_tol = 1e-6;
    MinimizeResult best;
    best.best_defect = std::numeric_limits<double>::infinity();

    for (Eigen::VectorXd u : seeds) {
        double mu = 10.0;
        for (int round = 0; round < 6; ++round) {
            Objective obj = [&](const Eigen::VectorXd& v) {
                try {
                    LegendrianPath p = build(v);
                    return action(p, lam) + mu * chordal2(p.end(), x2);
                } catch (const DataError&) {
                    return std::numeric_limits<double>::infinity();
                }
            };
            bfgs(obj, u);
            if (defect_of(u) <= defect_tol) break;
            mu *= 10.0;
        }
        if (!std::isfinite(defect_of(u))) continue;
        // Gauss-Newton endpoint polish: damped least-squares steps on the
        // endpoint residual alone, to push the defect well under tolerance.
        for (int it = 0; it < 8; ++it) try {
            LegendrianPath p = build(u);
            Eigen::Vector4d res(p.end().z1.real() - x2.z1.real(),
                                p.end().z1.imag() - x2.z1.imag(),
                                p.end().z2.real() - x2.z2.real(),
                                p.end().z2.imag() - x2.z2.imag());
            if (res.norm() <= 1e-9) break;
            const double eps = 1e-6;
            Eigen::MatrixXd J(4, d);
            Eigen::VectorXd v = u;
            for (int i = 0; i < d; ++i) {
                const double vi = v[i];
                v[i] = vi + eps;
                SpherePoint ep = build(v).end();
                v[i] = vi;
                J(0, i) = (ep.z1.real() - p.end().z1.real()) / eps;
                J(1, i) = (ep.z1.imag() - p.end().z1.imag()) / eps;
                J(2, i) = (ep.z2.real() - p.end().z2.real()) / eps;
                J(3, i) = (ep.z2.imag() - p.end().z2.imag()) / eps;
            }
            Eigen::MatrixXd JJt = J * J.transpose() + 1e-12 * Eigen::Matrix4d::Identity();
            Eigen::VectorXd du = -J.transpose() * JJt.ldlt().solve(res);
            if (std::sqrt(chordal2(build(u + du).end(), x2)) < res.norm())
                u += du;
            else
                break;
        } catch (const DataError&) {
            break;
        }

        LegendrianPath p = build(u);
        p.defect = std::sqrt(chordal2(p.end(), x2));
        best.best_defect = std::min(best.best_defect, p.defect);
        if (p.defect <= defect_tol) {
            const double a = action(p, lam);
            if (!best.feasible || a < best.L_hat) {
                best.feasible = true;
                best.L_hat = a;
                best.path = std::move(p);
            }
        }
    }
    return best;
}

HarnackCheck integrated_harnack_check(const SpherePoint& x1, double t1, const SpherePoint& x2, double t2,
                             const FlowFieldInterpolator& lam, int n_segments,
                             std::uint32_t seed) {
    if (t2 < t1) throw UsageError("integrated_harnack_check: need t2 >= t1");
    HarnackCheck chk;
    const double w1 = lam.w_at(x1, t1);
    if (!(w1 > 1e-10))
        throw HypothesisError("integrated_harnack_check: W(x1, t1) = " + std::to_string(w1) +
                              " is below the positivity floor");
    chk.lhs = lam.w_at(x2, t2) / w1;
    if (t2 - t1 < 1e-12) {
        // Zero time budget: only coincident endpoints are admissible.
        if (chordal2(x1, x2) > 1e-16)
            throw UsageError("integrated_harnack_check: t1 = t2 with distinct endpoints");
        chk.L_hat = 0.0;
        chk.rhs = 1.0;
        chk.pass = chk.lhs >= chk.rhs - 1e-12;
        return chk;
    }
    MinimizeResult m = minimize_action(x1, t1, x2, t2, lam, n_segments, seed);
    chk.defect = m.feasible ? m.path.defect : m.best_defect;
    if (!m.feasible) {
        chk.pass = false;
        return chk;
    }
    chk.L_hat = m.L_hat;
    chk.rhs = (t1 / t2) * (t1 / t2) * std::exp(-m.L_hat / 16.0);
    chk.pass = chk.lhs >= chk.rhs - 1e-12;
    return chk;
}

}  // namespace crflow
