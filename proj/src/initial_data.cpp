#include "crflow/initial_data.hpp"

#include <cmath>
#include <random>

namespace crflow {

void Section5Params::validate() const {
    const double lhs = std::abs(c);
    const double rhs = std::sqrt(std::norm(a) + std::norm(b));
    if (!(lhs > rhs))
        throw ConfigError("Section5Params: need |c| > sqrt(|a|^2 + |b|^2), got |c| = " +
                          std::to_string(lhs) + " vs " + std::to_string(rhs));
}

namespace {

cplx u_of(const Section5Params& p, const SpherePoint& x) { return p.a * x.z1 + p.b * x.z2 + p.c; }
cplx v_of(const Section5Params& p, const SpherePoint& x) {
    return p.b * std::conj(x.z1) - p.a * std::conj(x.z2);
}

}  // namespace

ScalarField section5_lambda(const Section5Params& p, const GridPtr& g) {
    p.validate();
    return sample(g, [&](const SpherePoint& x) { return -std::log(std::abs(u_of(p, x))); });
}

ScalarField section5_W_oracle(const Section5Params& p, const GridPtr& g) {
    p.validate();
    return sample(g, [&](const SpherePoint& x) {
        const cplx u = u_of(p, x);
        const cplx v = v_of(p, x);
        return std::norm(u) - 2.0 * std::real((u - p.c) * std::conj(u)) - std::norm(v);
    });
}

cplx section5_lambda1(const Section5Params& p, const SpherePoint& x) {
    return -v_of(p, x) / (2.0 * std::sqrt(2.0) * u_of(p, x));
}

cplx section5_lambda11(const Section5Params& p, const SpherePoint& x) {
    const cplx u = u_of(p, x), v = v_of(p, x);
    return v * v / (4.0 * u * u);
}

TorsionFreeReport verify_torsion_free(const Section5Params& p, const GridPtr& g) {
    ScalarField lam = section5_lambda(p, g);
    ComplexField l1 = frame_derivative(lam, Dir::Z1);
    ComplexField l11 = frame_derivative(l1, Dir::Z1);
    Eigen::ArrayXcd residual = l11.v - 2.0 * l1.v.square();
    // A_11 = e^{-2 lambda} (2i lambda_{,11} - 4i lambda_{,1}^2), so its modulus
    // is twice the identity residual weighted by the conformal factor.
    Eigen::ArrayXd torsion_abs = 2.0 * (-2.0 * lam.v).exp() * residual.abs();

    double exact = 0.0;
    for (long n = 0; n < g->n_nodes(); ++n) {
        const SpherePoint x = g->point(n);
        const cplx r = section5_lambda11(p, x) -
                       2.0 * section5_lambda1(p, x) * section5_lambda1(p, x);
        exact = std::max(exact, std::abs(r));
    }
    return {residual.abs().maxCoeff(), torsion_abs.maxCoeff(), exact};
}

// ---------------------------------------------------------------------------
// PolyField

PolyField PolyField::constant(cplx c) {
    PolyField p;
    if (c != 0.0) p.terms[{0, 0, 0, 0}] = c;
    return p;
}

PolyField PolyField::monomial(int a1, int a2, int b1, int b2, cplx coeff) {
    PolyField p;
    if (coeff != 0.0)
        p.terms[{static_cast<std::int16_t>(a1), static_cast<std::int16_t>(a2),
                 static_cast<std::int16_t>(b1), static_cast<std::int16_t>(b2)}] = coeff;
    return p;
}

PolyField& PolyField::add_term(const Monomial& m, cplx coeff) {
    auto [it, inserted] = terms.try_emplace(m, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0.0) terms.erase(it);
    }
    return *this;
}

PolyField PolyField::conjugate() const {
    PolyField out;
    out.sqrt2_pow = sqrt2_pow;
    for (const auto& [m, c] : terms) out.terms[{m.b1, m.b2, m.a1, m.a2}] = std::conj(c);
    return out;
}

cplx PolyField::eval(const SpherePoint& x) const {
    cplx acc = 0.0;
    for (const auto& [m, c] : terms) {
        cplx t = c;
        for (int i = 0; i < m.a1; ++i) t *= x.z1;
        for (int i = 0; i < m.a2; ++i) t *= x.z2;
        for (int i = 0; i < m.b1; ++i) t *= std::conj(x.z1);
        for (int i = 0; i < m.b2; ++i) t *= std::conj(x.z2);
        acc += t;
    }
    return acc * std::pow(2.0, -0.5 * sqrt2_pow);
}

int PolyField::degree() const {
    int d = 0;
    for (const auto& [m, c] : terms) d = std::max(d, m.a1 + m.a2 + m.b1 + m.b2);
    return d;
}

namespace {

// Aligns q to the sqrt2 power of the result (pow >= q.sqrt2_pow); the scale
// 2^{(pow - q.sqrt2_pow)/2} is exact in floating point for even differences.
void accumulate_scaled(PolyField& out, const PolyField& q, double sign) {
    const int diff = out.sqrt2_pow - q.sqrt2_pow;
    const double scale = sign * std::pow(2.0, 0.5 * diff);
    for (const auto& [m, c] : q.terms) out.add_term(m, scale * c);
}

}  // namespace

PolyField operator+(const PolyField& p, const PolyField& q) {
    PolyField out;
    out.sqrt2_pow = std::max(p.sqrt2_pow, q.sqrt2_pow);
    accumulate_scaled(out, p, 1.0);
    accumulate_scaled(out, q, 1.0);
    return out;
}

PolyField operator-(const PolyField& p, const PolyField& q) {
    PolyField out;
    out.sqrt2_pow = std::max(p.sqrt2_pow, q.sqrt2_pow);
    accumulate_scaled(out, p, 1.0);
    accumulate_scaled(out, q, -1.0);
    return out;
}

PolyField operator*(const PolyField& p, const PolyField& q) {
    PolyField out;
    out.sqrt2_pow = p.sqrt2_pow + q.sqrt2_pow;
    for (const auto& [m, c] : p.terms)
        for (const auto& [n, d] : q.terms)
            out.add_term({static_cast<std::int16_t>(m.a1 + n.a1),
                          static_cast<std::int16_t>(m.a2 + n.a2),
                          static_cast<std::int16_t>(m.b1 + n.b1),
                          static_cast<std::int16_t>(m.b2 + n.b2)},
                         c * d);
    return out;
}

PolyField operator*(cplx c, const PolyField& p) {
    PolyField out;
    out.sqrt2_pow = p.sqrt2_pow;
    for (const auto& [m, k] : p.terms)
        if (c * k != 0.0) out.terms[m] = c * k;
    return out;
}

PolyField poly_frame_derivative(const PolyField& f, Dir d) {
    PolyField out;
    if (d == Dir::T) {
        out.sqrt2_pow = f.sqrt2_pow + 2;
        for (const auto& [m, c] : f.terms) {
            const int w = m.a1 + m.a2 - m.b1 - m.b2;
            if (w != 0) out.add_term(m, kI * static_cast<double>(w) * c);
        }
        return out;
    }
    out.sqrt2_pow = f.sqrt2_pow + 1;
    const bool bar = (d == Dir::Z1bar);
    for (const auto& [m, c] : f.terms) {
        // Z1 = conj(z1) d/dz2 - conj(z2) d/dz1 (times 1/sqrt2);
        // Z1bar = z1 d/d(conj z2) - z2 d/d(conj z1).
        if (!bar) {
            if (m.a2 > 0)
                out.add_term({m.a1, static_cast<std::int16_t>(m.a2 - 1),
                              static_cast<std::int16_t>(m.b1 + 1), m.b2},
                             static_cast<double>(m.a2) * c);
            if (m.a1 > 0)
                out.add_term({static_cast<std::int16_t>(m.a1 - 1), m.a2, m.b1,
                              static_cast<std::int16_t>(m.b2 + 1)},
                             -static_cast<double>(m.a1) * c);
        } else {
            if (m.b2 > 0)
                out.add_term({static_cast<std::int16_t>(m.a1 + 1), m.a2, m.b1,
                              static_cast<std::int16_t>(m.b2 - 1)},
                             static_cast<double>(m.b2) * c);
            if (m.b1 > 0)
                out.add_term({m.a1, static_cast<std::int16_t>(m.a2 + 1),
                              static_cast<std::int16_t>(m.b1 - 1), m.b2},
                             -static_cast<double>(m.b1) * c);
        }
    }
    return out;
}

ComplexField sample_poly(const PolyField& f, const GridPtr& g) {
    return sample_complex(g, [&](const SpherePoint& x) { return f.eval(x); });
}

std::pair<ScalarField, PolyField> random_smooth_field(const GridPtr& g, std::uint32_t seed,
                                                      int max_degree) {
    if (max_degree < 0 || max_degree > 4)
        throw UsageError("random_smooth_field: max_degree must be in [0, 4]");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    PolyField p;
    for (int a1 = 0; a1 <= max_degree; ++a1)
        for (int a2 = 0; a1 + a2 <= max_degree; ++a2)
            for (int b1 = 0; a1 + a2 + b1 <= max_degree; ++b1)
                for (int b2 = 0; a1 + a2 + b1 + b2 <= max_degree; ++b2)
                    p.add_term({static_cast<std::int16_t>(a1), static_cast<std::int16_t>(a2),
                                static_cast<std::int16_t>(b1), static_cast<std::int16_t>(b2)},
                               {coeff(rng), coeff(rng)});
    PolyField real_p = p + p.conjugate();
    ScalarField f(g);
    for (long n = 0; n < g->n_nodes(); ++n) f.v[n] = std::real(real_p.eval(g->point(n)));
    return {std::move(f), std::move(real_p)};
}

}  // namespace crflow
