#include "hpa/stability.hpp"

#include <cmath>

namespace hpa {

namespace {
constexpr double kI2BoundaryTol = 1e-12;
}

StabilityReport check_inequalities(const SystemParams& p, const Equilibrium& e) {
    const double x = e.x3;
    const double f1 = p.f1.value(x), f1p = p.f1.deriv(x);
    const double f2 = p.f2.value(x), f2p = p.f2.deriv(x);

    StabilityReport r;
    r.i1_holds = 8.0 * f1 + x * f1p >= 0.0;

    const double S = 1.0 + x * f1p / f1 + x * f2p / f2;
    r.s_value = S;
    if (S > kI2BoundaryTol)
        r.i2_sign = I2Sign::holds;
    else if (S < -kI2BoundaryTol)
        r.i2_sign = I2Sign::fails;
    else
        r.i2_sign = I2Sign::boundary;

    auto& rh = r.routh;
    rh.c1 = p.w1 + p.w2 + p.w3;
    rh.c2 = p.w1 * p.w2 + p.w2 * p.w3 + p.w1 * p.w3 + e.a;
    rh.c3 = p.w1 * p.w2 * p.w3 + e.a * p.w1 + e.b;
    rh.c1c2_minus_c3 = rh.c1 * rh.c2 - rh.c3;
    rh.stable = rh.c1 > 0 && rh.c2 > 0 && rh.c3 > 0 && rh.c1c2_minus_c3 > 0;
    return r;
}

std::complex<double> char_eval(std::complex<double> z, const SystemParams& p,
                               const Equilibrium& e, const KernelSet& ks) {
    const auto [H2H32, H1H2H31] = combined_laplace(ks, z);
    return (z + p.w1) * (z + p.w2) * (z + p.w3) + e.a * (z + p.w1) * H2H32 +
           e.b * H1H2H31;
}

double char_scale(std::complex<double> z, const SystemParams& p,
                  const Equilibrium& e, const KernelSet& ks) {
    const auto [H2H32, H1H2H31] = combined_laplace(ks, z);
    return std::abs((z + p.w1) * (z + p.w2) * (z + p.w3)) +
           std::abs(e.a * (z + p.w1) * H2H32) + std::abs(e.b * H1H2H31);
}

QPoint q_eval(double omega, const SystemParams& p, const Equilibrium& e) {
    if (!(omega >= 0.0))
        throw validation_error("q_eval: omega must be >= 0");
    const std::complex<double> z(0.0, omega);
    const std::complex<double> value =
        -(e.a * p.w1 + e.b + e.a * z) /
        ((z + p.w1) * (z + p.w2) * (z + p.w3));

    const double om2 = omega * omega;
    const double d1 = om2 + p.w1 * p.w1;
    const double d2 = om2 + p.w2 * p.w2;
    const double d3 = om2 + p.w3 * p.w3;
    const double aw1b = e.a * p.w1 + e.b;

    QPoint q;
    q.value = value;
    q.modulus = std::sqrt((e.a * e.a * om2 + aw1b * aw1b) / (d1 * d2 * d3));
    q.re = (e.a * om2 * om2 +
            (e.b * (p.w1 + p.w2 + p.w3) + e.a * (p.w1 * p.w1 - p.w2 * p.w3)) * om2 -
            p.w1 * p.w2 * p.w3 * aw1b) /
           (d1 * d2 * d3);

    // internal consistency of the direct evaluation against the closed forms
    if (std::abs(std::abs(value) - q.modulus) > 1e-10 * (1.0 + q.modulus) ||
        std::abs(value.real() - q.re) > 1e-10 * (1.0 + std::abs(q.re)))
        throw solver_error("q_eval: closed-form cross-check failed");
    return q;
}

std::complex<double> q_logderiv(double omega, const SystemParams& p,
                                const Equilibrium& e) {
    const std::complex<double> z(0.0, omega);
    return e.a / (e.a * z + e.a * p.w1 + e.b) -
           (1.0 / (z + p.w1) + 1.0 / (z + p.w2) + 1.0 / (z + p.w3));
}

std::array<std::complex<double>, 3> cubic_roots(double c1, double c2, double c3) {
    using cplx = std::complex<double>;
    // depressed cubic t^3 + p t + q with z = t - c1/3
    const double shift = c1 / 3.0;
    const double pp = c2 - c1 * c1 / 3.0;
    const double qq = 2.0 * c1 * c1 * c1 / 27.0 - c1 * c2 / 3.0 + c3;
    const double disc = qq * qq / 4.0 + pp * pp * pp / 27.0;

    std::array<cplx, 3> roots;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        const double u = std::cbrt(-qq / 2.0 + s);
        const double v = std::cbrt(-qq / 2.0 - s);
        roots[0] = u + v;
        const cplx im(0.0, std::sqrt(3.0) / 2.0 * (u - v));
        roots[1] = -0.5 * (u + v) + im;
        roots[2] = -0.5 * (u + v) - im;
    } else {
        // three real roots, trigonometric form
        const double r = std::sqrt(-pp * pp * pp / 27.0);
        const double phi = std::acos(-qq / (2.0 * r));
        const double m = 2.0 * std::sqrt(-pp / 3.0);
        for (int k = 0; k < 3; ++k)
            roots[k] = m * std::cos((phi + 2.0 * M_PI * k) / 3.0);
    }

    auto poly = [&](cplx z) { return ((z + c1) * z + c2) * z + c3; };
    auto dpoly = [&](cplx z) { return (3.0 * z + 2.0 * c1) * z + c2; };
    for (auto& root : roots) {
        root -= shift;
        const cplx d = dpoly(root);
        if (std::abs(d) > 0.0)
            root -= poly(root) / d; // one Newton polish
    }
    return roots;
}

bool matignon_check(const SystemParams& p, const Equilibrium& e, double q) {
    if (!(q > 0.0 && q <= 1.0))
        throw validation_error("matignon_check: q must be in (0,1]");
    // Jacobian at E:
    //   [-w1      0     f1'(x3)    ]
    //   [f2(x3)  -w2    x1 f2'(x3) ]
    //   [0        k3   -w3         ]
    // has characteristic polynomial z^3 + c1 z^2 + c2 z + c3 with the
    // Routh coefficients of the non-delayed case.
    const auto rep = check_inequalities(p, e);
    const auto roots = cubic_roots(rep.routh.c1, rep.routh.c2, rep.routh.c3);
    const double sector = q * M_PI / 2.0;
    for (const auto& lambda : roots) {
        if (std::abs(std::arg(lambda)) <= sector)
            return false;
    }
    return true;
}

} // namespace hpa
