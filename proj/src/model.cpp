#include "hpa/model.hpp"

#include <cmath>

namespace hpa {

HillFeedback::HillFeedback(double k, double eta, double c, double alpha)
    : k_(k), eta_(eta), c_(c), alpha_(alpha) {
    if (!(k > 0.0))
        throw validation_error("HillFeedback: k must be positive");
    if (!(eta > 0.0 && eta <= 1.0))
        throw validation_error("HillFeedback: eta must be in (0,1]");
    if (!(c > 0.0))
        throw validation_error("HillFeedback: c must be positive");
    if (!(alpha >= 1.0))
        throw validation_error("HillFeedback: alpha must be >= 1");
}

double HillFeedback::sat(double u) const {
    // u^a/(c^a+u^a), written to avoid overflow of u^a for extreme u
    if (u <= 0.0)
        return 0.0;
    if (u <= c_) {
        const double r = std::pow(u / c_, alpha_);
        return r / (1.0 + r);
    }
    const double r = std::pow(c_ / u, alpha_);
    return 1.0 / (1.0 + r);
}

double HillFeedback::value(double u) const {
    if (u < 0.0)
        throw validation_error("HillFeedback::value: negative concentration");
    return k_ * (1.0 - eta_ * sat(u));
}

double HillFeedback::deriv(double u) const {
    if (u < 0.0)
        throw validation_error("HillFeedback::deriv: negative concentration");
    if (u == 0.0)
        return alpha_ == 1.0 ? -k_ * eta_ / c_ : 0.0;
    const double rho = sat(u);
    // f'(u) = -k eta alpha rho (1-rho) / u
    return -k_ * eta_ * alpha_ * rho * (1.0 - rho) / u;
}

void SystemParams::validate() const {
    if (!(w1 > 0.0 && w2 > 0.0 && w3 > 0.0 && k3 > 0.0))
        throw validation_error("SystemParams: rates w1,w2,w3,k3 must be positive");
}

SystemParams fit_params(double T1, double T2, double T3, double xbar1,
                        double xbar2, double xbar3, double alpha, double eta,
                        double mu, double c) {
    if (!(T1 > 0 && T2 > 0 && T3 > 0 && xbar1 > 0 && xbar2 > 0 && xbar3 > 0 && c > 0))
        throw validation_error("fit_params: all physiological inputs must be positive");
    if (!(eta > 0 && eta <= 1 && mu > 0 && mu <= 1))
        throw validation_error("fit_params: eta, mu must be in (0,1]");
    if (!(alpha >= 1 && alpha <= 8))
        throw validation_error("fit_params: alpha must be in [1,8]");

    const double ln2 = std::log(2.0);
    const double w1 = ln2 / T1;
    const double w2 = ln2 / T2;
    const double w3 = ln2 / T3;
    const double k3 = w3 * xbar3 / xbar2;

    // target feedback levels pinned by the equilibrium conditions
    const double f1_star = w1 * xbar1;
    const double f2_star = w1 * w2 * w3 / k3 * xbar3 / f1_star;

    const double rho = [&] {
        HillFeedback probe(1.0, 1.0, c, alpha);
        return 1.0 - probe.value(xbar3); // u^a/(c^a+u^a) at u = xbar3
    }();
    const double k1 = f1_star / (1.0 - eta * rho);
    const double k2 = f2_star / (1.0 - mu * rho);

    return SystemParams{w1, w2, w3, k3, HillFeedback(k1, eta, c, alpha),
                        HillFeedback(k2, mu, c, alpha)};
}

Equilibrium find_equilibrium(const SystemParams& p) {
    p.validate();
    const double scale = p.k3 / (p.w1 * p.w2 * p.w3);
    auto g = [&](double x) { return scale * p.f1.value(x) * p.f2.value(x); };

    const double g0 = g(0.0);
    double lo = 0.0, hi = g0;
    // x - g(x) is strictly increasing from -g(0) to a positive value at g(0)
    for (int it = 0; it < 200 && (hi - lo) > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mid - g(mid) > 0.0 ? hi : lo) = mid;
    }
    const double x3 = 0.5 * (lo + hi);
    if (!(std::abs(x3 - g(x3)) < 1e-10 * g0))
        throw solver_error("find_equilibrium: fixed-point bisection did not converge");

    Equilibrium e;
    e.x3 = x3;
    e.x1 = p.f1.value(x3) / p.w1;
    e.x2 = p.w3 / p.k3 * x3;
    e.a = -p.w2 * p.w3 * x3 * p.f2.deriv(x3) / p.f2.value(x3);
    e.b = -p.w1 * p.w2 * p.w3 * x3 * p.f1.deriv(x3) / p.f1.value(x3);
    if (!(e.a > 0.0 && e.b > 0.0))
        throw solver_error("find_equilibrium: nonpositive linearization gain");
    return e;
}

} // namespace hpa
