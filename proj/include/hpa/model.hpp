#pragma once

#include "hpa/errors.hpp"

namespace hpa {

/// Saturating negative-feedback nonlinearity
///
///     f(u) = k * (1 - eta * u^alpha / (c^alpha + u^alpha))
///
/// strictly decreasing and positive on [0, inf) for eta in (0,1].
/// Units: k carries the output unit, c and u the concentration unit (pg/ml).
class HillFeedback {
  public:
    HillFeedback(double k, double eta, double c, double alpha);

    /// f(u). Throws validation_error for u < 0. Range (k*(1-eta), k].
    double value(double u) const;

    /// Analytic derivative f'(u) = -k*eta*alpha*u^(alpha-1)*c^alpha/(c^alpha+u^alpha)^2.
    /// Always <= 0; throws validation_error for u < 0.
    double deriv(double u) const;

    double k() const { return k_; }
    double eta() const { return eta_; }
    double c() const { return c_; }
    double alpha() const { return alpha_; }

  private:
    double k_, eta_, c_, alpha_;

    // saturation fraction u^a/(c^a+u^a), evaluated overflow-safely
    double sat(double u) const;
};

/// Rates and feedbacks of the three-hormone axis:
///   x1' = f1(<x3>) - w1*x1
///   x2' = f2(<x3>)*<x1> - w2*x2
///   x3' = k3*<x2> - w3*x3
/// where <.> denotes a (possibly delayed/distributed) pathway read.
/// Rates in min^-1, concentrations in pg/ml.
struct SystemParams {
    double w1, w2, w3; ///< elimination rates, min^-1
    double k3;         ///< cortisol production gain, min^-1
    HillFeedback f1;   ///< CORT -> CRH negative feedback
    HillFeedback f2;   ///< CORT -> ACTH negative feedback

    /// Throws validation_error unless all rates are strictly positive.
    void validate() const;
};

/// The unique steady state plus the linearization gains that drive the
/// characteristic equation.
struct Equilibrium {
    double x1; ///< CRH, pg/ml
    double x2; ///< ACTH, pg/ml
    double x3; ///< free CORT, pg/ml
    double a;  ///< -(k3/w1) f1(x3) f2'(x3) = -w2 w3 x3 f2'(x3)/f2(x3) > 0, min^-2
    double b;  ///< -k3 f1'(x3) f2(x3)     = -w1 w2 w3 x3 f1'(x3)/f1(x3) > 0, min^-3
};

/// Derive SystemParams from plasma half-lives T_i (min), 24-h hormone means
/// xbar_i (pg/ml) and the feedback shape (alpha, eta, mu, c).
///
/// w_i = ln2/T_i, k3 = w3*xbar3/xbar2, and k1,k2 are chosen so that the
/// resulting equilibrium sits exactly at (xbar1, xbar2, xbar3).
///
/// Preconditions: all inputs > 0, eta,mu in (0,1], alpha in [1,8].
SystemParams fit_params(double T1, double T2, double T3,
                        double xbar1, double xbar2, double xbar3,
                        double alpha, double eta, double mu, double c);

/// Compute the unique equilibrium by bisection on x - g(x) with
/// g(x) = k3/(w1 w2 w3) * f1(x) * f2(x), which is strictly decreasing.
/// Residual |x3 - g(x3)| < 1e-10 * g(0) guaranteed; throws solver_error
/// otherwise.
Equilibrium find_equilibrium(const SystemParams& p);

} // namespace hpa
