#pragma once

#include <array>
#include <complex>

#include "hpa/kernels.hpp"
#include "hpa/model.hpp"

namespace hpa {

/// Sign classification of S = 1 + x*f1'(x*)/f1(x*) + x*f2'(x*)/f2(x*).
/// S > 0 guarantees stability for every delay kernel; S <= 0 is the
/// necessary condition for delay-induced bifurcations.
enum class I2Sign {
    holds,    ///< S > tol: stable for any kernels
    boundary, ///< |S| <= tol
    fails     ///< S < -tol: bifurcations possible
};

/// Routh-Hurwitz data of the non-delayed cubic z^3 + c1 z^2 + c2 z + c3.
struct RouthCriteria {
    double c1, c2, c3;
    double c1c2_minus_c3;
    bool stable; ///< all coefficients and c1*c2-c3 positive
};

struct StabilityReport {
    bool i1_holds;  ///< 8 f1(x*) + x* f1'(x*) >= 0
    I2Sign i2_sign;
    double s_value; ///< the classified quantity S (dimensionless)
    RouthCriteria routh;
};

/// Evaluate the delay-independent stability inequalities and the
/// Routh-Hurwitz test of the non-delayed linearization.
/// Boundary tolerance on S: 1e-12 absolute.
StabilityReport check_inequalities(const SystemParams& p, const Equilibrium& e);

/// Characteristic function of the linearization with kernel set ks:
///   (z+w1)(z+w2)(z+w3) + a(z+w1) H2 H32 + b H1 H2 H31.
std::complex<double> char_eval(std::complex<double> z, const SystemParams& p,
                               const Equilibrium& e, const KernelSet& ks);

/// Sum of the magnitudes of the three characteristic-function terms; the
/// natural scale for residual checks on |char_eval|.
double char_scale(std::complex<double> z, const SystemParams& p,
                  const Equilibrium& e, const KernelSet& ks);

/// Q(i omega) with its two closed-form cross-checks:
///   Q(z) = -(a w1 + b + a z) / ((z+w1)(z+w2)(z+w3))
/// modulus from sqrt((a^2 w^2 + (a w1+b)^2) / prod(w^2 + wi^2)), re from the
/// rational real-part formula. value agrees with both to 1e-10 relative.
struct QPoint {
    std::complex<double> value;
    double modulus;
    double re;
};
QPoint q_eval(double omega, const SystemParams& p, const Equilibrium& e);

/// Q'(i omega)/Q(i omega), analytic:
///   a/(a z + a w1 + b) - sum_i 1/(z + wi)  at z = i omega.
/// Its imaginary part is strictly positive for omega > 0.
std::complex<double> q_logderiv(double omega, const SystemParams& p,
                                const Equilibrium& e);

/// Roots of z^3 + c1 z^2 + c2 z + c3 (real coefficients), via the
/// trigonometric/Cardano closed form plus one Newton polish per root.
std::array<std::complex<double>, 3> cubic_roots(double c1, double c2, double c3);

/// Fractional-order stability of the non-delayed system: true iff every
/// eigenvalue lambda of the Jacobian at E satisfies |arg lambda| > q*pi/2.
/// q in (0,1]; at q=1 this is the classical Re(lambda) < 0 test.
bool matignon_check(const SystemParams& p, const Equilibrium& e, double q);

} // namespace hpa
