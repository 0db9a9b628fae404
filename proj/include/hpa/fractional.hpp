#pragma once

#include <vector>

#include "hpa/model.hpp"
#include "hpa/simulate.hpp"

namespace hpa {

/// Configuration of a Caputo fractional-order run with discrete delays.
struct FracConfig {
    double q = 0.9; ///< fractional order in (0,1]
    DiracDelays taus;
    double h = 0.1;        ///< step, min
    double t_end = 2000.0; ///< horizon, min
    int corrector_iterations = 1;

    void validate() const; ///< q in (0,1], h>0, delays on the step grid
};

/// Quadrature weights of the fractional Adams-Bashforth-Moulton
/// predictor-corrector for the step reaching t_N = N*h:
///   predictor: x_N^P = x0 + sum_{j=0}^{N-1} b[j] f_j
///     with b[j] = ((N-j)^q - (N-1-j)^q) h^q / Gamma(q+1)
///   corrector: x_N = x0 + sum_{j=0}^{N-1} a[j] f_j + a_end f(t_N, x_N^P)
///     with a[0] = ((N-1)^{q+1} - (N-1-q) N^q) h^q / Gamma(q+2),
///     interior a[j] = ((N-j+1)^{q+1} + (N-j-1)^{q+1} - 2(N-j)^{q+1}) h^q / Gamma(q+2),
///     a_end = h^q / Gamma(q+2).
/// At q=1 this degenerates to the rectangle/trapezoid pair.
struct AbmWeights {
    std::vector<double> b; ///< predictor weights, size N
    std::vector<double> a; ///< corrector history weights, size N
    double a_end;          ///< corrector weight of the predicted endpoint
};
AbmWeights abm_weights(double q, int N, double h);

/// Integrate the Caputo fractional-order system
///   D^q x1 = f1(x3(t-tau31)) - w1 x1
///   D^q x2 = f2(x3(t-tau32)) x1(t-tau1) - w2 x2
///   D^q x3 = k3 x2(t-tau2) - w3 x3
/// by the delayed-argument ABM predictor-corrector. Delayed reads with
/// tau > 0 hit already-computed grid values (history for t-tau < 0); tau = 0
/// pathways use the predicted point inside the corrector. The Caputo memory
/// integral starts at t = 0; history before 0 only feeds the delay terms.
/// Work grows as O(N^2) in the step count.
Trajectory integrate_fractional(const SystemParams& p, const FracConfig& cfg,
                                const HistoryFunction& hist);

} // namespace hpa
