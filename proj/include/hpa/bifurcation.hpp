#pragma once

#include <string>
#include <vector>

#include "hpa/stability.hpp"

namespace hpa {

enum class KernelKind { dirac, gamma, mixed };

/// One point where a conjugate root pair of the characteristic equation
/// reaches the imaginary axis.
struct CrossingPoint {
    double omega;     ///< crossing frequency, rad/min
    double parameter; ///< critical value: tau_p, beta_n or tau~_np (min)
    int branch_index; ///< p for tau branches, 0 otherwise
    KernelKind kind;
    bool transversality_positive; ///< d Re(z)/d param > 0 at the crossing

    double period() const; ///< 2*pi/omega, min
};

/// Unique positive root of |Q(i omega)| = 1. Exists iff S < 0 (I2 fails
/// strictly); throws no_root_error in the stable regime. Bisection with
/// 1e-10 relative tolerance on a bracket found by doubling.
double find_omega0(const SystemParams& p, const Equilibrium& e);

/// Critical delays for an all-Dirac kernel set with total delay tau:
///   tau_p = (theta0 + 2 p pi)/omega0,  p = 0..p_count-1,
/// where theta0 in [0,2pi) solves cos(theta0)=Re Q(i omega0) AND
/// sin(theta0)=Im Q(i omega0). Requires I1 and S < 0.
std::vector<CrossingPoint> dirac_critical(const SystemParams& p,
                                          const Equilibrium& e, int p_count);

/// Chebyshev polynomial of the first kind, three-term recurrence.
/// Domain |x| <= 1 + 1e-12.
double chebyshev_T(int n, double x);

/// Critical Gamma scale beta_n for total shape n >= 2 (common scale beta,
/// shapes summing to n on both pathway products): omega_n is the largest
/// root in (0, omega0) of
///   T_n(|Q(i w)|^{-1/n}) = Re Q(i w)/|Q(i w)|,
/// located by a sign-change scan on grid_points points plus bisection, and
///   beta_n = sqrt(|Q(i omega_n)|^{2/n} - 1)/omega_n.
/// The returned crossing is verified: characteristic residual < 1e-8*scale
/// and numeric root-tracking confirms the crossing direction (hard
/// solver_error otherwise).
CrossingPoint gamma_critical(const SystemParams& p, const Equilibrium& e,
                             int n, int grid_points = 10000);

/// Critical discrete delays for the product-form kernel e^{-tau z}(beta z+1)^{-n}
/// with fixed beta in (0, beta_n): omega~_n is the unique root of
/// |Q(i w)|^2 = (beta^2 w^2 + 1)^n in (0, omega0), and
///   tau~_np = (theta + 2 p pi)/omega~_n,
/// theta resolved from both components of Q(i w)/(i beta w + 1)^n.
std::vector<CrossingPoint> mixed_critical(const SystemParams& p,
                                          const Equilibrium& e, int n,
                                          double beta, int p_count);

// ---------------------------------------------------------------------------
// Parameter-plane region scan
// ---------------------------------------------------------------------------

enum class CellStatus {
    stable,      ///< S > 0: no bifurcation for any kernels
    boundary,    ///< |S| within tolerance
    bifurcation, ///< S < 0: critical delay computed
    failed       ///< per-cell computation error (recorded, never fatal)
};

struct RegionCell {
    double c, eta;
    CellStatus status;
    double critical_delay; ///< total mean delay at the Hopf point (min); NaN unless bifurcation
    int bin;               ///< index into bin edges; -1 when not applicable
};

struct RegionScanOptions {
    double alpha = 6.0;
    double c_min = 100.0, c_max = 10000.0;
    double eta_min = 0.01, eta_max = 1.0;
    int grid_c = 100, grid_eta = 100;
    KernelKind kind = KernelKind::dirac; ///< dirac or gamma
    int n = 4;                           ///< total Gamma shape (gamma scans)
    std::vector<double> bin_edges{15.0, 30.0, 60.0, 90.0};
    // physiology (fixed across the plane)
    double T1 = 4.0, T2 = 19.9, T3 = 76.4;
    double xbar1 = 7.659, xbar2 = 21.0, xbar3 = 3055.0;
    int workers = 0; ///< 0: HPA_NUM_WORKERS env or hardware_concurrency
    int gamma_grid_points = 10000;
};

struct RegionGrid {
    RegionScanOptions opts;
    std::vector<double> c_values, eta_values;
    std::vector<RegionCell> cells; ///< row-major: eta outer, c inner

    const RegionCell& at(int ie, int ic) const;
    bool has_bin(int bin) const; ///< any bifurcation cell in the given bin
};

/// Scan the (c, eta=mu) plane: fit parameters per cell, classify S, and for
/// bifurcation cells compute the critical total mean delay (tau_0 for Dirac,
/// n*beta_n for Gamma) binned by the configured edges. Cells are evaluated
/// independently across a worker pool; output ordering is deterministic.
RegionGrid region_scan(const RegionScanOptions& opts);

std::string to_string(CellStatus s);
std::string bin_label(const std::vector<double>& edges, int bin);

} // namespace hpa
