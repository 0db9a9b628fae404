#include "hpa/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>

namespace hpa {

using cplx = std::complex<double>;

double CrossingPoint::period() const { return 2.0 * M_PI / omega; }

namespace {

constexpr double kResidualTol = 1e-8;

// angle of w in [0, 2*pi)
double angle_of(cplx w) {
    double th = std::atan2(w.imag(), w.real());
    if (th < 0.0)
        th += 2.0 * M_PI;
    return th;
}

// bisection on [lo,hi]; requires (asserted) a sign change at the endpoints
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_tol) {
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if (flo * fhi > 0.0)
        throw solver_error("bisect: bracket does not change sign");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo < rel_tol * (std::abs(mid) + rel_tol))
            return mid;
        const double fm = f(mid);
        if (fm == 0.0)
            return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

template <typename F>
cplx newton_root(F&& f, cplx z0) {
    cplx z = z0;
    for (int it = 0; it < 80; ++it) {
        const cplx fz = f(z);
        const double step = 1e-7 * (1.0 + std::abs(z));
        const cplx d = (f(z + step) - f(z - step)) / (2.0 * step);
        if (std::abs(d) == 0.0)
            break;
        const cplx dz = fz / d;
        z -= dz;
        if (std::abs(dz) < 1e-13 * (1.0 + std::abs(z)))
            break;
    }
    return z;
}

// Track the crossing root of a parameterized characteristic family and
// confirm that its real part moves right as the parameter grows.
template <typename Family>
bool crossing_moves_right(Family&& fam, cplx z0, double param, double rel = 1e-4) {
    const auto zp = newton_root([&](cplx z) { return fam(z, param * (1.0 + rel)); }, z0);
    const auto zm = newton_root([&](cplx z) { return fam(z, param * (1.0 - rel)); }, z0);
    return zp.real() > zm.real();
}

void require_hypotheses(const SystemParams& p, const Equilibrium& e,
                        const char* who) {
    const auto rep = check_inequalities(p, e);
    if (!rep.i1_holds)
        throw validation_error(std::string(who) + ": inequality I1 fails");
    if (rep.i2_sign == I2Sign::holds)
        throw no_root_error(std::string(who) +
                            ": I2 holds, equilibrium stable for all kernels");
    if (rep.i2_sign == I2Sign::boundary)
        throw no_root_error(std::string(who) + ": on the I2 boundary");
}

void check_residual(cplx z, const SystemParams& p, const Equilibrium& e,
                    const KernelSet& ks, const char* who) {
    const double res = std::abs(char_eval(z, p, e, ks));
    const double scale = char_scale(z, p, e, ks);
    if (!(res < kResidualTol * scale))
        throw solver_error(std::string(who) +
                           ": crossing fails the characteristic residual check");
}

} // namespace

double find_omega0(const SystemParams& p, const Equilibrium& e) {
    const auto rep = check_inequalities(p, e);
    if (rep.i2_sign != I2Sign::fails)
        throw no_root_error("find_omega0: |Q(0)| <= 1, no crossing frequency "
                            "(I2 stability regime)");
    auto mod = [&](double om) { return q_eval(om, p, e).modulus; };
    double hi = 1.0;
    while (mod(hi) >= 1.0)
        hi *= 2.0;
    return bisect([&](double om) { return mod(om) - 1.0; }, 0.0, hi, 1e-10);
}

std::vector<CrossingPoint> dirac_critical(const SystemParams& p,
                                          const Equilibrium& e, int p_count) {
    if (p_count < 1)
        throw validation_error("dirac_critical: p_count must be >= 1");
    require_hypotheses(p, e, "dirac_critical");

    const double om0 = find_omega0(p, e);
    const cplx q0 = q_eval(om0, p, e).value;
    // e^{i om0 tau} = Q(i om0): resolve the angle from both components so the
    // residual vanishes also when Im Q(i om0) < 0
    const double theta0 = angle_of(q0);
    const bool trans = om0 * q_logderiv(om0, p, e).imag() > 0.0;

    std::vector<CrossingPoint> out;
    out.reserve(p_count);
    for (int i = 0; i < p_count; ++i) {
        CrossingPoint cp;
        cp.omega = om0;
        cp.parameter = (theta0 + 2.0 * M_PI * i) / om0;
        cp.branch_index = i;
        cp.kind = KernelKind::dirac;
        cp.transversality_positive = trans;
        out.push_back(cp);
    }

    const KernelSet ks{DelayKernel::dirac(0.0), DelayKernel::dirac(0.0),
                       DelayKernel::dirac(out[0].parameter),
                       DelayKernel::dirac(out[0].parameter)};
    check_residual(cplx(0.0, om0), p, e, ks, "dirac_critical");
    return out;
}

double chebyshev_T(int n, double x) {
    if (n < 0)
        throw validation_error("chebyshev_T: order must be >= 0");
    if (std::abs(x) > 1.0 + 1e-12)
        throw validation_error("chebyshev_T: argument outside [-1,1]");
    x = std::clamp(x, -1.0, 1.0);
    if (n == 0)
        return 1.0;
    double tkm1 = 1.0, tk = x;
    for (int k = 1; k < n; ++k) {
        const double tkp1 = 2.0 * x * tk - tkm1;
        tkm1 = tk;
        tk = tkp1;
    }
    return tk;
}

CrossingPoint gamma_critical(const SystemParams& p, const Equilibrium& e, int n,
                             int grid_points) {
    if (n < 2)
        throw validation_error("gamma_critical: total shape n must be >= 2");
    if (grid_points < 16)
        throw validation_error("gamma_critical: scan grid too coarse");
    require_hypotheses(p, e, "gamma_critical");

    const double om0 = find_omega0(p, e);
    auto F = [&](double om) {
        const auto q = q_eval(om, p, e);
        // |Q| > 1 on (0, omega0) exactly; clamp guards the omega0 edge where
        // the bisected root leaves |Q|-1 at rounding level
        const double x = std::min(1.0, std::pow(q.modulus, -1.0 / n));
        return chebyshev_T(n, x) - q.re / q.modulus;
    };

    // sign-change scan over (0, om0); the smallest critical beta belongs to
    // the largest root
    std::vector<double> roots;
    const double lo_edge = om0 / grid_points * 1e-3;
    double prev_om = lo_edge, prev_f = F(prev_om);
    for (int k = 1; k <= grid_points; ++k) {
        const double om = om0 * (k == grid_points ? 1.0 - 1e-9
                                                  : static_cast<double>(k) / grid_points);
        const double fv = F(om);
        if (prev_f == 0.0)
            roots.push_back(prev_om);
        else if (prev_f * fv < 0.0)
            roots.push_back(bisect(F, prev_om, om, 1e-12));
        prev_om = om;
        prev_f = fv;
    }
    if (roots.empty())
        throw no_root_error("gamma_critical: the Chebyshev equation has no root "
                            "in (0, omega0); Gamma kernels of this total shape "
                            "cannot destabilize the equilibrium");

    const double om_n = *std::max_element(roots.begin(), roots.end());
    const double mod_n = q_eval(om_n, p, e).modulus;
    const double beta_n = std::sqrt(std::pow(mod_n, 2.0 / n) - 1.0) / om_n;

    CrossingPoint cp;
    cp.omega = om_n;
    cp.parameter = beta_n;
    cp.branch_index = 0;
    cp.kind = KernelKind::gamma;

    const auto qd = q_logderiv(om_n, p, e);
    cp.transversality_positive =
        beta_n * om_n * qd.real() + qd.imag() > 0.0;

    // shapes n2 + n32 = n with n32 = n31, n1 = 0
    const int n32 = n / 2, n2 = n - n32;
    const KernelSet ks{DelayKernel::dirac(0.0), DelayKernel::gamma(n2, beta_n),
                       DelayKernel::gamma(n32, beta_n),
                       DelayKernel::gamma(n32, beta_n)};
    check_residual(cplx(0.0, om_n), p, e, ks, "gamma_critical");

    auto family = [&](cplx z, double beta) {
        return (z + p.w1) * (z + p.w2) * (z + p.w3) * std::pow(beta * z + 1.0, n) +
               e.a * (z + p.w1) + e.b;
    };
    const bool numeric = crossing_moves_right(family, cplx(0.0, om_n), beta_n);
    if (!numeric || !cp.transversality_positive)
        throw solver_error("gamma_critical: transversality check failed");
    return cp;
}

std::vector<CrossingPoint> mixed_critical(const SystemParams& p,
                                          const Equilibrium& e, int n,
                                          double beta, int p_count) {
    if (p_count < 1)
        throw validation_error("mixed_critical: p_count must be >= 1");
    if (!(beta > 0.0))
        throw validation_error("mixed_critical: beta must be positive");
    require_hypotheses(p, e, "mixed_critical");

    // tau = 0 must leave the equilibrium stable. When the pure-Gamma system
    // of total shape n has no crossing at all, every beta qualifies.
    double beta_n = std::numeric_limits<double>::infinity();
    try {
        beta_n = gamma_critical(p, e, n).parameter;
    } catch (const no_root_error&) {
    }
    if (!(beta < beta_n))
        throw validation_error("mixed_critical: beta >= beta_n, equilibrium "
                               "already unstable at tau = 0");

    const double om0 = find_omega0(p, e);
    // |Q(i w)|^2 decreasing, (beta^2 w^2+1)^n increasing: unique crossing in
    // (0, om0]. The right bracket edge may need a nudge past om0 when beta is
    // tiny and the crossing sits at om0 within the omega0 tolerance.
    auto P = [&](double om) {
        const double m = q_eval(om, p, e).modulus;
        return m * m - std::pow(beta * beta * om * om + 1.0, n);
    };
    double hi = om0;
    for (int guard = 0; P(hi) >= 0.0; ++guard) {
        if (guard > 1000)
            throw solver_error("mixed_critical: failed to bracket the crossing");
        hi *= 1.0001;
    }
    const double om_t = bisect(P, 0.0, hi, 1e-12);

    const cplx qv = q_eval(om_t, p, e).value;
    const cplx w = qv / std::pow(cplx(1.0, beta * om_t), n);
    const double theta = angle_of(w);

    const auto qd = q_logderiv(om_t, p, e);
    const bool trans =
        qd.imag() + n * beta * beta * om_t / (beta * beta * om_t * om_t + 1.0) > 0.0;

    std::vector<CrossingPoint> out;
    out.reserve(p_count);
    for (int i = 0; i < p_count; ++i) {
        CrossingPoint cp;
        cp.omega = om_t;
        cp.parameter = (theta + 2.0 * M_PI * i) / om_t;
        cp.branch_index = i;
        cp.kind = KernelKind::mixed;
        cp.transversality_positive = trans;
        out.push_back(cp);
    }

    const KernelSet ks{DelayKernel::dirac(0.0),
                       DelayKernel::dirac(out[0].parameter),
                       DelayKernel::gamma(n, beta), DelayKernel::gamma(n, beta)};
    check_residual(cplx(0.0, om_t), p, e, ks, "mixed_critical");
    return out;
}

// ---------------------------------------------------------------------------
// Region scan
// ---------------------------------------------------------------------------

namespace {

int resolve_workers(int requested) {
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("HPA_NUM_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0)
            return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return std::clamp<int>(static_cast<int>(hc), 1, 8);
}

int bin_of(double value, const std::vector<double>& edges) {
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (value <= edges[i])
            return static_cast<int>(i);
    }
    return static_cast<int>(edges.size());
}

RegionCell scan_cell(const RegionScanOptions& o, double c, double eta) {
    RegionCell cell{c, eta, CellStatus::failed,
                    std::numeric_limits<double>::quiet_NaN(), -1};
    try {
        const auto p = fit_params(o.T1, o.T2, o.T3, o.xbar1, o.xbar2, o.xbar3,
                                  o.alpha, eta, eta, c);
        const auto e = find_equilibrium(p);
        const auto rep = check_inequalities(p, e);
        if (rep.i2_sign == I2Sign::holds) {
            cell.status = CellStatus::stable;
            return cell;
        }
        if (rep.i2_sign == I2Sign::boundary) {
            cell.status = CellStatus::boundary;
            return cell;
        }
        double total = 0.0;
        if (o.kind == KernelKind::dirac) {
            total = dirac_critical(p, e, 1)[0].parameter;
        } else if (o.kind == KernelKind::gamma) {
            total = o.n * gamma_critical(p, e, o.n, o.gamma_grid_points).parameter;
        } else {
            throw validation_error("region_scan: kind must be dirac or gamma");
        }
        cell.status = CellStatus::bifurcation;
        cell.critical_delay = total;
        cell.bin = bin_of(total, o.bin_edges);
    } catch (const std::exception&) {
        cell.status = CellStatus::failed;
    }
    return cell;
}

} // namespace

const RegionCell& RegionGrid::at(int ie, int ic) const {
    return cells.at(static_cast<std::size_t>(ie) * c_values.size() + ic);
}

bool RegionGrid::has_bin(int bin) const {
    return std::any_of(cells.begin(), cells.end(), [bin](const RegionCell& c) {
        return c.status == CellStatus::bifurcation && c.bin == bin;
    });
}

RegionGrid region_scan(const RegionScanOptions& opts) {
    if (opts.grid_c < 0 || opts.grid_eta < 0)
        throw validation_error("region_scan: negative grid dimensions");
    if (opts.kind == KernelKind::mixed)
        throw validation_error("region_scan: kind must be dirac or gamma");

    RegionGrid grid;
    grid.opts = opts;
    for (int i = 0; i < opts.grid_c; ++i)
        grid.c_values.push_back(
            opts.grid_c == 1 ? opts.c_min
                             : opts.c_min + (opts.c_max - opts.c_min) * i /
                                                (opts.grid_c - 1));
    for (int j = 0; j < opts.grid_eta; ++j)
        grid.eta_values.push_back(
            opts.grid_eta == 1 ? opts.eta_min
                               : opts.eta_min + (opts.eta_max - opts.eta_min) * j /
                                                    (opts.grid_eta - 1));

    const std::size_t total = grid.c_values.size() * grid.eta_values.size();
    grid.cells.resize(total);
    if (total == 0)
        return grid;

    const int workers = resolve_workers(opts.workers);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const std::size_t ie = idx / grid.c_values.size();
            const std::size_t ic = idx % grid.c_values.size();
            grid.cells[idx] = scan_cell(opts, grid.c_values[ic], grid.eta_values[ie]);
        }
    };

    if (workers <= 1) {
        worker(0, total);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (total + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            if (begin >= total)
                break;
            pool.emplace_back(worker, begin, std::min(begin + chunk, total));
        }
        for (auto& th : pool)
            th.join();
    }
    return grid;
}

std::string to_string(CellStatus s) {
    switch (s) {
    case CellStatus::stable: return "stable";
    case CellStatus::boundary: return "boundary";
    case CellStatus::bifurcation: return "bifurcation";
    case CellStatus::failed: return "failed";
    }
    return "unknown";
}

std::string bin_label(const std::vector<double>& edges, int bin) {
    if (bin < 0)
        return "";
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return std::string(buf);
    };
    if (bin >= static_cast<int>(edges.size()))
        return ">" + fmt(edges.back());
    const double hi = edges[bin];
    const double lo = bin == 0 ? 0.0 : edges[bin - 1];
    return fmt(lo) + "-" + fmt(hi);
}

} // namespace hpa
