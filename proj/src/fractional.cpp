#include "hpa/fractional.hpp"

#include <cmath>

namespace hpa {

namespace {

int frac_lag(double tau, double h, const char* which) {
    const double ratio = tau / h;
    const int m = static_cast<int>(std::llround(ratio));
    if (std::abs(ratio - m) > 1e-9 * (1.0 + ratio))
        throw validation_error(std::string(which) +
                               ": delay must be an integer multiple of the step");
    return m;
}

} // namespace

void FracConfig::validate() const {
    if (!(q > 0.0 && q <= 1.0))
        throw validation_error("FracConfig: q must be in (0,1]");
    if (!(h > 0.0))
        throw validation_error("FracConfig: step must be positive");
    if (!(t_end >= h))
        throw validation_error("FracConfig: t_end must cover at least one step");
    if (corrector_iterations < 1)
        throw validation_error("FracConfig: need at least one corrector iteration");
    frac_lag(taus.tau1, h, "FracConfig tau1");
    frac_lag(taus.tau2, h, "FracConfig tau2");
    frac_lag(taus.tau31, h, "FracConfig tau31");
    frac_lag(taus.tau32, h, "FracConfig tau32");
}

AbmWeights abm_weights(double q, int N, double h) {
    if (!(q > 0.0 && q <= 1.0))
        throw validation_error("abm_weights: q must be in (0,1]");
    if (N < 1)
        throw validation_error("abm_weights: N must be >= 1");
    const double cb = std::pow(h, q) / std::tgamma(q + 1.0);
    const double ca = std::pow(h, q) / std::tgamma(q + 2.0);
    auto powq = [q](double v) { return std::pow(v, q); };
    auto powq1 = [q](double v) { return std::pow(v, q + 1.0); };

    AbmWeights w;
    w.b.resize(N);
    w.a.resize(N);
    for (int j = 0; j < N; ++j)
        w.b[j] = cb * (powq(N - j) - powq(N - 1 - j));
    w.a[0] = ca * (powq1(N - 1) - (N - 1 - q) * powq(N));
    for (int j = 1; j < N; ++j)
        w.a[j] = ca * (powq1(N - j + 1) + powq1(N - j - 1) - 2.0 * powq1(N - j));
    w.a_end = ca;
    return w;
}

Trajectory integrate_fractional(const SystemParams& p, const FracConfig& cfg,
                                const HistoryFunction& hist) {
    p.validate();
    cfg.validate();
    const double h = cfg.h, q = cfg.q;
    const int N = static_cast<int>(std::llround(cfg.t_end / h));
    const int m1 = frac_lag(cfg.taus.tau1, h, "tau1");
    const int m2 = frac_lag(cfg.taus.tau2, h, "tau2");
    const int m31 = frac_lag(cfg.taus.tau31, h, "tau31");
    const int m32 = frac_lag(cfg.taus.tau32, h, "tau32");

    Trajectory tr;
    tr.step = h;
    tr.t.resize(N + 1);
    tr.x1.resize(N + 1);
    tr.x2.resize(N + 1);
    tr.x3.resize(N + 1);

    const auto x0 = hist.value(0.0);
    tr.x1[0] = x0[0];
    tr.x2[0] = x0[1];
    tr.x3[0] = x0[2];
    for (int i = 0; i <= N; ++i)
        tr.t[i] = i * h;

    // f history, row-major [i][component]
    std::vector<double> F(static_cast<std::size_t>(N + 1) * 3);

    // delayed read of a component at t_i - m*h; grid for positive index,
    // history before zero, `cur` for m = 0
    auto delayed = [&](const std::vector<double>& comp, int src, int i, int m,
                       double cur) {
        if (m == 0)
            return cur;
        const int j = i - m;
        return j >= 0 ? comp[j] : hist.value(j * h)[src];
    };
    auto eval_f = [&](int i, double x1, double x2, double x3, double* out) {
        const double c31 = delayed(tr.x3, 2, i, m31, x3);
        const double c32 = delayed(tr.x3, 2, i, m32, x3);
        const double c1 = delayed(tr.x1, 0, i, m1, x1);
        const double c2 = delayed(tr.x2, 1, i, m2, x2);
        out[0] = p.f1.value(c31) - p.w1 * x1;
        out[1] = p.f2.value(c32) * c1 - p.w2 * x2;
        out[2] = p.k3 * c2 - p.w3 * x3;
    };
    eval_f(0, x0[0], x0[1], x0[2], &F[0]);

    // cumulative power tables: pq[k] = k^q, pq1[k] = k^{q+1}
    std::vector<double> pq(N + 2), pq1(N + 2);
    for (int k = 0; k <= N + 1; ++k) {
        pq[k] = std::pow(static_cast<double>(k), q);
        pq1[k] = std::pow(static_cast<double>(k), q + 1.0);
    }
    const double cb = std::pow(h, q) / std::tgamma(q + 1.0);
    const double ca = std::pow(h, q) / std::tgamma(q + 2.0);

    for (int n = 0; n < N; ++n) {
        const int i = n + 1;
        // predictor: x_i^P = x0 + cb * sum_j ((i-j)^q - (n-j)^q) f_j
        double xp[3] = {x0[0], x0[1], x0[2]};
        for (int j = 0; j <= n; ++j) {
            const double bw = cb * (pq[i - j] - pq[n - j]);
            const double* fj = &F[static_cast<std::size_t>(j) * 3];
            xp[0] += bw * fj[0];
            xp[1] += bw * fj[1];
            xp[2] += bw * fj[2];
        }
        // corrector memory sum with the product-trapezoidal weights
        double mem[3] = {0.0, 0.0, 0.0};
        for (int j = 0; j <= n; ++j) {
            const double aw =
                j == 0 ? (pq1[n] - (n - q) * pq[i])
                       : (pq1[n - j + 2] + pq1[n - j] - 2.0 * pq1[n - j + 1]);
            const double* fj = &F[static_cast<std::size_t>(j) * 3];
            mem[0] += aw * fj[0];
            mem[1] += aw * fj[1];
            mem[2] += aw * fj[2];
        }
        double fp[3];
        double xc[3] = {xp[0], xp[1], xp[2]};
        for (int it = 0; it < cfg.corrector_iterations; ++it) {
            eval_f(i, xc[0], xc[1], xc[2], fp);
            for (int c = 0; c < 3; ++c)
                xc[c] = x0[c] + ca * (mem[c] + fp[c]);
        }
        tr.x1[i] = xc[0];
        tr.x2[i] = xc[1];
        tr.x3[i] = xc[2];
        eval_f(i, xc[0], xc[1], xc[2], &F[static_cast<std::size_t>(i) * 3]);
    }
    return tr;
}

} // namespace hpa
