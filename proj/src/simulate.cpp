#include "hpa/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hpa {

// ---------------------------------------------------------------------------
// HistoryFunction
// ---------------------------------------------------------------------------

HistoryFunction HistoryFunction::constant(std::array<double, 3> values) {
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw validation_error("HistoryFunction: values must be finite and >= 0");
    HistoryFunction h;
    h.constant_ = true;
    h.const_values_ = values;
    return h;
}

HistoryFunction HistoryFunction::sampled(std::vector<double> times,
                                         std::vector<std::array<double, 3>> values) {
    if (times.size() != values.size() || times.size() < 2)
        throw validation_error("HistoryFunction: need >= 2 matching samples");
    if (times.back() != 0.0)
        throw validation_error("HistoryFunction: last sample must sit at t = 0");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1]))
            throw validation_error("HistoryFunction: sample times must ascend");
    for (const auto& v : values)
        for (double x : v)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw validation_error("HistoryFunction: values must be finite and >= 0");
    HistoryFunction h;
    h.constant_ = false;
    h.times_ = std::move(times);
    h.values_ = std::move(values);
    return h;
}

std::array<double, 3> HistoryFunction::value(double t) const {
    if (constant_)
        return const_values_;
    if (t <= times_.front())
        return values_.front();
    if (t >= times_.back())
        return values_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times_.begin());
    const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    std::array<double, 3> out;
    for (int k = 0; k < 3; ++k)
        out[k] = (1.0 - w) * values_[i - 1][k] + w * values_[i][k];
    return out;
}

std::array<double, 3> HistoryFunction::deriv(double t) const {
    if (constant_ || t <= times_.front() || t > times_.back())
        return {0.0, 0.0, 0.0};
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end())
        --it;
    const std::size_t i = static_cast<std::size_t>(it - times_.begin());
    const double dt = times_[i] - times_[i - 1];
    std::array<double, 3> out;
    for (int k = 0; k < 3; ++k)
        out[k] = (values_[i][k] - values_[i - 1][k]) / dt;
    return out;
}

HistoryFunction default_history(const Equilibrium& e, double x3_factor) {
    return HistoryFunction::constant({e.x1, e.x2, e.x3 * x3_factor});
}

// ---------------------------------------------------------------------------
// Integration engine
// ---------------------------------------------------------------------------

namespace {

// one delay pathway: discrete read (lag = tau/h steps) or a Gamma chain
struct Pathway {
    bool chain = false;
    int lag = 0;          // dirac: delay in grid steps
    int chain_begin = 0;  // gamma: first auxiliary state index
    int chain_len = 0;
    double beta = 0.0;
    int source = 0; // main-state index read by the pathway (0..2)
};

int lag_steps(double tau, double h, const char* which) {
    const double ratio = tau / h;
    const int m = static_cast<int>(std::llround(ratio));
    if (std::abs(ratio - m) > 1e-9 * (1.0 + ratio)) {
        const double suggestion = tau / std::max(1, m);
        throw validation_error(std::string(which) +
                               ": delay must be an integer multiple of the step; "
                               "nearest admissible step ~= " +
                               std::to_string(suggestion));
    }
    return m;
}

class Engine {
  public:
    Engine(const SystemParams& p, const KernelSet& ks, const HistoryFunction& hist,
           double t_end, double h)
        : p_(p), hist_(hist), h_(h) {
        p.validate();
        if (!(h > 0.0))
            throw validation_error("integrate: step must be positive");
        if (!(t_end >= h))
            throw validation_error("integrate: t_end must cover at least one step");

        nstates_ = 3;
        path_[0] = make_pathway(ks.h1, 0, "h1");
        path_[1] = make_pathway(ks.h2, 1, "h2");
        path_[2] = make_pathway(ks.h31, 2, "h31");
        path_[3] = make_pathway(ks.h32, 2, "h32");
        nsteps_ = static_cast<int>(std::llround(t_end / h));
    }

    Trajectory run() {
        const int N = nsteps_;
        x_.assign(static_cast<std::size_t>(N + 1) * nstates_, 0.0);
        d_.assign(static_cast<std::size_t>(N + 1) * 3, 0.0);

        // initial state from history; chain states start at the source value,
        // so a constant history at equilibrium is an exact fixed point
        std::vector<double> s(nstates_);
        const auto phi0 = hist_.value(0.0);
        s[0] = phi0[0];
        s[1] = phi0[1];
        s[2] = phi0[2];
        for (const auto& pw : path_)
            for (int j = 0; j < pw.chain_len; ++j)
                s[pw.chain_begin + j] = phi0[pw.source];
        store(0, s);

        std::vector<double> k1(nstates_), k2(nstates_), k3(nstates_), k4(nstates_),
            tmp(nstates_);
        for (int i = 0; i < N; ++i) {
            state_at(i, s);
            rhs(i, Stage::left, s, k1);
            axpy(s, 0.5 * h_, k1, tmp);
            rhs(i, Stage::mid, tmp, k2);
            axpy(s, 0.5 * h_, k2, tmp);
            rhs(i, Stage::mid, tmp, k3);
            axpy(s, h_, k3, tmp);
            rhs(i, Stage::right, tmp, k4);
            for (int j = 0; j < nstates_; ++j)
                tmp[j] = s[j] + h_ / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            store(i + 1, tmp);
        }

        Trajectory tr;
        tr.step = h_;
        tr.t.resize(N + 1);
        tr.x1.resize(N + 1);
        tr.x2.resize(N + 1);
        tr.x3.resize(N + 1);
        tr.aux.assign(nstates_ - 3, std::vector<double>(N + 1));
        for (int i = 0; i <= N; ++i) {
            tr.t[i] = i * h_;
            const double* row = &x_[static_cast<std::size_t>(i) * nstates_];
            tr.x1[i] = row[0];
            tr.x2[i] = row[1];
            tr.x3[i] = row[2];
            for (int j = 3; j < nstates_; ++j)
                tr.aux[j - 3][i] = row[j];
        }
        return tr;
    }

  private:
    enum class Stage { left, mid, right };

    Pathway make_pathway(const DelayKernel& k, int source, const char* name) {
        Pathway pw;
        pw.source = source;
        if (k.is_dirac()) {
            pw.lag = lag_steps(k.dirac_tau(), h_, name);
        } else {
            pw.chain = true;
            pw.beta = k.gamma_beta();
            pw.chain_len = k.gamma_n();
            pw.chain_begin = nstates_;
            nstates_ += pw.chain_len;
        }
        return pw;
    }

    void store(int i, const std::vector<double>& s) {
        std::copy(s.begin(), s.end(), x_.begin() + static_cast<std::size_t>(i) * nstates_);
        std::vector<double> dd(nstates_);
        rhs(i, Stage::left, s, dd);
        double* drow = &d_[static_cast<std::size_t>(i) * 3];
        drow[0] = dd[0];
        drow[1] = dd[1];
        drow[2] = dd[2];
    }

    void state_at(int i, std::vector<double>& s) const {
        const double* row = &x_[static_cast<std::size_t>(i) * nstates_];
        std::copy(row, row + nstates_, s.begin());
    }

    double node_value(int j, int comp) const {
        if (j >= 0)
            return x_[static_cast<std::size_t>(j) * nstates_ + comp];
        return hist_.value(j * h_)[comp];
    }

    // derivative of a main state for use as an endpoint of segment
    // [t_j, t_{j+1}]: the solution's derivative jumps at t = 0 (history meets
    // RHS), so node 0 carries the history slope when it closes a history
    // segment and the RHS value when it opens the computed one
    double segment_deriv(int j, int comp, bool right_end) const {
        if (j < 0 || (j == 0 && right_end))
            return hist_.deriv(j * h_)[comp];
        return d_[static_cast<std::size_t>(j) * 3 + comp];
    }

    // delayed source read for stage evaluations at t_i, t_i + h/2, t_i + h
    double delayed(const Pathway& pw, int i, Stage stage,
                   const std::vector<double>& s) const {
        if (pw.chain)
            return s[pw.chain_begin + pw.chain_len - 1];
        if (pw.lag == 0)
            return s[pw.source];
        switch (stage) {
        case Stage::left:
            return node_value(i - pw.lag, pw.source);
        case Stage::right:
            return node_value(i - pw.lag + 1, pw.source);
        case Stage::mid: {
            // cubic Hermite at the midpoint of [t_{i-lag}, t_{i-lag+1}]
            const int j = i - pw.lag;
            const double y0 = node_value(j, pw.source);
            const double y1 = node_value(j + 1, pw.source);
            const double d0 = segment_deriv(j, pw.source, false);
            const double d1 = segment_deriv(j + 1, pw.source, true);
            return 0.5 * (y0 + y1) + 0.125 * h_ * (d0 - d1);
        }
        }
        return 0.0;
    }

    void rhs(int i, Stage stage, const std::vector<double>& s,
             std::vector<double>& out) const {
        const double c31 = delayed(path_[2], i, stage, s);
        const double c32 = delayed(path_[3], i, stage, s);
        const double c1 = delayed(path_[0], i, stage, s);
        const double c2 = delayed(path_[1], i, stage, s);
        out[0] = p_.f1.value(c31) - p_.w1 * s[0];
        out[1] = p_.f2.value(c32) * c1 - p_.w2 * s[1];
        out[2] = p_.k3 * c2 - p_.w3 * s[2];
        for (const auto& pw : path_) {
            if (!pw.chain)
                continue;
            const int b = pw.chain_begin;
            out[b] = (s[pw.source] - s[b]) / pw.beta;
            for (int j = 1; j < pw.chain_len; ++j)
                out[b + j] = (s[b + j - 1] - s[b + j]) / pw.beta;
        }
    }

    static void axpy(const std::vector<double>& s, double c,
                     const std::vector<double>& k, std::vector<double>& out) {
        for (std::size_t j = 0; j < s.size(); ++j)
            out[j] = s[j] + c * k[j];
    }

    const SystemParams& p_;
    const HistoryFunction& hist_;
    double h_;
    int nstates_ = 3;
    int nsteps_ = 0;
    std::array<Pathway, 4> path_{};
    std::vector<double> x_; // (N+1) x nstates
    std::vector<double> d_; // (N+1) x 3, main-state derivatives for Hermite reads
};

} // namespace

Trajectory integrate_kernels(const SystemParams& p, const KernelSet& ks,
                             const HistoryFunction& hist, double t_end, double h) {
    return Engine(p, ks, hist, t_end, h).run();
}

Trajectory integrate_dirac(const SystemParams& p, const DiracDelays& taus,
                           const HistoryFunction& hist, double t_end, double h) {
    const KernelSet ks{DelayKernel::dirac(taus.tau1), DelayKernel::dirac(taus.tau2),
                       DelayKernel::dirac(taus.tau31), DelayKernel::dirac(taus.tau32)};
    return integrate_kernels(p, ks, hist, t_end, h);
}

Trajectory integrate_gamma_chain(const SystemParams& p, const KernelSet& ks,
                                 const HistoryFunction& hist, double t_end,
                                 double h) {
    for (const auto* k : {&ks.h1, &ks.h2, &ks.h31, &ks.h32}) {
        if (k->is_dirac() && k->dirac_tau() != 0.0)
            throw validation_error("integrate_gamma_chain: pathways must be Gamma "
                                   "or zero-delay");
    }
    return integrate_kernels(p, ks, hist, t_end, h);
}

Trajectory integrate_mixed(const SystemParams& p, double tau2, int n, double beta,
                           const HistoryFunction& hist, double t_end, double h) {
    const KernelSet ks{DelayKernel::dirac(0.0), DelayKernel::dirac(tau2),
                       DelayKernel::gamma(n, beta), DelayKernel::gamma(n, beta)};
    return integrate_kernels(p, ks, hist, t_end, h);
}

// ---------------------------------------------------------------------------
// Oscillation detection
// ---------------------------------------------------------------------------

OscillationReport detect_oscillation(const Trajectory& tr, const Equilibrium& e,
                                     const OscillationThresholds& th) {
    const std::size_t n = tr.size();
    if (n < 16)
        throw validation_error("detect_oscillation: trajectory too short");
    const std::array<const std::vector<double>*, 3> comps{&tr.x1, &tr.x2, &tr.x3};
    const std::array<double, 3> eq{e.x1, e.x2, e.x3};

    OscillationReport rep;

    auto max_rel_dev = [&](std::size_t begin, std::size_t end) {
        double m = 0.0;
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = begin; i < end; ++i)
                m = std::max(m, std::abs((*comps[c])[i] - eq[c]) / eq[c]);
        return m;
    };

    // deviation envelope: ten bins over [0.1 T, T]
    const std::size_t env_begin = n / 10;
    std::array<double, 10> env{};
    {
        const std::size_t span = n - env_begin;
        for (int b = 0; b < 10; ++b) {
            const std::size_t lo = env_begin + span * b / 10;
            const std::size_t hi = env_begin + span * (b + 1) / 10;
            env[b] = max_rel_dev(lo, std::max(hi, lo + 1));
        }
    }
    rep.envelope_ratio = env.front() > 0.0 ? env.back() / env.front() : 0.0;
    bool env_decreasing = true;
    for (int b = 0; b + 1 < 10; ++b)
        env_decreasing = env_decreasing && env[b + 1] <= env[b] * th.envelope_slack;

    // final window: last 10%
    rep.equilibrium_distance = max_rel_dev(n - n / 10, n);

    // post-transient amplitude and x3 upward mean-crossing period
    const std::size_t w0 = static_cast<std::size_t>(n * th.transient_fraction);
    for (int c = 0; c < 3; ++c) {
        const auto& v = *comps[c];
        const auto [mn, mx] = std::minmax_element(v.begin() + w0, v.end());
        rep.amplitude[c] = *mx - *mn;
    }
    {
        const auto& v = tr.x3;
        const double mean =
            std::accumulate(v.begin() + w0, v.end(), 0.0) / (n - w0);
        std::vector<double> crossings;
        for (std::size_t i = w0 + 1; i < n; ++i)
            if (v[i - 1] < mean && v[i] >= mean)
                crossings.push_back(tr.t[i]);
        if (crossings.size() >= 2) {
            std::vector<double> gaps(crossings.size() - 1);
            for (std::size_t i = 1; i < crossings.size(); ++i)
                gaps[i - 1] = crossings[i] - crossings[i - 1];
            const double mg =
                std::accumulate(gaps.begin(), gaps.end(), 0.0) / gaps.size();
            double var = 0.0;
            for (double g : gaps)
                var += (g - mg) * (g - mg);
            rep.period = mg;
            rep.period_cv = std::sqrt(var / gaps.size()) / mg;
            rep.cycles = static_cast<int>(gaps.size());
        }
    }

    const bool converged =
        rep.equilibrium_distance < th.converged_rel ||
        (env_decreasing && env.back() <= th.decay_ratio * env.front());
    if (converged) {
        rep.verdict = Verdict::converged;
        return rep;
    }
    const bool oscillating = rep.amplitude[2] > th.amplitude_rel * eq[2] &&
                             rep.cycles >= 3 && rep.period_cv < th.period_cv &&
                             env.back() > th.sustain_ratio * env.front();
    rep.verdict = oscillating ? Verdict::oscillating : Verdict::undecided;
    return rep;
}

} // namespace hpa
