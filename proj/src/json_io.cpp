#include "hpa/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace hpa {

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            known = known || key == a;
        if (!known)
            throw validation_error(where + ": unknown key '" + key + "'");
    }
}

double require_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key))
        throw validation_error(where + ": missing key '" + key + "'");
    if (!j.at(key).is_number())
        throw validation_error(where + ": key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

json to_json(const HillFeedback& f) {
    return json{{"k", f.k()}, {"eta", f.eta()}, {"c", f.c()}, {"alpha", f.alpha()}};
}

HillFeedback hill_from_json(const json& j) {
    reject_unknown_keys(j, {"k", "eta", "c", "alpha"}, "feedback");
    return HillFeedback(require_number(j, "k", "feedback"),
                        require_number(j, "eta", "feedback"),
                        require_number(j, "c", "feedback"),
                        require_number(j, "alpha", "feedback"));
}

json to_json(const SystemParams& p) {
    return json{{"w1", p.w1}, {"w2", p.w2},           {"w3", p.w3},
                {"k3", p.k3}, {"f1", to_json(p.f1)}, {"f2", to_json(p.f2)}};
}

SystemParams params_from_json(const json& j) {
    reject_unknown_keys(j, {"w1", "w2", "w3", "k3", "f1", "f2"}, "params");
    if (!j.contains("f1") || !j.contains("f2"))
        throw validation_error("params: missing feedback blocks f1/f2");
    SystemParams p{require_number(j, "w1", "params"),
                   require_number(j, "w2", "params"),
                   require_number(j, "w3", "params"),
                   require_number(j, "k3", "params"),
                   hill_from_json(j.at("f1")),
                   hill_from_json(j.at("f2"))};
    p.validate();
    return p;
}

json to_json(const Equilibrium& e) {
    return json{{"x1", e.x1}, {"x2", e.x2}, {"x3", e.x3}, {"a", e.a}, {"b", e.b}};
}

json to_json(const DelayKernel& k) {
    if (k.is_dirac())
        return json{{"type", "dirac"}, {"tau", k.dirac_tau()}};
    return json{{"type", "gamma"}, {"n", k.gamma_n()}, {"beta", k.gamma_beta()}};
}

DelayKernel kernel_from_json(const json& j) {
    if (!j.contains("type") || !j.at("type").is_string())
        throw validation_error("kernel: missing 'type'");
    const std::string type = j.at("type").get<std::string>();
    if (type == "dirac") {
        reject_unknown_keys(j, {"type", "tau"}, "kernel");
        return DelayKernel::dirac(require_number(j, "tau", "kernel"));
    }
    if (type == "gamma") {
        reject_unknown_keys(j, {"type", "n", "beta"}, "kernel");
        const double n = require_number(j, "n", "kernel");
        if (n != std::floor(n))
            throw validation_error("kernel: gamma shape n must be an integer");
        return DelayKernel::gamma(static_cast<int>(n),
                                  require_number(j, "beta", "kernel"));
    }
    throw validation_error("kernel: type must be 'dirac' or 'gamma'");
}

json to_json(const KernelSet& ks) {
    return json{{"h1", to_json(ks.h1)},
                {"h2", to_json(ks.h2)},
                {"h31", to_json(ks.h31)},
                {"h32", to_json(ks.h32)}};
}

KernelSet kernel_set_from_json(const json& j) {
    reject_unknown_keys(j, {"h1", "h2", "h31", "h32"}, "kernels");
    for (const char* key : {"h1", "h2", "h31", "h32"})
        if (!j.contains(key))
            throw validation_error(std::string("kernels: missing '") + key + "'");
    return KernelSet{kernel_from_json(j.at("h1")), kernel_from_json(j.at("h2")),
                     kernel_from_json(j.at("h31")), kernel_from_json(j.at("h32"))};
}

json to_json(const StabilityReport& r) {
    const char* sign = r.i2_sign == I2Sign::holds     ? "I2"
                       : r.i2_sign == I2Sign::boundary ? "boundary"
                                                       : "I2bar";
    return json{{"i1_holds", r.i1_holds},
                {"i2_sign", sign},
                {"s_value", r.s_value},
                {"routh",
                 {{"c1", r.routh.c1},
                  {"c2", r.routh.c2},
                  {"c3", r.routh.c3},
                  {"c1c2_minus_c3", r.routh.c1c2_minus_c3},
                  {"stable", r.routh.stable}}}};
}

std::string to_string(KernelKind k) {
    switch (k) {
    case KernelKind::dirac: return "dirac";
    case KernelKind::gamma: return "gamma";
    case KernelKind::mixed: return "mixed";
    }
    return "unknown";
}

json to_json(const CrossingPoint& cp) {
    return json{{"omega", cp.omega},
                {"parameter", cp.parameter},
                {"branch_index", cp.branch_index},
                {"kind", to_string(cp.kind)},
                {"transversality_sign",
                 cp.transversality_positive ? "positive" : "nonpositive"},
                {"period", cp.period()}};
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::oscillating: return "oscillating";
    case Verdict::undecided: return "undecided";
    }
    return "unknown";
}

json to_json(const OscillationReport& r) {
    return json{{"verdict", to_string(r.verdict)},
                {"amplitude", {r.amplitude[0], r.amplitude[1], r.amplitude[2]}},
                {"period", r.period},
                {"period_cv", r.period_cv},
                {"cycles", r.cycles},
                {"equilibrium_distance", r.equilibrium_distance},
                {"envelope_ratio", r.envelope_ratio}};
}

json to_json(const RegionGrid& grid) {
    json cells = json::array();
    for (const auto& cell : grid.cells) {
        json c{{"c", cell.c},
               {"eta", cell.eta},
               {"status", to_string(cell.status)}};
        if (cell.status == CellStatus::bifurcation) {
            c["critical_value"] = cell.critical_delay;
            c["bin"] = bin_label(grid.opts.bin_edges, cell.bin);
        }
        cells.push_back(std::move(c));
    }
    return json{{"alpha", grid.opts.alpha},
                {"kind", to_string(grid.opts.kind)},
                {"c_values", grid.c_values},
                {"eta_values", grid.eta_values},
                {"cells", std::move(cells)}};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,x1,x2,x3\n";
    for (std::size_t i = 0; i < tr.size(); ++i)
        os << fmt(tr.t[i]) << ',' << fmt(tr.x1[i]) << ',' << fmt(tr.x2[i]) << ','
           << fmt(tr.x3[i]) << '\n';
}

void write_region_csv(std::ostream& os, const RegionGrid& grid) {
    os << "c,eta,status,critical_value,bin\n";
    for (const auto& cell : grid.cells) {
        os << fmt(cell.c) << ',' << fmt(cell.eta) << ',' << to_string(cell.status)
           << ',';
        if (cell.status == CellStatus::bifurcation)
            os << fmt(cell.critical_delay);
        os << ',' << bin_label(grid.opts.bin_edges, cell.bin) << '\n';
    }
}

} // namespace hpa
