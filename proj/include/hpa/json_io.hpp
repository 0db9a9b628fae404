#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hpa/bifurcation.hpp"
#include "hpa/fractional.hpp"
#include "hpa/kernels.hpp"
#include "hpa/model.hpp"
#include "hpa/simulate.hpp"
#include "hpa/stability.hpp"

namespace hpa {

using json = nlohmann::json;

// SystemParams <-> {"w1":..,"w2":..,"w3":..,"k3":..,
//                   "f1":{"k":..,"eta":..,"c":..,"alpha":..},"f2":{...}}
json to_json(const HillFeedback& f);
HillFeedback hill_from_json(const json& j);
json to_json(const SystemParams& p);
SystemParams params_from_json(const json& j);

json to_json(const Equilibrium& e);

// DelayKernel <-> {"type":"dirac","tau":..} | {"type":"gamma","n":..,"beta":..}
json to_json(const DelayKernel& k);
DelayKernel kernel_from_json(const json& j);
json to_json(const KernelSet& ks);
KernelSet kernel_set_from_json(const json& j);

json to_json(const StabilityReport& r);
json to_json(const CrossingPoint& cp);
json to_json(const OscillationReport& r);
json to_json(const RegionGrid& grid);

/// Trajectory CSV, header "t,x1,x2,x3", fixed formatting (deterministic
/// output for identical inputs).
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

/// Region grid CSV, header "c,eta,status,critical_value,bin".
void write_region_csv(std::ostream& os, const RegionGrid& grid);

std::string to_string(KernelKind k);
std::string to_string(Verdict v);

} // namespace hpa
