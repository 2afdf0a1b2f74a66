#pragma once

// JSON documents for training instances, weight assignments, variable
// assignments, witness boxes, schedules, and the compile sidecar. Emission
// is canonical: object keys sorted, every number carried as an exact
// rational string, arrays in declaration order, so equal values serialize
// to identical bytes.

#include <json.hpp>

#include "etrnn/compile.hpp"

namespace etrnn {

using Json = nlohmann::json;

// Two-space indented dump with a trailing newline.
std::string canonical_dump(const Json& j);

// 64-bit FNV-1a of a byte string, as 16 hex digits; tags inputs in meta.
std::string fnv1a64_hex(std::string_view bytes);

Json term_to_json(const Term& t);
Term term_from_json(const Json& j);

Json schedule_to_json(const WitnessExtension& sched);
WitnessExtension schedule_from_json(const Json& j);

// The instance document keeps the meta object verbatim so that load
// followed by save is byte-identical.
struct InstanceDocument {
    TrainingInstance instance;
    Json meta;
};

Json instance_to_json(const TrainingInstance& inst, const Json& meta);
InstanceDocument instance_from_json(const Json& j, const Signature& sig);

// Standard meta block: neuron/edge/data counts plus the tool version and
// a hash label of the source bytes the instance was built from.
Json make_meta(const TrainingInstance& inst, const std::string& source_hash);

Json weights_to_json(const WeightAssignment& wb);
WeightAssignment weights_from_json(const Json& j);

Json assignment_to_json(const std::map<std::string, Rational>& a);
std::map<std::string, Rational> assignment_from_json(const Json& j);

Json box_to_json(const std::map<std::string, RatInterval>& box);
std::map<std::string, RatInterval> box_from_json(const Json& j);

// Compile sidecar: everything the witness maps need besides the instance.
struct Sidecar {
    GadgetIndex index;
    WitnessExtension schedule;
    std::vector<std::string> source_variables;
};

Json sidecar_to_json(const Sidecar& sc);
Sidecar sidecar_from_json(const Json& j);

} // namespace etrnn
