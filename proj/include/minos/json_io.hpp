#pragma once

// JSON encodings of every artifact the toolkit reads or writes.

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "minos/cluster.hpp"
#include "minos/features.hpp"
#include "minos/predict.hpp"
#include "minos/refset.hpp"

namespace minos {

using Json = nlohmann::ordered_json;

/// Two-space indent and a trailing newline. Doubles use the shortest
/// representation that parses back to the same value.
std::string dump_json(const Json& j);

/// Throws ParseError with the line of the first syntax error.
Json parse_json(std::string_view text, const std::string& source);

Json to_json(const SpikeVector& v);
Json to_json(const PowerSummary& s);
Json to_json(const UtilizationPoint& u);
Json to_json(const SpikeMagnitudes& m);
Json to_json(const ScalingProfile& p);
Json to_json(const WorkloadRecord& r);
Json to_json(const ReferenceSet& set);
Json to_json(const Dendrogram& d);
Json to_json(const KMeansModel& m);
Json to_json(const CapRecommendation& r);
Json to_json(const EvaluationReport& r);

PowerSummary power_summary_from_json(const Json& j);
UtilizationPoint utilization_from_json(const Json& j);
SpikeMagnitudes magnitudes_from_json(const Json& j);
ScalingProfile scaling_profile_from_json(const Json& j);
WorkloadRecord workload_record_from_json(const Json& j);
/// Throws SchemaVersion for files written by a newer schema.
ReferenceSet reference_set_from_json(const Json& j, const std::string& source);

/// Per-workload feature document produced by `ingest`.
struct FeatureDocument {
    std::string workload;
    std::string config;
    SpikeVector spike_vector;
    PowerSummary summary;
    std::optional<UtilizationPoint> utilization;
    SpikeMagnitudes magnitudes;

    /// `workload/config`, or just the workload when config is empty.
    std::string id() const;
};

Json to_json(const FeatureDocument& doc);
FeatureDocument feature_document_from_json(const Json& j, const std::string& source);
TargetFeatures target_from_features(const FeatureDocument& doc);

}  // namespace minos
