#include "minos/json_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "minos/error.hpp"

namespace minos {

namespace {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_number(const std::string& text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw Error(ErrorCode::ParseError, "expected a number, got '" + text + "'");
    }
    return v;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json neighbor_json(const NeighborResult& n) { return Json{{"id", n.neighbor}, {"distance", n.distance}}; }

// Wraps nlohmann's type/key errors so callers only see minos::Error.
template <typename F>
auto guarded(const std::string& source, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, source + ": " + e.what());
    }
}

}  // namespace

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(std::string_view text, const std::string& source) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        std::size_t line = 1;
        const auto end = std::min<std::size_t>(e.byte, text.size());
        for (std::size_t i = 0; i + 1 < end; ++i) {
            if (text[i] == '\n') {
                ++line;
            }
        }
        throw ParseError(source, line, e.what());
    }
}

Json to_json(const SpikeVector& v) {
    return Json{{"bin_width", v.bin_width},
                {"values", v.values},
                {"total_spikes", v.total_spikes},
                {"clamped", v.clamped}};
}

Json to_json(const PowerSummary& s) {
    return Json{{"mean_rel_tdp", s.mean_rel_tdp},
                {"p90_rel_tdp", s.p90_rel_tdp},
                {"p95_rel_tdp", s.p95_rel_tdp},
                {"p99_rel_tdp", s.p99_rel_tdp},
                {"max_rel_tdp", s.max_rel_tdp}};
}

Json to_json(const UtilizationPoint& u) {
    return Json{{"app_sm_util", u.app_sm_util}, {"app_dram_util", u.app_dram_util}};
}

Json to_json(const SpikeMagnitudes& m) {
    Json out = Json::array();
    for (const auto& b : m.buckets()) {
        out.push_back(Json::array({b.quantum, b.count}));
    }
    return out;
}

Json to_json(const ScalingProfile& p) {
    Json entries = Json::array();
    for (const auto& e : p.entries) {
        entries.push_back(Json{{"freq_cap_mhz", e.freq_mhz},
                               {"p90_rel_tdp", e.p90_rel_tdp},
                               {"p95_rel_tdp", e.p95_rel_tdp},
                               {"p99_rel_tdp", e.p99_rel_tdp},
                               {"perf_degradation_pct", e.perf_degradation_pct}});
    }
    Json times = nullptr;
    if (p.profiling_times_s) {
        times = Json::object();
        for (const auto& [f, t] : *p.profiling_times_s) {
            times[format_number(f)] = t;
        }
    }
    return Json{{"uncapped_freq_mhz", p.uncapped_freq_mhz},
                {"uncapped_runtime_s", p.uncapped_runtime_s},
                {"entries", entries},
                {"profiling_times_s", times}};
}

Json to_json(const WorkloadRecord& r) {
    return Json{{"id", r.id},
                {"largest", r.largest},
                {"spike_magnitudes_q4", to_json(r.magnitudes)},
                {"summary", to_json(r.summary)},
                {"utilization", r.utilization ? to_json(*r.utilization) : Json(nullptr)},
                {"scaling_profile", to_json(r.profile)}};
}

Json to_json(const ReferenceSet& set) {
    Json workloads = Json::array();
    for (const auto& [id, r] : set.records()) {
        workloads.push_back(to_json(r));
    }
    return Json{{"schema_version", set.schema_version()},
                {"device_tdp_w", set.device_tdp_w()},
                {"workloads", workloads}};
}

Json to_json(const Dendrogram& d) {
    const auto n = d.leaves.size();
    auto node = [&](std::size_t id) { return id < n ? Json(d.leaves[id]) : Json(id - n); };
    Json merges = Json::array();
    for (const auto& m : d.merges) {
        merges.push_back(Json{{"a", node(m.a)}, {"b", node(m.b)}, {"dist", m.distance}, {"size", m.size}});
    }
    return Json{{"metric", "cosine"},
                {"linkage", std::string(to_string(d.linkage))},
                {"leaves", d.leaves},
                {"excluded", d.excluded},
                {"merges", merges}};
}

Json to_json(const KMeansModel& m) {
    Json centroids = Json::array();
    for (const auto& c : m.centroids) {
        centroids.push_back(to_json(c));
    }
    Json assignments = Json::object();
    for (const auto& [id, c] : m.assignments) {
        assignments[id] = c;
    }
    return Json{{"k", m.k},
                {"seed", m.seed},
                {"centroids", centroids},
                {"assignments", assignments},
                {"silhouette", optional_number(m.silhouette)}};
}

Json to_json(const CapRecommendation& r) {
    return Json{{"workload", r.workload},
                {"objective", std::string(to_string(r.objective))},
                {"chosen_freq_mhz", r.chosen_freq_mhz},
                {"neighbor", neighbor_json(r.neighbor)},
                {"neighbor_kind", std::string(to_string(r.neighbor_kind))},
                {"bin_width", optional_number(r.bin_width)},
                {"bound", r.bound},
                {"percentile", static_cast<int>(r.percentile)},
                {"predicted_value", r.predicted_value},
                {"infeasible", r.infeasible},
                {"warnings", r.warnings}};
}

Json to_json(const EvaluationReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries) {
        Json baseline = nullptr;
        if (e.baseline) {
            baseline = Json{{"neighbor", neighbor_json(e.baseline->neighbor)},
                            {"chosen_freq_mhz", e.baseline->chosen_freq_mhz},
                            {"observed", e.baseline->observed},
                            {"error", e.baseline->error}};
        }
        entries.push_back(Json{{"workload", e.workload},
                               {"neighbor", neighbor_json(e.neighbor)},
                               {"neighbor_kind", std::string(to_string(e.neighbor_kind))},
                               {"bin_width", optional_number(e.bin_width)},
                               {"chosen_freq_mhz", e.chosen_freq_mhz},
                               {"predicted", e.predicted},
                               {"observed", e.observed},
                               {"error", e.error},
                               {"infeasible", e.infeasible},
                               {"baseline", baseline}});
    }
    Json histogram = Json::array();
    for (const auto& b : r.histogram) {
        histogram.push_back(Json{{"lower", b.lower},
                                 {"upper", std::isfinite(b.upper) ? Json(b.upper) : Json(nullptr)},
                                 {"count", b.count},
                                 {"mean_error", b.mean_error}});
    }
    const double bound = r.objective == Objective::PowerCentric ? r.bounds.power_multiple : r.bounds.perf_pct;
    return Json{{"objective", std::string(to_string(r.objective))},
                {"bound", bound},
                {"percentile", static_cast<int>(r.bounds.percentile)},
                {"mean_abs_error", r.mean_abs_error},
                {"baseline_mean_abs_error", optional_number(r.baseline_mean_abs_error)},
                {"entries", entries},
                {"histogram", histogram}};
}

PowerSummary power_summary_from_json(const Json& j) {
    PowerSummary s;
    s.mean_rel_tdp = j.at("mean_rel_tdp").get<double>();
    s.p90_rel_tdp = j.at("p90_rel_tdp").get<double>();
    s.p95_rel_tdp = j.at("p95_rel_tdp").get<double>();
    s.p99_rel_tdp = j.at("p99_rel_tdp").get<double>();
    s.max_rel_tdp = j.at("max_rel_tdp").get<double>();
    return s;
}

UtilizationPoint utilization_from_json(const Json& j) {
    return {j.at("app_sm_util").get<double>(), j.at("app_dram_util").get<double>()};
}

SpikeMagnitudes magnitudes_from_json(const Json& j) {
    std::vector<SpikeMagnitudes::Bucket> buckets;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2) {
            throw Error(ErrorCode::ParseError, "spike magnitude buckets must be [quantum, count] pairs");
        }
        buckets.push_back({pair.at(0).get<std::int64_t>(), pair.at(1).get<std::uint64_t>()});
    }
    return SpikeMagnitudes(std::move(buckets));
}

ScalingProfile scaling_profile_from_json(const Json& j) {
    ScalingProfile p;
    p.uncapped_freq_mhz = j.at("uncapped_freq_mhz").get<double>();
    p.uncapped_runtime_s = j.at("uncapped_runtime_s").get<double>();
    for (const auto& e : j.at("entries")) {
        p.entries.push_back({e.at("freq_cap_mhz").get<double>(), e.at("p90_rel_tdp").get<double>(),
                             e.at("p95_rel_tdp").get<double>(), e.at("p99_rel_tdp").get<double>(),
                             e.at("perf_degradation_pct").get<double>()});
    }
    if (j.contains("profiling_times_s") && !j.at("profiling_times_s").is_null()) {
        std::map<double, double> times;
        for (const auto& [key, value] : j.at("profiling_times_s").items()) {
            times[parse_number(key)] = value.get<double>();
        }
        p.profiling_times_s = std::move(times);
    }
    return p;
}

WorkloadRecord workload_record_from_json(const Json& j) {
    WorkloadRecord r;
    r.id = j.at("id").get<std::string>();
    r.largest = j.value("largest", false);
    r.magnitudes = magnitudes_from_json(j.at("spike_magnitudes_q4"));
    r.summary = power_summary_from_json(j.at("summary"));
    if (j.contains("utilization") && !j.at("utilization").is_null()) {
        r.utilization = utilization_from_json(j.at("utilization"));
    }
    r.profile = scaling_profile_from_json(j.at("scaling_profile"));
    return r;
}

ReferenceSet reference_set_from_json(const Json& j, const std::string& source) {
    return guarded(source, [&] {
        const auto version = j.at("schema_version").get<int>();
        if (version > ReferenceSet::kSchemaVersion) {
            throw Error(ErrorCode::SchemaVersion, source + ": schema_version " + std::to_string(version) +
                                                      " is newer than supported (" +
                                                      std::to_string(ReferenceSet::kSchemaVersion) + ")");
        }
        ReferenceSet set(j.at("device_tdp_w").get<double>());
        for (const auto& w : j.at("workloads")) {
            set.add(workload_record_from_json(w));
        }
        return set;
    });
}

std::string FeatureDocument::id() const { return config.empty() ? workload : workload + "/" + config; }

Json to_json(const FeatureDocument& doc) {
    Json vec = to_json(doc.spike_vector);
    return Json{{"workload", doc.workload},
                {"config", doc.config},
                {"spike_vector", vec},
                {"summary", to_json(doc.summary)},
                {"utilization", doc.utilization ? to_json(*doc.utilization) : Json(nullptr)},
                {"spike_magnitudes_q4", to_json(doc.magnitudes)}};
}

FeatureDocument feature_document_from_json(const Json& j, const std::string& source) {
    return guarded(source, [&] {
        FeatureDocument doc;
        doc.workload = j.at("workload").get<std::string>();
        doc.config = j.value("config", std::string());
        const auto& v = j.at("spike_vector");
        doc.spike_vector.bin_width = v.at("bin_width").get<double>();
        doc.spike_vector.values = v.at("values").get<std::vector<double>>();
        doc.spike_vector.total_spikes = v.at("total_spikes").get<std::uint64_t>();
        doc.spike_vector.clamped = v.value("clamped", std::uint64_t{0});
        doc.summary = power_summary_from_json(j.at("summary"));
        if (j.contains("utilization") && !j.at("utilization").is_null()) {
            doc.utilization = utilization_from_json(j.at("utilization"));
        }
        if (!j.contains("spike_magnitudes_q4")) {
            throw Error(ErrorCode::ParseError, source + ": feature document lacks spike_magnitudes_q4");
        }
        doc.magnitudes = magnitudes_from_json(j.at("spike_magnitudes_q4"));
        return doc;
    });
}

TargetFeatures target_from_features(const FeatureDocument& doc) {
    return TargetFeatures{doc.id(), doc.magnitudes, doc.summary, doc.utilization};
}

}  // namespace minos
