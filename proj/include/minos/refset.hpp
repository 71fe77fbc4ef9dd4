#pragma once

// The reference set: previously profiled workloads with their spike
// magnitudes, power summary, utilization point and frequency-scaling profile.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minos/features.hpp"

namespace minos {

struct ScalingEntry {
    double freq_mhz = 0.0;
    double p90_rel_tdp = 0.0;
    double p95_rel_tdp = 0.0;
    double p99_rel_tdp = 0.0;
    /// Runtime increase over the uncapped run, percent.
    double perf_degradation_pct = 0.0;

    double at(Percentile p) const;

    friend bool operator==(const ScalingEntry&, const ScalingEntry&) = default;
};

/// Capping cannot speed a run up beyond measurement noise.
inline constexpr double kDegradationTolerancePct = 1.0;

struct ScalingProfile {
    std::vector<ScalingEntry> entries;  // ascending, unique frequencies
    double uncapped_freq_mhz = 0.0;
    double uncapped_runtime_s = 0.0;
    /// Wall time of each profiling run, keyed by frequency.
    std::optional<std::map<double, double>> profiling_times_s;

    /// Throws InvalidRecord describing the first violated invariant.
    void validate() const;

    std::vector<double> grid() const;
    double min_freq() const { return entries.front().freq_mhz; }

    /// Entry at exactly `freq_mhz`, or nullptr.
    const ScalingEntry* find(double freq_mhz) const;

    /// Value at `freq_mhz`, linearly interpolated between grid points.
    /// Throws InvalidParameter outside the profiled range.
    double percentile_at(double freq_mhz, Percentile p) const;
    double degradation_at(double freq_mhz) const;

    friend bool operator==(const ScalingProfile&, const ScalingProfile&) = default;
};

struct WorkloadRecord {
    /// `app/config`; the app is everything before the first '/'.
    std::string id;
    /// Marks the largest input of its app for one-input-per-workload views.
    bool largest = false;
    SpikeMagnitudes magnitudes;
    PowerSummary summary;
    std::optional<UtilizationPoint> utilization;
    ScalingProfile profile;

    std::string app() const;
    std::string config() const;

    friend bool operator==(const WorkloadRecord&, const WorkloadRecord&) = default;
};

std::string app_of(std::string_view workload_id);

WorkloadRecord make_record(std::string id, std::span<const double> magnitudes, const PowerSummary& summary,
                           std::optional<UtilizationPoint> utilization, ScalingProfile profile,
                           bool largest = false);

class ReferenceSet {
public:
    static constexpr int kSchemaVersion = 1;

    explicit ReferenceSet(double device_tdp_w);

    double device_tdp_w() const { return device_tdp_w_; }
    int schema_version() const { return kSchemaVersion; }

    /// Throws Conflict on a duplicate id and InvalidRecord on a bad profile.
    void add(WorkloadRecord record);
    void remove(std::string_view id);

    bool contains(std::string_view id) const;
    const WorkloadRecord& get(std::string_view id) const;
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    std::vector<std::string> ids() const;
    const std::map<std::string, WorkloadRecord, std::less<>>& records() const { return records_; }

    /// Spike vectors rebuilt from the stored magnitudes at width `c`.
    std::map<std::string, SpikeVector> materialize_vectors(double bin_width) const;

    /// Utilization points of the workloads that have one.
    std::map<std::string, UtilizationPoint> utilization_points() const;

    /// Per app, keeps its only config or the one flagged `largest`. Throws
    /// AmbiguousSelection when an app with several configs has no single
    /// flagged one.
    ReferenceSet one_input_per_workload() const;

    ReferenceSet without(std::string_view id) const;

    friend bool operator==(const ReferenceSet&, const ReferenceSet&) = default;

private:
    double device_tdp_w_;
    std::map<std::string, WorkloadRecord, std::less<>> records_;
};

inline constexpr std::string_view kRefsetExtension = ".minosref.json";

std::string refset_to_string(const ReferenceSet& set);
ReferenceSet refset_from_string(std::string_view text, const std::string& source = "<memory>");

/// Writes through a temporary file in the same directory and renames it into
/// place.
void save_refset(const ReferenceSet& set, const std::filesystem::path& path);
ReferenceSet load_refset(const std::filesystem::path& path);

}  // namespace minos
