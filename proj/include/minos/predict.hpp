#pragma once

// Frequency-cap selection by nearest-neighbor transfer of scaling profiles,
// the mean-power baseline, hold-one-out evaluation and profiling savings.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minos/cluster.hpp"
#include "minos/features.hpp"
#include "minos/refset.hpp"

namespace minos {

enum class Objective { PowerCentric, PerfCentric };

std::string_view to_string(Objective objective);
/// Accepts "power" / "perf" and the long names.
Objective parse_objective(std::string_view text);

enum class UtilScope {
    Global,       // arg-min over every reference
    SameCluster,  // arg-min over the target's K-means cluster
};

inline constexpr double kDefaultPowerBound = 1.3;
inline constexpr double kDefaultPerfBoundPct = 5.0;
inline constexpr double kDefaultFloorFraction = 0.6;

std::vector<double> default_bin_candidates();

struct Bounds {
    /// PowerCentric bound as a multiple of TDP.
    double power_multiple = kDefaultPowerBound;
    /// PerfCentric bound on degradation, percent.
    double perf_pct = kDefaultPerfBoundPct;
    Percentile percentile = Percentile::P90;
    /// PerfCentric frequency floor; defaults to kDefaultFloorFraction of the
    /// neighbor's uncapped frequency.
    std::optional<double> min_freq_mhz;
};

struct PredictOptions {
    Objective objective = Objective::PowerCentric;
    Bounds bounds;
    /// Fixed bin width; empty selects one from `candidates`.
    std::optional<double> bin_width;
    std::vector<double> candidates = default_bin_candidates();
    UtilScope util_scope = UtilScope::Global;
    std::size_t util_k = 3;
    std::uint64_t seed = 0;
};

/// What is known about a workload after a single uncapped profiling run.
struct TargetFeatures {
    std::string id;
    SpikeMagnitudes magnitudes;
    PowerSummary summary;
    std::optional<UtilizationPoint> utilization;

    static TargetFeatures from_record(const WorkloadRecord& record);
};

struct BinSizeChoice {
    double bin_width = 0.0;
    /// |p90(target) - p90(neighbor)| per candidate width.
    std::map<double, double> errors;
    std::map<double, NeighborResult> neighbors;
};

/// Picks the width whose power neighbor best matches the target's uncapped
/// p90; ties go to the smaller width.
BinSizeChoice choose_bin_size(const TargetFeatures& target, const ReferenceSet& refs,
                              std::span<const double> candidates);

/// Highest frequency whose percentile power is strictly below
/// bound_multiple x TDP. Throws NoFeasibleCap.
double cap_power_centric(const ScalingProfile& profile, double bound_multiple = kDefaultPowerBound,
                         Percentile percentile = Percentile::P90);

/// Lowest frequency at or above `floor_mhz` whose degradation is at most
/// `bound_pct`. Throws NoFeasibleCap.
double cap_perf_centric(const ScalingProfile& profile, double bound_pct = kDefaultPerfBoundPct,
                        std::optional<double> floor_mhz = std::nullopt);

enum class NeighborKind { Power, Utilization, MeanPower };

std::string_view to_string(NeighborKind kind);

struct CapRecommendation {
    std::string workload;
    Objective objective = Objective::PowerCentric;
    double chosen_freq_mhz = 0.0;
    NeighborResult neighbor;
    NeighborKind neighbor_kind = NeighborKind::Power;
    /// Width used for the power neighbor (PowerCentric with spikes only).
    std::optional<double> bin_width;
    /// power_multiple for PowerCentric, perf_pct for PerfCentric.
    double bound = 0.0;
    Percentile percentile = Percentile::P90;
    /// The neighbor's percentile power (x TDP) or degradation (%) at the cap.
    double predicted_value = 0.0;
    /// No grid point met the power bound; the grid minimum was returned.
    bool infeasible = false;
    std::vector<std::string> warnings;
};

CapRecommendation select_optimal_freq(const TargetFeatures& target, const ReferenceSet& refs,
                                      const PredictOptions& options);

/// max(0, (observed - bound) / bound) x 100.
double prediction_error_power(double observed_rel_tdp, double bound_multiple = kDefaultPowerBound);
/// max(0, observed - bound).
double prediction_error_perf(double observed_pct, double bound_pct = kDefaultPerfBoundPct);

/// Reference with the closest mean power (|difference of mean_rel_tdp|),
/// ties by workload id.
NeighborResult baseline_mean_power_neighbor(const PowerSummary& target, const ReferenceSet& refs,
                                            std::string_view exclude = {});

/// PowerCentric cap chosen through the mean-power neighbor.
CapRecommendation select_baseline_freq(const TargetFeatures& target, const ReferenceSet& refs,
                                       const PredictOptions& options);

struct BaselineOutcome {
    NeighborResult neighbor;
    double chosen_freq_mhz = 0.0;
    double observed = 0.0;
    double error = 0.0;
};

struct EvaluationEntry {
    std::string workload;
    NeighborResult neighbor;
    NeighborKind neighbor_kind = NeighborKind::Power;
    std::optional<double> bin_width;
    double chosen_freq_mhz = 0.0;
    double predicted = 0.0;
    /// The held-out workload's own value at the chosen cap.
    double observed = 0.0;
    double error = 0.0;
    bool infeasible = false;
    std::optional<BaselineOutcome> baseline;
};

struct HistogramBin {
    double lower = 0.0;
    /// Upper edge; the last bin is open (infinity).
    double upper = 0.0;
    std::size_t count = 0;
    double mean_error = 0.0;
};

struct EvaluationReport {
    Objective objective = Objective::PowerCentric;
    Bounds bounds;
    std::vector<EvaluationEntry> entries;
    double mean_abs_error = 0.0;
    std::optional<double> baseline_mean_abs_error;
    std::vector<HistogramBin> histogram;
};

/// Default histogram edges: cosine distance for PowerCentric, Euclidean
/// utilization distance for PerfCentric.
std::vector<double> default_distance_edges(Objective objective);

/// Bins errors by neighbor distance over [e_k, e_k+1), the last bin open.
std::vector<HistogramBin> distance_histogram(std::span<const EvaluationEntry> entries, std::span<const double> edges);

/// Predicts every workload from all the others and scores the cap against
/// the workload's own scaling profile. PowerCentric runs also score the
/// mean-power baseline.
EvaluationReport holdout_evaluate(const ReferenceSet& refs, const PredictOptions& options,
                                  std::span<const double> distance_edges);

/// (1 - T_f0 / sum T_f) x 100.
double profiling_savings(const std::map<double, double>& times_s, double base_freq_mhz);

}  // namespace minos
