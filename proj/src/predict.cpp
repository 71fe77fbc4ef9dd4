#include "minos/predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "minos/error.hpp"

namespace minos {

std::string_view to_string(Objective objective) {
    return objective == Objective::PowerCentric ? "PowerCentric" : "PerfCentric";
}

Objective parse_objective(std::string_view text) {
    if (text == "power" || text == "PowerCentric") return Objective::PowerCentric;
    if (text == "perf" || text == "PerfCentric") return Objective::PerfCentric;
    throw Error(ErrorCode::InvalidParameter, "objective must be 'power' or 'perf', got '" + std::string(text) + "'");
}

std::string_view to_string(NeighborKind kind) {
    switch (kind) {
        case NeighborKind::Power: return "power";
        case NeighborKind::Utilization: return "utilization";
        case NeighborKind::MeanPower: return "mean-power";
    }
    return "power";
}

std::vector<double> default_bin_candidates() { return {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.5}; }

TargetFeatures TargetFeatures::from_record(const WorkloadRecord& record) {
    return TargetFeatures{record.id, record.magnitudes, record.summary, record.utilization};
}

BinSizeChoice choose_bin_size(const TargetFeatures& target, const ReferenceSet& refs,
                              std::span<const double> candidates) {
    if (candidates.empty()) {
        throw Error(ErrorCode::InvalidParameter, "no candidate bin widths");
    }
    if (target.magnitudes.empty()) {
        throw Error(ErrorCode::ZeroVector, "target '" + target.id + "' has no spikes to bin");
    }
    std::vector<double> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    BinSizeChoice out;
    double best = std::numeric_limits<double>::infinity();
    for (const double c : sorted) {
        const auto query = target.magnitudes.to_vector(c, refs.device_tdp_w());
        const auto neighbor = nearest_power_neighbor(query, refs.materialize_vectors(c));
        const double err = std::abs(target.summary.p90_rel_tdp - refs.get(neighbor.neighbor).summary.p90_rel_tdp);
        out.errors[c] = err;
        out.neighbors[c] = neighbor;
        if (err < best) {
            best = err;
            out.bin_width = c;
        }
    }
    return out;
}

double cap_power_centric(const ScalingProfile& profile, double bound_multiple, Percentile percentile) {
    if (!(bound_multiple > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "power bound must be positive");
    }
    for (auto it = profile.entries.rbegin(); it != profile.entries.rend(); ++it) {
        if (it->at(percentile) < bound_multiple) {
            return it->freq_mhz;
        }
    }
    throw Error(ErrorCode::NoFeasibleCap,
                "no frequency keeps p" + std::to_string(static_cast<int>(percentile)) + " power below " +
                    std::to_string(bound_multiple) + " x TDP");
}

double cap_perf_centric(const ScalingProfile& profile, double bound_pct, std::optional<double> floor_mhz) {
    if (!(bound_pct >= 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "performance bound must be non-negative");
    }
    for (const auto& e : profile.entries) {
        if (floor_mhz && e.freq_mhz < *floor_mhz) {
            continue;
        }
        if (e.perf_degradation_pct <= bound_pct) {
            return e.freq_mhz;
        }
    }
    throw Error(ErrorCode::NoFeasibleCap,
                "no frequency keeps degradation within " + std::to_string(bound_pct) + "%");
}

namespace {

NeighborResult util_neighbor(const TargetFeatures& target, const ReferenceSet& refs, const PredictOptions& options,
                             std::vector<std::string>& warnings) {
    if (!target.utilization) {
        throw Error(ErrorCode::InvalidParameter, "target '" + target.id + "' has no utilization data");
    }
    const auto points = refs.utilization_points();
    if (options.util_scope == UtilScope::Global) {
        return nearest_util_neighbor(*target.utilization, points);
    }
    // Same-cluster lookup: cluster references together with the target.
    auto all = points;
    const std::string target_key = "\x01target";
    all[target_key] = *target.utilization;
    if (options.util_k < 2 || options.util_k >= all.size()) {
        warnings.push_back("too few utilization points for same-cluster lookup; using global nearest neighbor");
        return nearest_util_neighbor(*target.utilization, points);
    }
    const auto model = kmeans_fit(all, options.util_k, options.seed);
    const auto label = model.assignments.at(target_key);
    std::map<std::string, UtilizationPoint> same;
    for (const auto& [id, p] : points) {
        if (model.assignments.at(id) == label) {
            same.emplace(id, p);
        }
    }
    if (same.empty()) {
        warnings.push_back("target is alone in its utilization cluster; using global nearest neighbor");
        return nearest_util_neighbor(*target.utilization, points);
    }
    return nearest_util_neighbor(*target.utilization, same);
}

void apply_power_cap(CapRecommendation& rec, const ScalingProfile& profile, const Bounds& bounds) {
    rec.bound = bounds.power_multiple;
    rec.percentile = bounds.percentile;
    try {
        rec.chosen_freq_mhz = cap_power_centric(profile, bounds.power_multiple, bounds.percentile);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoFeasibleCap) {
            throw;
        }
        rec.chosen_freq_mhz = profile.min_freq();
        rec.infeasible = true;
        rec.warnings.push_back("no frequency meets the power bound on '" + rec.neighbor.neighbor +
                               "'; returning the grid minimum");
    }
    rec.predicted_value = profile.find(rec.chosen_freq_mhz)->at(bounds.percentile);
}

}  // namespace

CapRecommendation select_optimal_freq(const TargetFeatures& target, const ReferenceSet& refs,
                                      const PredictOptions& options) {
    if (refs.empty()) {
        throw Error(ErrorCode::InsufficientData, "reference set is empty");
    }
    CapRecommendation rec;
    rec.workload = target.id;
    rec.objective = options.objective;
    rec.percentile = options.bounds.percentile;

    if (options.objective == Objective::PerfCentric) {
        rec.neighbor = util_neighbor(target, refs, options, rec.warnings);
        rec.neighbor_kind = NeighborKind::Utilization;
        const auto& profile = refs.get(rec.neighbor.neighbor).profile;
        const double floor = options.bounds.min_freq_mhz.value_or(kDefaultFloorFraction * profile.uncapped_freq_mhz);
        rec.bound = options.bounds.perf_pct;
        rec.chosen_freq_mhz = cap_perf_centric(profile, options.bounds.perf_pct, floor);
        rec.predicted_value = profile.find(rec.chosen_freq_mhz)->perf_degradation_pct;
        return rec;
    }

    if (target.magnitudes.empty()) {
        rec.warnings.push_back("target has no power spikes; power neighbor replaced by utilization neighbor");
        rec.neighbor = util_neighbor(target, refs, options, rec.warnings);
        rec.neighbor_kind = NeighborKind::Utilization;
    } else {
        const double c = options.bin_width ? *options.bin_width
                                           : choose_bin_size(target, refs, options.candidates).bin_width;
        rec.bin_width = c;
        rec.neighbor = nearest_power_neighbor(target.magnitudes.to_vector(c, refs.device_tdp_w()),
                                              refs.materialize_vectors(c));
        rec.neighbor_kind = NeighborKind::Power;
    }
    apply_power_cap(rec, refs.get(rec.neighbor.neighbor).profile, options.bounds);
    return rec;
}

double prediction_error_power(double observed_rel_tdp, double bound_multiple) {
    if (!(bound_multiple > 0.0) || !(observed_rel_tdp >= 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "power error needs a positive bound and non-negative observation");
    }
    return std::max(0.0, (observed_rel_tdp - bound_multiple) / bound_multiple) * 100.0;
}

double prediction_error_perf(double observed_pct, double bound_pct) { return std::max(0.0, observed_pct - bound_pct); }

NeighborResult baseline_mean_power_neighbor(const PowerSummary& target, const ReferenceSet& refs,
                                            std::string_view exclude) {
    std::optional<NeighborResult> best;
    for (const auto& [id, r] : refs.records()) {
        if (id == exclude) {
            continue;
        }
        const double d = std::abs(target.mean_rel_tdp - r.summary.mean_rel_tdp);
        if (!best || d < best->distance) {
            best = NeighborResult{id, d};
        }
    }
    if (!best) {
        throw Error(ErrorCode::InsufficientData, "reference set is empty");
    }
    return *best;
}

CapRecommendation select_baseline_freq(const TargetFeatures& target, const ReferenceSet& refs,
                                       const PredictOptions& options) {
    CapRecommendation rec;
    rec.workload = target.id;
    rec.objective = Objective::PowerCentric;
    rec.neighbor = baseline_mean_power_neighbor(target.summary, refs);
    rec.neighbor_kind = NeighborKind::MeanPower;
    apply_power_cap(rec, refs.get(rec.neighbor.neighbor).profile, options.bounds);
    return rec;
}

std::vector<double> default_distance_edges(Objective objective) {
    if (objective == Objective::PowerCentric) {
        return {0.0, 0.02, 0.05, 0.1, 0.2};
    }
    return {0.0, 5.0, 10.0, 20.0, 40.0};
}

std::vector<HistogramBin> distance_histogram(std::span<const EvaluationEntry> entries, std::span<const double> edges) {
    if (edges.empty()) {
        throw Error(ErrorCode::InvalidParameter, "histogram needs at least one edge");
    }
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw Error(ErrorCode::InvalidParameter, "histogram edges must be strictly increasing");
    }
    std::vector<HistogramBin> bins;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        bins.push_back({edges[k],
                        k + 1 < edges.size() ? edges[k + 1] : std::numeric_limits<double>::infinity(), 0, 0.0});
    }
    // Distances below the first edge fall into the first bin.
    for (const auto& e : entries) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), e.neighbor.distance);
        const auto k = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
        bins[k].count += 1;
        bins[k].mean_error += e.error;
    }
    for (auto& b : bins) {
        if (b.count > 0) {
            b.mean_error /= static_cast<double>(b.count);
        }
    }
    return bins;
}

EvaluationReport holdout_evaluate(const ReferenceSet& refs, const PredictOptions& options,
                                  std::span<const double> distance_edges) {
    if (refs.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "hold-one-out needs at least 2 workloads");
    }
    EvaluationReport report;
    report.objective = options.objective;
    report.bounds = options.bounds;
    const bool power = options.objective == Objective::PowerCentric;

    double baseline_sum = 0.0;
    for (const auto& [id, record] : refs.records()) {
        const auto rest = refs.without(id);
        const auto target = TargetFeatures::from_record(record);
        const auto rec = select_optimal_freq(target, rest, options);

        EvaluationEntry entry;
        entry.workload = id;
        entry.neighbor = rec.neighbor;
        entry.neighbor_kind = rec.neighbor_kind;
        entry.bin_width = rec.bin_width;
        entry.chosen_freq_mhz = rec.chosen_freq_mhz;
        entry.predicted = rec.predicted_value;
        entry.infeasible = rec.infeasible;
        if (power) {
            entry.observed = record.profile.percentile_at(rec.chosen_freq_mhz, options.bounds.percentile);
            entry.error = prediction_error_power(entry.observed, options.bounds.power_multiple);

            const auto base = select_baseline_freq(target, rest, options);
            BaselineOutcome outcome;
            outcome.neighbor = base.neighbor;
            outcome.chosen_freq_mhz = base.chosen_freq_mhz;
            outcome.observed = record.profile.percentile_at(base.chosen_freq_mhz, options.bounds.percentile);
            outcome.error = prediction_error_power(outcome.observed, options.bounds.power_multiple);
            baseline_sum += std::abs(outcome.error);
            entry.baseline = outcome;
        } else {
            entry.observed = record.profile.degradation_at(rec.chosen_freq_mhz);
            entry.error = prediction_error_perf(entry.observed, options.bounds.perf_pct);
        }
        report.entries.push_back(std::move(entry));
    }

    double sum = 0.0;
    for (const auto& e : report.entries) {
        sum += std::abs(e.error);
    }
    const auto n = static_cast<double>(report.entries.size());
    report.mean_abs_error = sum / n;
    if (power) {
        report.baseline_mean_abs_error = baseline_sum / n;
    }
    report.histogram = distance_histogram(report.entries, distance_edges);
    return report;
}

double profiling_savings(const std::map<double, double>& times_s, double base_freq_mhz) {
    const auto base = times_s.find(base_freq_mhz);
    if (base == times_s.end()) {
        throw Error(ErrorCode::InvalidParameter,
                    "no profiling time recorded at the base frequency " + std::to_string(base_freq_mhz) + " MHz");
    }
    double total = 0.0;
    for (const auto& [f, t] : times_s) {
        if (!(t > 0.0)) {
            throw Error(ErrorCode::InvalidParameter, "profiling times must be positive");
        }
        total += t;
    }
    return (1.0 - base->second / total) * 100.0;
}

}  // namespace minos
