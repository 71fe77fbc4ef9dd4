#pragma once

// Workload features: spike-distribution vectors and power percentiles from a
// PowerTrace, and application-level utilization from per-kernel counters.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "minos/trace.hpp"

namespace minos {

/// Spike magnitudes are binned over [kSpikeLower, kSpikeUpper) x TDP.
inline constexpr double kSpikeLower = 0.5;
inline constexpr double kSpikeUpper = 2.0;
/// Smallest accepted bin width; finer bins are below the storage quantum.
inline constexpr double kMinBinWidth = 1e-4;

/// Number of bins for width `c`. When 1.5 is not a multiple of `c` the last
/// bin is short and ends at 2.0. Throws InvalidParameter for c outside
/// [kMinBinWidth, 1.5].
std::size_t bin_count(double bin_width);

/// Lower edge of bin `j`; bin_edge(n) is 2.0.
double bin_edge(std::size_t j, double bin_width, std::size_t n_bins);

/// Bin for a magnitude >= 0.5. Magnitudes >= 2.0 land in the top bin.
std::size_t bin_index(double magnitude, double bin_width, std::size_t n_bins);

struct SpikeVector {
    double bin_width = 0.1;
    std::vector<double> values;
    std::uint64_t total_spikes = 0;
    /// Spikes at or above 2.0 x TDP that were counted in the top bin.
    std::uint64_t clamped = 0;
    double device_tdp_w = 0.0;

    bool is_zero() const { return total_spikes == 0; }
    double lower() const { return kSpikeLower; }
    double upper() const { return kSpikeUpper; }
};

/// Relative magnitudes P_filt / TDP of every sample at or above 0.5 x TDP,
/// in time order.
std::vector<double> detect_spikes(const PowerTrace& trace);

SpikeVector build_spike_vector(std::span<const double> magnitudes, double bin_width, double device_tdp_w);

/// Spike magnitudes quantized to 1e-4 of TDP and stored as a sorted
/// histogram, so vectors can be rebuilt at any bin width.
class SpikeMagnitudes {
public:
    static constexpr std::int64_t kQuantaPerTdp = 10000;

    struct Bucket {
        std::int64_t quantum = 0;
        std::uint64_t count = 0;

        friend bool operator==(const Bucket&, const Bucket&) = default;
    };

    SpikeMagnitudes() = default;

    /// Buckets must be strictly increasing in quantum with non-zero counts,
    /// and every quantum must be >= 0.5 x TDP.
    explicit SpikeMagnitudes(std::vector<Bucket> buckets);

    static SpikeMagnitudes from_relative(std::span<const double> magnitudes);

    static std::int64_t quantize(double magnitude);
    static double dequantize(std::int64_t quantum);

    std::span<const Bucket> buckets() const { return buckets_; }
    std::uint64_t total() const { return total_; }
    bool empty() const { return total_ == 0; }

    SpikeVector to_vector(double bin_width, double device_tdp_w) const;

    friend bool operator==(const SpikeMagnitudes& a, const SpikeMagnitudes& b) { return a.buckets_ == b.buckets_; }

private:
    std::vector<Bucket> buckets_;
    std::uint64_t total_ = 0;
};

enum class Percentile { P90 = 90, P95 = 95, P99 = 99 };

/// Parses "90", "95", "99" (optionally prefixed with "p").
Percentile parse_percentile(const std::string& text);

struct PowerSummary {
    double mean_rel_tdp = 0.0;
    double p90_rel_tdp = 0.0;
    double p95_rel_tdp = 0.0;
    double p99_rel_tdp = 0.0;
    double max_rel_tdp = 0.0;

    double at(Percentile p) const;

    friend bool operator==(const PowerSummary&, const PowerSummary&) = default;
};

enum class PercentileScope {
    AllSamples,  // every retained sample
    SpikesOnly,  // samples at or above 0.5 x TDP
};

/// Nearest-rank percentile: the ceil(percent / 100 * N)-th order statistic
/// of an ascending range.
double nearest_rank(std::span<const double> sorted, int percent);

PowerSummary summarize_power(const PowerTrace& trace, PercentileScope scope = PercentileScope::AllSamples);

struct KernelRecord {
    std::string name;
    double duration_ns = 0.0;
    double sm_util = 0.0;
    double dram_util = 0.0;
};

struct UtilizationPoint {
    double app_sm_util = 0.0;
    double app_dram_util = 0.0;

    friend bool operator==(const UtilizationPoint&, const UtilizationPoint&) = default;
};

/// Duration-weighted means of per-kernel SM and DRAM utilization.
UtilizationPoint aggregate_utilization(std::span<const KernelRecord> kernels);

struct CdfPoint {
    double value = 0.0;
    double cumulative_fraction = 0.0;
};

/// Empirical CDF, one point per distinct value.
std::vector<CdfPoint> cdf_points(std::span<const double> values);

/// CDF of every sample's power relative to TDP.
std::vector<CdfPoint> cdf_points(const PowerTrace& trace);

}  // namespace minos
