#pragma once

// Telemetry ingest: energy-counter differentiation, alpha filtering and
// activity-based trimming of idle head/tail regions.
//
// Units are fixed at this boundary: timestamps in microseconds, energy in
// microjoules, power in watts. One microjoule per microsecond is one watt.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace minos {

struct RawSample {
    std::int64_t timestamp_us = 0;
    std::uint64_t energy_uj = 0;
    std::uint64_t activity = 0;

    friend bool operator==(const RawSample&, const RawSample&) = default;
};

enum class CounterPolicy {
    Reject,    // a decreasing counter is an ingest error
    Unwrap64,  // a decreasing counter is treated as a 64-bit wrap
};

/// Raw samples as read from an energy-accumulator log. `has_activity` is
/// false for formats without a busy-cycle column; trimming is then skipped.
class RawSampleSeries {
public:
    RawSampleSeries(std::vector<RawSample> samples, double device_tdp_w, bool has_activity = true);

    std::span<const RawSample> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double device_tdp_w() const { return device_tdp_w_; }
    bool has_activity() const { return has_activity_; }

private:
    std::vector<RawSample> samples_;
    double device_tdp_w_;
    bool has_activity_;
};

struct PowerSample {
    std::int64_t timestamp_us = 0;
    double watts = 0.0;

    friend bool operator==(const PowerSample&, const PowerSample&) = default;
};

/// Analysis-ready trace: filtered power with its TDP context.
class PowerTrace {
public:
    PowerTrace(std::vector<PowerSample> samples, double device_tdp_w, bool trimmed);

    std::span<const PowerSample> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double device_tdp_w() const { return device_tdp_w_; }
    bool trimmed() const { return trimmed_; }

    /// Wall-clock span from the first to the last retained sample, seconds.
    double duration_s() const;

private:
    std::vector<PowerSample> samples_;
    double device_tdp_w_;
    bool trimmed_;
};

inline constexpr double kDefaultAlpha = 0.5;

/// P_inst[i] = (e[i+1] - e[i]) / (t[i+1] - t[i]), stamped at t[i+1].
std::vector<PowerSample> derive_power(const RawSampleSeries& raw,
                                      CounterPolicy policy = CounterPolicy::Reject);

/// out[0] = in[0]; out[i] = alpha * in[i] + (1 - alpha) * in[i-1].
std::vector<PowerSample> alpha_filter(std::span<const PowerSample> power,
                                      double alpha = kDefaultAlpha);

/// Span of indices [first, last] with non-zero activity.
struct ActiveSpan {
    std::size_t first = 0;
    std::size_t last = 0;
};

ActiveSpan find_active_span(std::span<const std::uint64_t> activity);

/// Keeps the samples from the first through the last non-zero activity
/// entry. `activity[i]` describes the interval that ends at `power[i]`.
PowerTrace trim_idle(std::span<const PowerSample> power,
                     std::span<const std::uint64_t> activity,
                     double device_tdp_w);

/// Overload for a series produced by derive_power() from `raw` (or already
/// index-aligned with it). The busy-cycle count of raw[i + 1] covers the
/// interval ending at derived sample i.
PowerTrace trim_idle(const RawSampleSeries& raw, std::span<const PowerSample> power);

/// Idle-trim the trace, or wrap it untrimmed when no activity is available.
struct IngestOptions {
    double alpha = kDefaultAlpha;
    CounterPolicy counter_policy = CounterPolicy::Reject;
};

PowerTrace process_raw(const RawSampleSeries& raw, const IngestOptions& options = {});

/// Pre-derived power with optional activity: filter, then trim when possible.
PowerTrace process_power(std::span<const PowerSample> power,
                         std::optional<std::span<const std::uint64_t>> activity,
                         double device_tdp_w,
                         const IngestOptions& options = {});

}  // namespace minos
