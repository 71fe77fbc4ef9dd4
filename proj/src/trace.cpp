#include "minos/trace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "minos/error.hpp"

namespace minos {

RawSampleSeries::RawSampleSeries(std::vector<RawSample> samples, double device_tdp_w, bool has_activity)
    : samples_(std::move(samples)), device_tdp_w_(device_tdp_w), has_activity_(has_activity) {
    if (!(device_tdp_w_ > 0.0) || !std::isfinite(device_tdp_w_)) {
        throw Error(ErrorCode::InvalidParameter, "device TDP must be positive");
    }
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        if (samples_[i].timestamp_us <= samples_[i - 1].timestamp_us) {
            throw Error(ErrorCode::InvalidRecord,
                        "timestamps must be strictly increasing (sample " + std::to_string(i) + ")");
        }
    }
}

PowerTrace::PowerTrace(std::vector<PowerSample> samples, double device_tdp_w, bool trimmed)
    : samples_(std::move(samples)), device_tdp_w_(device_tdp_w), trimmed_(trimmed) {
    if (!(device_tdp_w_ > 0.0) || !std::isfinite(device_tdp_w_)) {
        throw Error(ErrorCode::InvalidParameter, "device TDP must be positive");
    }
    if (samples_.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "a power trace needs at least 2 samples");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!(samples_[i].watts >= 0.0) || !std::isfinite(samples_[i].watts)) {
            throw Error(ErrorCode::InvalidRecord, "negative or non-finite power at sample " + std::to_string(i));
        }
        if (i > 0 && samples_[i].timestamp_us <= samples_[i - 1].timestamp_us) {
            throw Error(ErrorCode::InvalidRecord,
                        "timestamps must be strictly increasing (sample " + std::to_string(i) + ")");
        }
    }
}

double PowerTrace::duration_s() const {
    return static_cast<double>(samples_.back().timestamp_us - samples_.front().timestamp_us) * 1e-6;
}

std::vector<PowerSample> derive_power(const RawSampleSeries& raw, CounterPolicy policy) {
    const auto samples = raw.samples();
    if (samples.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "deriving power needs at least 2 counter samples");
    }
    std::vector<PowerSample> out;
    out.reserve(samples.size() - 1);
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const auto& a = samples[i];
        const auto& b = samples[i + 1];
        if (b.energy_uj < a.energy_uj && policy == CounterPolicy::Reject) {
            throw Error(ErrorCode::CounterRegression,
                        "energy counter decreased between samples " + std::to_string(i) + " and " +
                            std::to_string(i + 1));
        }
        // Unsigned subtraction is the 2^64 unwrap.
        const std::uint64_t delta_e = b.energy_uj - a.energy_uj;
        const auto delta_t = b.timestamp_us - a.timestamp_us;
        out.push_back({b.timestamp_us, static_cast<double>(delta_e) / static_cast<double>(delta_t)});
    }
    return out;
}

std::vector<PowerSample> alpha_filter(std::span<const PowerSample> power, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "alpha must lie in (0, 1]");
    }
    if (power.empty()) {
        throw Error(ErrorCode::InsufficientData, "alpha filter needs a non-empty series");
    }
    std::vector<PowerSample> out(power.begin(), power.end());
    for (std::size_t i = 1; i < power.size(); ++i) {
        out[i].watts = alpha * power[i].watts + (1.0 - alpha) * power[i - 1].watts;
    }
    return out;
}

ActiveSpan find_active_span(std::span<const std::uint64_t> activity) {
    const auto first = std::find_if(activity.begin(), activity.end(), [](auto a) { return a > 0; });
    if (first == activity.end()) {
        throw Error(ErrorCode::NoActivity, "no sample reports GPU activity");
    }
    const auto last = std::find_if(activity.rbegin(), activity.rend(), [](auto a) { return a > 0; });
    return {static_cast<std::size_t>(first - activity.begin()),
            static_cast<std::size_t>(activity.rend() - last) - 1};
}

PowerTrace trim_idle(std::span<const PowerSample> power, std::span<const std::uint64_t> activity,
                     double device_tdp_w) {
    if (power.size() != activity.size()) {
        throw Error(ErrorCode::InvalidParameter, "power and activity series are not index-aligned");
    }
    const auto span = find_active_span(activity);
    std::vector<PowerSample> kept(power.begin() + static_cast<std::ptrdiff_t>(span.first),
                                  power.begin() + static_cast<std::ptrdiff_t>(span.last) + 1);
    return PowerTrace(std::move(kept), device_tdp_w, true);
}

PowerTrace trim_idle(const RawSampleSeries& raw, std::span<const PowerSample> power) {
    if (!raw.has_activity()) {
        throw Error(ErrorCode::InvalidParameter, "series has no activity column; trimming is unavailable");
    }
    const auto samples = raw.samples();
    std::size_t offset = 0;
    if (power.size() + 1 == samples.size()) {
        offset = 1;
    } else if (power.size() != samples.size()) {
        throw Error(ErrorCode::InvalidParameter, "power series is not derived from this raw series");
    }
    std::vector<std::uint64_t> activity;
    activity.reserve(power.size());
    for (std::size_t i = 0; i < power.size(); ++i) {
        activity.push_back(samples[i + offset].activity);
    }
    return trim_idle(power, activity, raw.device_tdp_w());
}

PowerTrace process_raw(const RawSampleSeries& raw, const IngestOptions& options) {
    auto filtered = alpha_filter(derive_power(raw, options.counter_policy), options.alpha);
    if (!raw.has_activity()) {
        return PowerTrace(std::move(filtered), raw.device_tdp_w(), false);
    }
    return trim_idle(raw, filtered);
}

PowerTrace process_power(std::span<const PowerSample> power,
                         std::optional<std::span<const std::uint64_t>> activity,
                         double device_tdp_w,
                         const IngestOptions& options) {
    auto filtered = alpha_filter(power, options.alpha);
    if (!activity) {
        return PowerTrace(std::move(filtered), device_tdp_w, false);
    }
    return trim_idle(filtered, *activity, device_tdp_w);
}

}  // namespace minos
