#include "minos/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "minos/error.hpp"

namespace minos {

namespace {

constexpr double kSpan = kSpikeUpper - kSpikeLower;
constexpr double kIntegralTolerance = 1e-9;

double relative(const PowerSample& s, double tdp) { return s.watts / tdp; }

}  // namespace

std::size_t bin_count(double bin_width) {
    if (!std::isfinite(bin_width) || bin_width < kMinBinWidth || bin_width > kSpan) {
        throw Error(ErrorCode::InvalidParameter,
                    "bin width must lie in [" + std::to_string(kMinBinWidth) + ", 1.5], got " +
                        std::to_string(bin_width));
    }
    const double ratio = kSpan / bin_width;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= kIntegralTolerance * std::max(1.0, nearest)) {
        return static_cast<std::size_t>(nearest);
    }
    return static_cast<std::size_t>(std::ceil(ratio));
}

double bin_edge(std::size_t j, double bin_width, std::size_t n_bins) {
    if (j >= n_bins) {
        return kSpikeUpper;
    }
    return kSpikeLower + static_cast<double>(j) * bin_width;
}

std::size_t bin_index(double magnitude, double bin_width, std::size_t n_bins) {
    if (!(magnitude >= kSpikeLower)) {
        throw Error(ErrorCode::InvalidParameter, "spike magnitude below 0.5 x TDP: " + std::to_string(magnitude));
    }
    if (magnitude >= kSpikeUpper) {
        return n_bins - 1;
    }
    const double estimate = std::floor((magnitude - kSpikeLower) / bin_width);
    auto j = static_cast<std::size_t>(std::clamp(estimate, 0.0, static_cast<double>(n_bins - 1)));
    // The quotient can land one bin off near an edge; settle against the
    // edges themselves.
    while (j > 0 && magnitude < bin_edge(j, bin_width, n_bins)) {
        --j;
    }
    while (j + 1 < n_bins && magnitude >= bin_edge(j + 1, bin_width, n_bins)) {
        ++j;
    }
    return j;
}

std::vector<double> detect_spikes(const PowerTrace& trace) {
    std::vector<double> out;
    const double tdp = trace.device_tdp_w();
    for (const auto& s : trace.samples()) {
        const double r = relative(s, tdp);
        if (r >= kSpikeLower) {
            out.push_back(r);
        }
    }
    return out;
}

namespace {

SpikeVector normalize(std::vector<std::uint64_t> counts, std::uint64_t clamped, double bin_width, double tdp) {
    SpikeVector v;
    v.bin_width = bin_width;
    v.device_tdp_w = tdp;
    v.clamped = clamped;
    v.total_spikes = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    v.values.assign(counts.size(), 0.0);
    if (v.total_spikes > 0) {
        const auto total = static_cast<double>(v.total_spikes);
        for (std::size_t j = 0; j < counts.size(); ++j) {
            v.values[j] = static_cast<double>(counts[j]) / total;
        }
    }
    return v;
}

}  // namespace

SpikeVector build_spike_vector(std::span<const double> magnitudes, double bin_width, double device_tdp_w) {
    const auto n = bin_count(bin_width);
    std::vector<std::uint64_t> counts(n, 0);
    std::uint64_t clamped = 0;
    for (const double r : magnitudes) {
        counts[bin_index(r, bin_width, n)] += 1;
        if (r >= kSpikeUpper) {
            ++clamped;
        }
    }
    return normalize(std::move(counts), clamped, bin_width, device_tdp_w);
}

SpikeMagnitudes::SpikeMagnitudes(std::vector<Bucket> buckets) : buckets_(std::move(buckets)) {
    const auto floor_q = quantize(kSpikeLower);
    for (std::size_t i = 0; i < buckets_.size(); ++i) {
        if (buckets_[i].count == 0) {
            throw Error(ErrorCode::InvalidRecord, "spike magnitude bucket with zero count");
        }
        if (buckets_[i].quantum < floor_q) {
            throw Error(ErrorCode::InvalidRecord, "spike magnitude below 0.5 x TDP");
        }
        if (i > 0 && buckets_[i].quantum <= buckets_[i - 1].quantum) {
            throw Error(ErrorCode::InvalidRecord, "spike magnitude buckets must be strictly increasing");
        }
        total_ += buckets_[i].count;
    }
}

std::int64_t SpikeMagnitudes::quantize(double magnitude) {
    return std::llround(magnitude * static_cast<double>(kQuantaPerTdp));
}

double SpikeMagnitudes::dequantize(std::int64_t quantum) {
    return static_cast<double>(quantum) / static_cast<double>(kQuantaPerTdp);
}

SpikeMagnitudes SpikeMagnitudes::from_relative(std::span<const double> magnitudes) {
    std::vector<std::int64_t> q;
    q.reserve(magnitudes.size());
    for (const double r : magnitudes) {
        if (!(r >= kSpikeLower) || !std::isfinite(r)) {
            throw Error(ErrorCode::InvalidParameter, "spike magnitude below 0.5 x TDP: " + std::to_string(r));
        }
        q.push_back(quantize(r));
    }
    std::sort(q.begin(), q.end());
    std::vector<Bucket> buckets;
    for (const auto quantum : q) {
        if (!buckets.empty() && buckets.back().quantum == quantum) {
            ++buckets.back().count;
        } else {
            buckets.push_back({quantum, 1});
        }
    }
    return SpikeMagnitudes(std::move(buckets));
}

SpikeVector SpikeMagnitudes::to_vector(double bin_width, double device_tdp_w) const {
    const auto n = bin_count(bin_width);
    std::vector<std::uint64_t> counts(n, 0);
    std::uint64_t clamped = 0;
    for (const auto& b : buckets_) {
        const double r = dequantize(b.quantum);
        counts[bin_index(r, bin_width, n)] += b.count;
        if (r >= kSpikeUpper) {
            clamped += b.count;
        }
    }
    return normalize(std::move(counts), clamped, bin_width, device_tdp_w);
}

Percentile parse_percentile(const std::string& text) {
    std::string t = text;
    if (!t.empty() && (t.front() == 'p' || t.front() == 'P')) {
        t.erase(0, 1);
    }
    if (t == "90") return Percentile::P90;
    if (t == "95") return Percentile::P95;
    if (t == "99") return Percentile::P99;
    throw Error(ErrorCode::InvalidParameter, "percentile must be one of 90, 95, 99; got '" + text + "'");
}

double PowerSummary::at(Percentile p) const {
    switch (p) {
        case Percentile::P90: return p90_rel_tdp;
        case Percentile::P95: return p95_rel_tdp;
        case Percentile::P99: return p99_rel_tdp;
    }
    return p90_rel_tdp;
}

double nearest_rank(std::span<const double> sorted, int percent) {
    if (sorted.empty()) {
        throw Error(ErrorCode::InsufficientData, "percentile of an empty sample");
    }
    if (percent <= 0 || percent > 100) {
        throw Error(ErrorCode::InvalidParameter, "percentile must lie in (0, 100]");
    }
    // Integer ceil(percent * N / 100) sidesteps rounding in q * N.
    const auto n = sorted.size();
    const auto rank = (static_cast<std::size_t>(percent) * n + 99) / 100;
    return sorted[std::max<std::size_t>(rank, 1) - 1];
}

PowerSummary summarize_power(const PowerTrace& trace, PercentileScope scope) {
    const double tdp = trace.device_tdp_w();
    std::vector<double> rel;
    rel.reserve(trace.size());
    for (const auto& s : trace.samples()) {
        const double r = relative(s, tdp);
        if (scope == PercentileScope::AllSamples || r >= kSpikeLower) {
            rel.push_back(r);
        }
    }
    if (rel.empty()) {
        throw Error(ErrorCode::InsufficientData, "no samples to summarize");
    }
    PowerSummary out;
    out.mean_rel_tdp = std::accumulate(rel.begin(), rel.end(), 0.0) / static_cast<double>(rel.size());
    std::sort(rel.begin(), rel.end());
    out.p90_rel_tdp = nearest_rank(rel, 90);
    out.p95_rel_tdp = nearest_rank(rel, 95);
    out.p99_rel_tdp = nearest_rank(rel, 99);
    out.max_rel_tdp = rel.back();
    // Summation order can push the mean an ulp past a constant maximum.
    out.mean_rel_tdp = std::min(out.mean_rel_tdp, out.max_rel_tdp);
    return out;
}

UtilizationPoint aggregate_utilization(std::span<const KernelRecord> kernels) {
    if (kernels.empty()) {
        throw Error(ErrorCode::InsufficientData, "no kernel records");
    }
    double total_time = 0.0;
    double sm = 0.0;
    double dram = 0.0;
    for (const auto& k : kernels) {
        if (!(k.duration_ns > 0.0) || !std::isfinite(k.duration_ns)) {
            throw Error(ErrorCode::InvalidRecord, "kernel '" + k.name + "' has non-positive duration");
        }
        if (!(k.sm_util >= 0.0 && k.sm_util <= 100.0) || !(k.dram_util >= 0.0 && k.dram_util <= 100.0)) {
            throw Error(ErrorCode::InvalidRecord, "kernel '" + k.name + "' utilization outside [0, 100]");
        }
        total_time += k.duration_ns;
        sm += k.duration_ns * k.sm_util;
        dram += k.duration_ns * k.dram_util;
    }
    return {sm / total_time, dram / total_time};
}

std::vector<CdfPoint> cdf_points(std::span<const double> values) {
    if (values.empty()) {
        throw Error(ErrorCode::InsufficientData, "CDF of an empty sample");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    std::vector<CdfPoint> out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) {
            continue;
        }
        out.push_back({sorted[i], static_cast<double>(i + 1) / n});
    }
    return out;
}

std::vector<CdfPoint> cdf_points(const PowerTrace& trace) {
    std::vector<double> rel;
    rel.reserve(trace.size());
    for (const auto& s : trace.samples()) {
        rel.push_back(relative(s, trace.device_tdp_w()));
    }
    return cdf_points(rel);
}

}  // namespace minos
