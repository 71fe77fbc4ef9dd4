#include "minos/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "minos/error.hpp"
#include "minos/json_io.hpp"

namespace minos {

namespace {

void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

// Filtered samples are kept this far (in TDP units) inside their bin.
double bin_margin(double bin_width) { return 0.05 * bin_width; }

}  // namespace

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<std::uint64_t> synth_bin_counts(const SynthSpec& spec) {
    std::size_t n = 0;
    try {
        n = bin_count(spec.bin_width);
    } catch (const Error& e) {
        invalid(e.what());
    }
    if (spec.occupancies.size() != n) {
        invalid("expected " + std::to_string(n) + " occupancies for bin width " + std::to_string(spec.bin_width));
    }
    double sum = 0.0;
    for (const double o : spec.occupancies) {
        if (!(o >= 0.0) || !std::isfinite(o)) {
            invalid("occupancies must be non-negative");
        }
        sum += o;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        invalid("occupancies must sum to 1");
    }
    if (spec.sample_count < kMinSynthSamples) {
        invalid("sample_count must be at least " + std::to_string(kMinSynthSamples));
    }

    const auto total = static_cast<double>(spec.sample_count);
    std::vector<std::uint64_t> counts(n);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::uint64_t assigned = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double exact = spec.occupancies[j] * total;
        counts[j] = static_cast<std::uint64_t>(std::floor(exact));
        assigned += counts[j];
        remainders.emplace_back(exact - std::floor(exact), j);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < spec.sample_count; ++i) {
        ++counts[remainders[i % n].second];
        ++assigned;
    }
    return counts;
}

RawSampleSeries synth_trace(const SynthSpec& spec) {
    const auto counts = synth_bin_counts(spec);
    const auto n = counts.size();
    if (!(spec.tdp_w > 0.0)) {
        invalid("tdp_w must be positive");
    }
    if (spec.interval_us <= 0) {
        invalid("interval_us must be positive");
    }
    if (!(spec.idle_rel_tdp >= 0.0 && spec.idle_rel_tdp < kSpikeLower)) {
        invalid("idle power must stay below the spike threshold");
    }
    if (!(spec.noise_amplitude >= 0.0)) {
        invalid("noise_amplitude must be non-negative");
    }
    const double margin = bin_margin(spec.bin_width);
    for (std::size_t j = 0; j < n; ++j) {
        const double half = 0.5 * (bin_edge(j + 1, spec.bin_width, n) - bin_edge(j, spec.bin_width, n));
        if (counts[j] > 0 && spec.noise_amplitude >= half - margin) {
            invalid("noise amplitude pushes samples outside bin " + std::to_string(j));
        }
    }

    std::mt19937_64 rng(spec.seed);
    const auto dt = static_cast<double>(spec.interval_us);
    const double tdp = spec.tdp_w;

    std::vector<RawSample> samples;
    samples.reserve(1 + spec.idle_head + spec.sample_count + spec.idle_tail);
    std::int64_t t = 0;
    std::uint64_t energy = 0;
    samples.push_back({t, energy, 0});

    // Appends one interval of `rel` x TDP and returns the quantized power the
    // pipeline will actually see.
    auto emit = [&](double rel, std::uint64_t activity) {
        const auto delta = static_cast<std::uint64_t>(std::llround(rel * tdp * dt));
        t += spec.interval_us;
        energy += delta;
        samples.push_back({t, energy, activity});
        return static_cast<double>(delta) / dt / tdp;
    };
    auto busy = [&] { return 1000 + rng() % 1000; };

    std::optional<double> prev;
    for (std::size_t i = 0; i < spec.idle_head; ++i) {
        prev = emit(spec.idle_rel_tdp, 0);
    }
    // Bins are visited in ascending order. Each raw value is chosen so that
    // the filtered value (raw + previous raw) / 2 lands inside its bin, as
    // close to the jittered target as the bin interior allows.
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = bin_edge(j, spec.bin_width, n) + margin;
        const double hi = bin_edge(j + 1, spec.bin_width, n) - margin;
        const double center = 0.5 * (lo + hi);
        for (std::uint64_t c = 0; c < counts[j]; ++c) {
            const double jitter = spec.noise_amplitude * (2.0 * unit_uniform(rng) - 1.0);
            const double target = center + jitter;
            double raw = target;
            if (prev) {
                const double filtered = std::clamp(0.5 * (target + *prev), lo, hi);
                raw = 2.0 * filtered - *prev;
            }
            if (raw < 0.0) {
                invalid("spec requires negative raw power");
            }
            prev = emit(raw, busy());
        }
    }
    for (std::size_t i = 0; i < spec.idle_tail; ++i) {
        emit(spec.idle_rel_tdp, 0);
    }
    return RawSampleSeries(std::move(samples), tdp, true);
}

ScalingProfile synth_profile(const ScalingSpec& spec) {
    auto grid = spec.grid_mhz;
    if (grid.empty()) {
        invalid("frequency grid is empty");
    }
    std::sort(grid.begin(), grid.end());
    if (std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
        invalid("frequency grid has duplicates");
    }
    if (std::find(grid.begin(), grid.end(), spec.crossing_freq_mhz) == grid.end()) {
        invalid("crossing frequency " + std::to_string(spec.crossing_freq_mhz) + " MHz is not on the grid");
    }
    if (!(spec.p90_slope > 0.0) || !(spec.degradation_slope_pct >= 0.0) || !(spec.power_bound > 0.0) ||
        !(spec.uncapped_runtime_s > 0.0)) {
        invalid("scaling slopes, bound and runtime must be positive");
    }
    double min_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        min_step = std::min(min_step, grid[i] - grid[i - 1]);
    }
    if (!std::isfinite(min_step)) {
        min_step = 100.0;
    }
    const double gap = 0.5 * spec.p90_slope * min_step / 100.0;
    const double fmax = grid.back();

    ScalingProfile p;
    p.uncapped_freq_mhz = fmax;
    p.uncapped_runtime_s = spec.uncapped_runtime_s;
    std::map<double, double> times;
    for (const double f : grid) {
        ScalingEntry e;
        e.freq_mhz = f;
        e.p90_rel_tdp = spec.power_bound - gap + spec.p90_slope * (f - spec.crossing_freq_mhz) / 100.0;
        e.p95_rel_tdp = e.p90_rel_tdp + 0.05;
        e.p99_rel_tdp = e.p90_rel_tdp + 0.1;
        e.perf_degradation_pct = spec.degradation_slope_pct * (fmax - f) / 100.0;
        if (e.p90_rel_tdp < 0.0) {
            invalid("p90 curve goes negative at " + std::to_string(f) + " MHz");
        }
        times[f] = spec.uncapped_runtime_s * (1.0 + e.perf_degradation_pct / 100.0);
        p.entries.push_back(e);
    }
    p.profiling_times_s = std::move(times);
    return p;
}

std::vector<KernelRecord> synth_kernels(std::uint64_t seed, const UtilizationPoint& target, std::size_t pairs) {
    if (pairs == 0) {
        invalid("at least one kernel pair is required");
    }
    auto in_range = [](double v) { return v >= 0.0 && v <= 100.0; };
    if (!in_range(target.app_sm_util) || !in_range(target.app_dram_util)) {
        invalid("utilization target outside [0, 100]");
    }
    std::mt19937_64 rng(seed);
    const double sm_room = std::min(target.app_sm_util, 100.0 - target.app_sm_util);
    const double dram_room = std::min(target.app_dram_util, 100.0 - target.app_dram_util);
    std::vector<KernelRecord> out;
    for (std::size_t i = 0; i < pairs; ++i) {
        const double duration = 1000.0 + std::floor(unit_uniform(rng) * 1e6);
        const double ds = sm_room * unit_uniform(rng);
        const double dd = dram_room * unit_uniform(rng);
        out.push_back({"kernel_" + std::to_string(2 * i), duration, target.app_sm_util + ds, target.app_dram_util + dd});
        out.push_back(
            {"kernel_" + std::to_string(2 * i + 1), duration, target.app_sm_util - ds, target.app_dram_util - dd});
    }
    return out;
}

SynthSpec synth_spec_from_json_text(std::string_view text, const std::string& source) {
    const auto j = parse_json(text, source);
    try {
        SynthSpec s;
        s.seed = j.value("seed", std::uint64_t{0});
        s.bin_width = j.value("bin_width", 0.1);
        s.occupancies = j.at("occupancies").get<std::vector<double>>();
        s.sample_count = j.value("sample_count", std::size_t{1000});
        s.idle_head = j.value("idle_head", std::size_t{0});
        s.idle_tail = j.value("idle_tail", std::size_t{0});
        s.tdp_w = j.value("tdp_w", 750.0);
        s.noise_amplitude = j.value("noise_amplitude", 0.0);
        s.interval_us = j.value("interval_us", std::int64_t{1000});
        s.idle_rel_tdp = j.value("idle_rel_tdp", 0.2);
        if (j.contains("scaling") && !j.at("scaling").is_null()) {
            const auto& sc = j.at("scaling");
            ScalingSpec scaling;
            scaling.crossing_freq_mhz = sc.at("crossing_freq_mhz").get<double>();
            scaling.degradation_slope_pct = sc.value("degradation_slope_pct", 0.0);
            scaling.p90_slope = sc.value("p90_slope", scaling.p90_slope);
            scaling.power_bound = sc.value("power_bound", scaling.power_bound);
            if (sc.contains("grid_mhz")) {
                scaling.grid_mhz = sc.at("grid_mhz").get<std::vector<double>>();
            }
            scaling.uncapped_runtime_s = sc.value("uncapped_runtime_s", scaling.uncapped_runtime_s);
            s.scaling = scaling;
        }
        return s;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, source + ": " + e.what());
    }
}

}  // namespace minos
