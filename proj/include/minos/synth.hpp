#pragma once

// Synthetic workloads with known ground truth: energy-counter traces whose
// processed spike vector matches a requested bin occupancy, kernel tables
// with a requested utilization point, and scaling profiles with a requested
// power-bound crossing and degradation slope.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "minos/features.hpp"
#include "minos/refset.hpp"
#include "minos/trace.hpp"

namespace minos {

struct ScalingSpec {
    /// Highest grid frequency whose p90 stays below the power bound.
    double crossing_freq_mhz = 2100.0;
    /// Runtime increase per 100 MHz below the uncapped frequency, percent.
    double degradation_slope_pct = 0.0;
    /// p90 change per 100 MHz, in TDP units.
    double p90_slope = 0.05;
    double power_bound = 1.3;
    std::vector<double> grid_mhz = {1300.0, 1500.0, 1700.0, 1900.0, 2100.0};
    double uncapped_runtime_s = 10.0;
};

struct SynthSpec {
    std::uint64_t seed = 0;
    double bin_width = 0.1;
    /// Desired fraction of spikes per bin; sums to 1.
    std::vector<double> occupancies;
    /// Active (non-idle) samples after trimming.
    std::size_t sample_count = 1000;
    std::size_t idle_head = 0;
    std::size_t idle_tail = 0;
    double tdp_w = 750.0;
    /// Uniform jitter around each bin center, fraction of TDP.
    double noise_amplitude = 0.0;
    std::int64_t interval_us = 1000;
    double idle_rel_tdp = 0.2;
    std::optional<ScalingSpec> scaling;
};

inline constexpr std::size_t kMinSynthSamples = 100;

/// Spike count per bin: occupancies scaled to sample_count by largest
/// remainder, ties to the lower bin.
std::vector<std::uint64_t> synth_bin_counts(const SynthSpec& spec);

/// Energy-counter series with sample_count + idle_head + idle_tail intervals
/// (plus the initial counter reading). After derive, alpha filter (0.5) and
/// trim, every active sample lies inside its assigned bin. Throws
/// InvalidSpec for infeasible specs.
RawSampleSeries synth_trace(const SynthSpec& spec);

/// Grid profile: p90 rises linearly with frequency and crosses the bound
/// just above crossing_freq_mhz; degradation falls linearly to 0 at the top
/// of the grid. Throws InvalidSpec when the crossing is off-grid.
ScalingProfile synth_profile(const ScalingSpec& spec);

/// Kernels in equal-duration pairs mirrored around `target`, so the
/// duration-weighted means reproduce it.
std::vector<KernelRecord> synth_kernels(std::uint64_t seed, const UtilizationPoint& target, std::size_t pairs = 8);

/// Uniform double in [0, 1) from the top 53 bits, identical on every
/// standard library.
double unit_uniform(std::mt19937_64& rng);

SynthSpec synth_spec_from_json_text(std::string_view text, const std::string& source);

}  // namespace minos
