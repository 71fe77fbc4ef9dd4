#pragma once

// Constructed reference sets with known answers.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minos/predict.hpp"
#include "minos/refset.hpp"

namespace fixtures {

inline constexpr double kTdp = 750.0;

/// (relative magnitude, count) pairs.
using Spikes = std::vector<std::pair<double, std::uint64_t>>;

minos::SpikeMagnitudes magnitudes(const Spikes& spikes);

/// Summary with the given mean and p90 and evenly spaced upper tail.
minos::PowerSummary summary(double mean, double p90);

/// Default grid profile whose p90 stays below 1.3 x TDP up to `crossing`.
minos::ScalingProfile profile(double crossing_mhz, double degradation_slope_pct);

/// Profile whose p90 at 1500 MHz is `p90_at_1500`, rising 0.05 per 100 MHz.
minos::ScalingProfile profile_through(double p90_at_1500, double degradation_slope_pct);

minos::WorkloadRecord record(const std::string& id, const Spikes& spikes, const minos::PowerSummary& summary,
                             std::optional<minos::UtilizationPoint> util, minos::ScalingProfile profile,
                             bool largest = false);

/// Three references standing in for SD-XL, MILC-24 and DeePMD Water plus a
/// distractor, and two new targets standing in for FAISS and Qwen1.5-MoE.
struct CaseStudy {
    minos::ReferenceSet refs{kTdp};
    minos::WorkloadRecord faiss;
    minos::WorkloadRecord qwen;
};

CaseStudy case_study();

/// Five groups (four pairs and one triple). Members of a group share their
/// scaling curve and have near-identical spike vectors and utilization.
/// With `isolate`, `milc/large` gets a spike vector far from everyone and a
/// hotter curve than any other group.
minos::ReferenceSet grouped_refset(bool isolate);
inline const std::string kIsolatedId = "milc/large";

/// Two spiky and two smooth workloads; each spiky one shares its mean power
/// with a smooth one but scales very differently.
minos::ReferenceSet mean_collision_refset();

/// Workloads synthesized through the trace pipeline from smooth bell-shaped
/// spike distributions.
minos::ReferenceSet smooth_refset(std::uint64_t seed, std::size_t count);

/// 18 workloads across 11 applications; multi-config apps flag their
/// largest input.
minos::ReferenceSet demo_refset();

}  // namespace fixtures
