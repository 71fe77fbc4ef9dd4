#include "fixtures.hpp"

#include <cmath>
#include <random>

#include "minos/features.hpp"
#include "minos/synth.hpp"
#include "minos/trace.hpp"

namespace fixtures {

using namespace minos;

SpikeMagnitudes magnitudes(const Spikes& spikes) {
    std::map<std::int64_t, std::uint64_t> merged;
    for (const auto& [m, count] : spikes) {
        merged[SpikeMagnitudes::quantize(m)] += count;
    }
    std::vector<SpikeMagnitudes::Bucket> buckets;
    for (const auto& [q, count] : merged) {
        buckets.push_back({q, count});
    }
    return SpikeMagnitudes(std::move(buckets));
}

PowerSummary summary(double mean, double p90) { return {mean, p90, p90 + 0.02, p90 + 0.05, p90 + 0.1}; }

ScalingProfile profile(double crossing_mhz, double degradation_slope_pct) {
    ScalingSpec spec;
    spec.crossing_freq_mhz = crossing_mhz;
    spec.degradation_slope_pct = degradation_slope_pct;
    return synth_profile(spec);
}

ScalingProfile profile_through(double p90_at_1500, double degradation_slope_pct) {
    auto p = profile(1500.0, degradation_slope_pct);
    for (auto& e : p.entries) {
        e.p90_rel_tdp = p90_at_1500 + 0.05 * (e.freq_mhz - 1500.0) / 100.0;
        e.p95_rel_tdp = e.p90_rel_tdp + 0.05;
        e.p99_rel_tdp = e.p90_rel_tdp + 0.1;
    }
    return p;
}

WorkloadRecord record(const std::string& id, const Spikes& spikes, const PowerSummary& s,
                      std::optional<UtilizationPoint> util, ScalingProfile p, bool largest) {
    WorkloadRecord r;
    r.id = id;
    r.largest = largest;
    r.magnitudes = magnitudes(spikes);
    r.summary = s;
    r.utilization = util;
    r.profile = std::move(p);
    return r;
}

CaseStudy case_study() {
    CaseStudy cs;
    // One-hot references; the targets mix a second magnitude in at a count
    // ratio that puts them at cosine distance 0.05 and 0.01.
    cs.refs.add(record("sdxl/bsz8", {{1.23, 10000}}, summary(0.9, 1.24), UtilizationPoint{60.0, 30.0},
                       profile(1300.0, 3.0)));
    cs.refs.add(record("milc/24", {{1.73, 10000}}, summary(1.2, 1.78), UtilizationPoint{10.0, 85.0},
                       profile(1500.0, 1.0)));
    cs.refs.add(record("deepmd/water", {{0.62, 10000}}, summary(0.55, 0.64), UtilizationPoint{20.0, 50.0},
                       profile(2100.0, 2.0)));
    cs.refs.add(record("lammps/eam", {{0.93, 10000}}, summary(0.7, 0.95), UtilizationPoint{85.0, 15.0},
                       profile(1700.0, 0.5)));

    cs.faiss = record("faiss/bsz4096", {{1.23, 30424}, {1.43, 10000}}, summary(0.95, 1.25),
                      UtilizationPoint{67.18, 30.0}, profile(1300.0, 2.0));
    // Its own p90 at 1500 MHz sits 5.4% over the bound.
    cs.qwen = record("qwen1.5-moe/bsz32", {{1.73, 7018}, {1.87, 1000}}, summary(1.25, 1.8),
                     UtilizationPoint{20.0, 63.64}, profile_through(1.3 * 1.054, 2.0));
    return cs;
}

ReferenceSet grouped_refset(bool isolate) {
    struct Group {
        std::string app;
        std::vector<std::string> configs;
        double magnitude;
        double p90;
        UtilizationPoint util;
        double crossing;
        double slope;
    };
    const std::vector<Group> groups{
        {"pagerank", {"indochina", "uk-2002"}, 0.62, 0.65, {15.0, 80.0}, 1500.0, 1.0},
        {"lulesh", {"s30", "s60"}, 0.93, 0.96, {70.0, 20.0}, 1700.0, 2.0},
        {"lammps", {"eam", "lj"}, 1.23, 1.26, {40.0, 40.0}, 1900.0, 0.5},
        {"resnet", {"50", "152"}, 1.53, 1.56, {85.0, 60.0}, 2100.0, 3.0},
        {"milc", {"16", "24", "large"}, 1.87, 1.9, {30.0, 90.0}, 1500.0, 1.5},
    };
    ReferenceSet refs(kTdp);
    for (const auto& g : groups) {
        for (std::size_t k = 0; k < g.configs.size(); ++k) {
            const auto id = g.app + "/" + g.configs[k];
            const auto kd = static_cast<double>(k);
            const UtilizationPoint util{g.util.app_sm_util + kd, g.util.app_dram_util - kd};
            Spikes spikes{{g.magnitude, 1000}, {g.magnitude + 0.01, 100 + 50 * k}};
            auto curve = profile(g.crossing, g.slope);
            if (isolate && id == kIsolatedId) {
                spikes = {{0.75, 1000}, {1.75, 1000}};
                curve = profile(1300.0, g.slope);
            }
            refs.add(record(id, spikes, summary(g.p90 - 0.2, g.p90), util, curve, k + 1 == g.configs.size()));
        }
    }
    return refs;
}

ReferenceSet mean_collision_refset() {
    ReferenceSet refs(kTdp);
    refs.add(record("spiky/a1", {{1.45, 1000}, {1.85, 1000}}, summary(0.80, 1.6), UtilizationPoint{50.0, 50.0},
                    profile(1300.0, 1.0)));
    refs.add(record("spiky/a2", {{1.46, 1000}, {1.86, 1100}}, summary(0.85, 1.62), UtilizationPoint{52.0, 50.0},
                    profile(1300.0, 1.0)));
    refs.add(record("smooth/b1", {{0.92, 1000}}, summary(0.80, 0.95), UtilizationPoint{20.0, 20.0},
                    profile(2100.0, 1.0)));
    refs.add(record("smooth/b2", {{0.93, 1000}}, summary(0.85, 0.97), UtilizationPoint{22.0, 20.0},
                    profile(2100.0, 1.0)));
    return refs;
}

ReferenceSet smooth_refset(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    constexpr double kSynthWidth = 0.05;
    const auto n = bin_count(kSynthWidth);
    ReferenceSet refs(kTdp);
    for (std::size_t w = 0; w < count; ++w) {
        const double mu = 0.7 + 1.1 * unit_uniform(rng);
        const double sigma = 0.08 + 0.17 * unit_uniform(rng);
        SynthSpec spec;
        spec.seed = rng();
        spec.bin_width = kSynthWidth;
        spec.sample_count = 2000;
        spec.idle_head = 20;
        spec.idle_tail = 20;
        spec.tdp_w = kTdp;
        spec.noise_amplitude = 0.2 * kSynthWidth;
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double center = 0.5 * (bin_edge(j, kSynthWidth, n) + bin_edge(j + 1, kSynthWidth, n));
            const double z = (center - mu) / sigma;
            spec.occupancies.push_back(std::exp(-0.5 * z * z));
            total += spec.occupancies.back();
        }
        for (auto& o : spec.occupancies) {
            o /= total;
        }
        const auto trace = process_raw(synth_trace(spec));
        const auto mags = detect_spikes(trace);
        WorkloadRecord r;
        r.id = "smooth" + std::to_string(w) + "/default";
        r.magnitudes = SpikeMagnitudes::from_relative(mags);
        r.summary = summarize_power(trace);
        r.profile = profile(1700.0, 1.0);
        refs.add(std::move(r));
    }
    return refs;
}

ReferenceSet demo_refset() {
    const std::vector<std::pair<std::string, bool>> ids{
        {"deepmd/dpa2-large", true}, {"deepmd/water", false}, {"bert/large", false},
        {"gromacs/stmv", false},     {"hpl/n1", false},       {"hpl/n2", true},
        {"lammps/eam", false},       {"lammps/lj", true},     {"lsms/fept", true},
        {"lsms/small", false},       {"lulesh/s30", false},   {"lulesh/s60", true},
        {"milc/16", false},          {"milc/24", true},       {"pagerank/indochina", false},
        {"pagerank/uk-2002", true},  {"resnet/50", false},    {"sdxl/bsz8", false},
    };
    const std::vector<double> crossings{1300.0, 1500.0, 1700.0, 1900.0, 2100.0};
    ReferenceSet refs(kTdp);
    std::mt19937_64 rng(7);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const double center = 0.6 + 1.3 * unit_uniform(rng);
        std::vector<double> mags;
        for (int s = 0; s < 400; ++s) {
            const double m = center + 0.15 * (unit_uniform(rng) + unit_uniform(rng) - 1.0);
            if (m >= 0.5) {
                mags.push_back(m);
            }
        }
        std::sort(mags.begin(), mags.end());
        const double p90 = mags[mags.size() * 9 / 10];
        const PowerSummary s{0.6 * p90, p90, mags[mags.size() * 95 / 100], mags[mags.size() * 99 / 100],
                             mags.back()};
        const UtilizationPoint util{100.0 * unit_uniform(rng), 100.0 * unit_uniform(rng)};
        refs.add(make_record(ids[i].first, mags, s, util,
                             profile(crossings[i % crossings.size()], 0.5 * static_cast<double>(i % 7)),
                             ids[i].second));
    }
    return refs;
}

}  // namespace fixtures
