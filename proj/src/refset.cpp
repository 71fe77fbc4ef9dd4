#include "minos/refset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "minos/error.hpp"
#include "minos/json_io.hpp"

namespace minos {

double ScalingEntry::at(Percentile p) const {
    switch (p) {
        case Percentile::P90: return p90_rel_tdp;
        case Percentile::P95: return p95_rel_tdp;
        case Percentile::P99: return p99_rel_tdp;
    }
    return p90_rel_tdp;
}

void ScalingProfile::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidRecord, "scaling profile: " + what); };
    if (entries.empty()) {
        fail("no entries");
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (!(e.freq_mhz > 0.0) || !std::isfinite(e.freq_mhz)) {
            fail("frequency must be positive");
        }
        if (i > 0 && !(e.freq_mhz > entries[i - 1].freq_mhz)) {
            fail("frequencies must be strictly ascending");
        }
        for (const double p : {e.p90_rel_tdp, e.p95_rel_tdp, e.p99_rel_tdp}) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                fail("percentile power must be non-negative");
            }
        }
        if (!(e.perf_degradation_pct >= -kDegradationTolerancePct) || !std::isfinite(e.perf_degradation_pct)) {
            fail("degradation below -" + std::to_string(kDegradationTolerancePct) + "% at " +
                 std::to_string(e.freq_mhz) + " MHz");
        }
    }
    if (entries.back().freq_mhz != uncapped_freq_mhz) {
        fail("highest frequency must equal the uncapped frequency");
    }
    if (entries.back().perf_degradation_pct != 0.0) {
        fail("degradation at the uncapped frequency must be 0");
    }
    if (!(uncapped_runtime_s > 0.0) || !std::isfinite(uncapped_runtime_s)) {
        fail("uncapped runtime must be positive");
    }
    if (profiling_times_s) {
        for (const auto& [f, t] : *profiling_times_s) {
            if (!(t > 0.0) || !std::isfinite(t) || !(f > 0.0)) {
                fail("profiling times must be positive");
            }
        }
    }
}

std::vector<double> ScalingProfile::grid() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        out.push_back(e.freq_mhz);
    }
    return out;
}

const ScalingEntry* ScalingProfile::find(double freq_mhz) const {
    const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.freq_mhz == freq_mhz; });
    return it == entries.end() ? nullptr : &*it;
}

namespace {

template <typename Get>
double interpolate(const std::vector<ScalingEntry>& entries, double freq, Get get) {
    if (entries.empty() || freq < entries.front().freq_mhz || freq > entries.back().freq_mhz) {
        throw Error(ErrorCode::InvalidParameter,
                    "frequency " + std::to_string(freq) + " MHz is outside the profiled range");
    }
    const auto hi = std::lower_bound(entries.begin(), entries.end(), freq,
                                     [](const auto& e, double f) { return e.freq_mhz < f; });
    if (hi->freq_mhz == freq) {
        return get(*hi);
    }
    const auto lo = hi - 1;
    const double w = (freq - lo->freq_mhz) / (hi->freq_mhz - lo->freq_mhz);
    return get(*lo) + w * (get(*hi) - get(*lo));
}

}  // namespace

double ScalingProfile::percentile_at(double freq_mhz, Percentile p) const {
    return interpolate(entries, freq_mhz, [p](const ScalingEntry& e) { return e.at(p); });
}

double ScalingProfile::degradation_at(double freq_mhz) const {
    return interpolate(entries, freq_mhz, [](const ScalingEntry& e) { return e.perf_degradation_pct; });
}

std::string app_of(std::string_view workload_id) {
    return std::string(workload_id.substr(0, workload_id.find('/')));
}

std::string WorkloadRecord::app() const { return app_of(id); }

std::string WorkloadRecord::config() const {
    const auto slash = id.find('/');
    return slash == std::string::npos ? std::string() : id.substr(slash + 1);
}

WorkloadRecord make_record(std::string id, std::span<const double> magnitudes, const PowerSummary& summary,
                           std::optional<UtilizationPoint> utilization, ScalingProfile profile, bool largest) {
    WorkloadRecord r;
    r.id = std::move(id);
    r.largest = largest;
    r.magnitudes = SpikeMagnitudes::from_relative(magnitudes);
    r.summary = summary;
    r.utilization = utilization;
    r.profile = std::move(profile);
    return r;
}

ReferenceSet::ReferenceSet(double device_tdp_w) : device_tdp_w_(device_tdp_w) {
    if (!(device_tdp_w_ > 0.0) || !std::isfinite(device_tdp_w_)) {
        throw Error(ErrorCode::InvalidParameter, "reference set TDP must be positive");
    }
}

void ReferenceSet::add(WorkloadRecord record) {
    if (record.id.empty()) {
        throw Error(ErrorCode::InvalidRecord, "workload id must not be empty");
    }
    if (records_.contains(record.id)) {
        throw Error(ErrorCode::Conflict, "workload '" + record.id + "' is already in the reference set");
    }
    record.profile.validate();
    const auto& s = record.summary;
    if (!(s.p90_rel_tdp <= s.p95_rel_tdp && s.p95_rel_tdp <= s.p99_rel_tdp && s.p99_rel_tdp <= s.max_rel_tdp &&
          s.mean_rel_tdp <= s.max_rel_tdp)) {
        throw Error(ErrorCode::InvalidRecord, "power summary of '" + record.id + "' is not ordered");
    }
    auto id = record.id;
    records_.emplace(std::move(id), std::move(record));
}

void ReferenceSet::remove(std::string_view id) {
    const auto it = records_.find(id);
    if (it == records_.end()) {
        throw Error(ErrorCode::NotFound, "workload '" + std::string(id) + "' is not in the reference set");
    }
    records_.erase(it);
}

bool ReferenceSet::contains(std::string_view id) const { return records_.find(id) != records_.end(); }

const WorkloadRecord& ReferenceSet::get(std::string_view id) const {
    const auto it = records_.find(id);
    if (it == records_.end()) {
        throw Error(ErrorCode::NotFound, "workload '" + std::string(id) + "' is not in the reference set");
    }
    return it->second;
}

std::vector<std::string> ReferenceSet::ids() const {
    std::vector<std::string> out;
    out.reserve(records_.size());
    for (const auto& [id, r] : records_) {
        out.push_back(id);
    }
    return out;
}

std::map<std::string, SpikeVector> ReferenceSet::materialize_vectors(double bin_width) const {
    bin_count(bin_width);
    std::map<std::string, SpikeVector> out;
    for (const auto& [id, r] : records_) {
        out.emplace(id, r.magnitudes.to_vector(bin_width, device_tdp_w_));
    }
    return out;
}

std::map<std::string, UtilizationPoint> ReferenceSet::utilization_points() const {
    std::map<std::string, UtilizationPoint> out;
    for (const auto& [id, r] : records_) {
        if (r.utilization) {
            out.emplace(id, *r.utilization);
        }
    }
    return out;
}

ReferenceSet ReferenceSet::one_input_per_workload() const {
    std::map<std::string, std::vector<const WorkloadRecord*>> by_app;
    for (const auto& [id, r] : records_) {
        by_app[r.app()].push_back(&r);
    }
    ReferenceSet out(device_tdp_w_);
    for (const auto& [app, members] : by_app) {
        if (members.size() == 1) {
            out.add(*members.front());
            continue;
        }
        const auto flagged = std::count_if(members.begin(), members.end(), [](const auto* r) { return r->largest; });
        if (flagged != 1) {
            throw Error(ErrorCode::AmbiguousSelection,
                        "app '" + app + "' has " + std::to_string(members.size()) + " configs and " +
                            std::to_string(flagged) + " flagged as largest");
        }
        out.add(**std::find_if(members.begin(), members.end(), [](const auto* r) { return r->largest; }));
    }
    return out;
}

ReferenceSet ReferenceSet::without(std::string_view id) const {
    ReferenceSet out = *this;
    out.remove(id);
    return out;
}

std::string refset_to_string(const ReferenceSet& set) { return dump_json(to_json(set)); }

ReferenceSet refset_from_string(std::string_view text, const std::string& source) {
    return reference_set_from_json(parse_json(text, source), source);
}

void save_refset(const ReferenceSet& set, const std::filesystem::path& path) {
    const auto text = refset_to_string(set);
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        }
        out << text;
        out.flush();
        if (!out) {
            throw Error(ErrorCode::IoError, "failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ErrorCode::IoError, "cannot replace " + path.string() + ": " + ec.message());
    }
}

ReferenceSet load_refset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read reference set " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return refset_from_string(buf.str(), path.string());
}

}  // namespace minos
