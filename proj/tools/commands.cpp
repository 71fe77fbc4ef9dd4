#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>

#include "minos/cluster.hpp"
#include "minos/error.hpp"
#include "minos/features.hpp"
#include "minos/formats.hpp"
#include "minos/json_io.hpp"
#include "minos/predict.hpp"
#include "minos/refset.hpp"
#include "minos/synth.hpp"
#include "minos/trace.hpp"

namespace minos::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kDefaultVectorBinWidth = 0.1;

struct GlobalFlags {
    std::string refset;
    double tdp_w = 0.0;
    std::string bin_width = "auto";
    std::string objective = "power";
    double power_bound = kDefaultPowerBound;
    double perf_bound = kDefaultPerfBoundPct;
    int percentile = 90;
    double min_freq_mhz = 0.0;
    std::uint64_t seed = 0;
    std::string out;

    CLI::Option* tdp_opt = nullptr;
    CLI::Option* power_bound_opt = nullptr;
    CLI::Option* perf_bound_opt = nullptr;
    CLI::Option* percentile_opt = nullptr;
    CLI::Option* min_freq_opt = nullptr;
    CLI::Option* seed_opt = nullptr;

    std::optional<double> tdp() const {
        return tdp_opt->count() ? std::optional<double>(tdp_w) : std::nullopt;
    }
};

struct IngestFlags {
    double alpha = kDefaultAlpha;
    std::string counter_policy = "reject";
    std::string scope = "all";
};

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidParameter, what); }

std::optional<double> fixed_bin_width(const GlobalFlags& g) {
    if (g.bin_width == "auto") {
        return std::nullopt;
    }
    double c = 0.0;
    try {
        std::size_t used = 0;
        c = std::stod(g.bin_width, &used);
        if (used != g.bin_width.size()) {
            throw std::invalid_argument(g.bin_width);
        }
    } catch (const std::exception&) {
        invalid("--bin-width expects a number or 'auto', got '" + g.bin_width + "'");
    }
    bin_count(c);
    return c;
}

double vector_bin_width(const GlobalFlags& g) { return fixed_bin_width(g).value_or(kDefaultVectorBinWidth); }

/// Resolves the global flags into prediction options and rejects flags that
/// do not apply to the chosen objective.
PredictOptions run_config(const GlobalFlags& g) {
    PredictOptions o;
    o.objective = parse_objective(g.objective);
    if (o.objective == Objective::PerfCentric) {
        if (g.percentile_opt->count()) {
            invalid("--percentile applies only to --objective power");
        }
        if (g.power_bound_opt->count()) {
            invalid("--power-bound applies only to --objective power");
        }
    } else {
        if (g.perf_bound_opt->count()) {
            invalid("--perf-bound applies only to --objective perf");
        }
        if (g.min_freq_opt->count()) {
            invalid("--min-freq-mhz applies only to --objective perf");
        }
    }
    if (!(g.power_bound > 0.0)) {
        invalid("--power-bound must be positive");
    }
    if (!(g.perf_bound >= 0.0)) {
        invalid("--perf-bound must be non-negative");
    }
    o.bounds.power_multiple = g.power_bound;
    o.bounds.perf_pct = g.perf_bound;
    o.bounds.percentile = parse_percentile(std::to_string(g.percentile));
    if (g.min_freq_opt->count()) {
        o.bounds.min_freq_mhz = g.min_freq_mhz;
    }
    o.bin_width = fixed_bin_width(g);
    o.seed = g.seed;
    return o;
}

ReferenceSet open_refset(const GlobalFlags& g) {
    if (g.refset.empty()) {
        invalid("no reference set; pass --refset or set MINOS_REFSET");
    }
    return load_refset(g.refset);
}

/// Workload ids contain '/', which cannot appear in a file name.
std::string file_key(std::string id) {
    std::replace(id.begin(), id.end(), '/', '_');
    return id;
}

/// Writes `text` to `<out>/<name>`, or to the output stream without --out.
void emit(const GlobalFlags& g, const std::string& name, const std::string& text, std::ostream& out) {
    if (g.out.empty()) {
        out << text;
    } else {
        write_text_file(fs::path(g.out) / name, text);
    }
}

void require_out(const GlobalFlags& g, std::string_view command) {
    if (g.out.empty()) {
        invalid(std::string(command) + " writes several files; pass --out <dir>");
    }
}

IngestOptions ingest_options(const IngestFlags& f) {
    IngestOptions o;
    o.alpha = f.alpha;
    if (f.counter_policy == "reject") {
        o.counter_policy = CounterPolicy::Reject;
    } else if (f.counter_policy == "unwrap64") {
        o.counter_policy = CounterPolicy::Unwrap64;
    } else {
        invalid("--counter-policy expects reject or unwrap64");
    }
    return o;
}

PercentileScope percentile_scope(const IngestFlags& f) {
    if (f.scope == "all") {
        return PercentileScope::AllSamples;
    }
    if (f.scope == "spikes") {
        return PercentileScope::SpikesOnly;
    }
    invalid("--percentile-scope expects all or spikes");
}

struct Featurized {
    FeatureDocument doc;
    double duration_s = 0.0;
    std::optional<double> freq_cap_mhz;
    double tdp_w = 0.0;
};

fs::path kernel_sidecar(const fs::path& trace) {
    auto p = trace;
    p.replace_extension(".kernels.csv");
    return p;
}

Featurized featurize(const fs::path& trace_path, const std::optional<fs::path>& kernels, const GlobalFlags& g,
                     const IngestFlags& f) {
    const auto file = read_trace_csv(trace_path);
    TraceMeta meta;
    if (fs::exists(meta_path_for(trace_path))) {
        meta = read_meta(meta_path_for(trace_path));
    } else {
        meta.workload = trace_path.stem().string();
    }
    const double tdp = g.tdp().value_or(meta.device_tdp_w);
    if (!(tdp > 0.0)) {
        invalid(trace_path.string() + ": device TDP unknown; pass --tdp-w or provide " +
                meta_path_for(trace_path).string());
    }
    const auto trace = to_power_trace(file, tdp, ingest_options(f));
    const auto mags = detect_spikes(trace);

    Featurized out;
    out.tdp_w = tdp;
    out.duration_s = trace.duration_s();
    out.freq_cap_mhz = meta.freq_cap_mhz;
    out.doc.workload = meta.workload;
    out.doc.config = meta.config;
    out.doc.spike_vector = build_spike_vector(mags, vector_bin_width(g), tdp);
    out.doc.summary = summarize_power(trace, percentile_scope(f));
    out.doc.magnitudes = SpikeMagnitudes::from_relative(mags);
    const auto kpath = kernels ? *kernels : kernel_sidecar(trace_path);
    if (kernels || fs::exists(kpath)) {
        out.doc.utilization = aggregate_utilization(read_kernel_csv(kpath));
    }
    return out;
}

void add_ingest_flags(CLI::App* cmd, IngestFlags& f) {
    cmd->add_option("--alpha", f.alpha, "Filter weight of the current sample")->capture_default_str();
    cmd->add_option("--counter-policy", f.counter_policy, "reject | unwrap64")->capture_default_str();
    cmd->add_option("--percentile-scope", f.scope, "all | spikes")->capture_default_str();
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
    std::vector<std::string> traces;
    std::string kernels;
    IngestFlags flags;
};

void cmd_ingest(const IngestArgs& a, const GlobalFlags& g, std::ostream& out) {
    if (!a.kernels.empty() && a.traces.size() != 1) {
        invalid("--kernels takes a single trace; use <stem>.kernels.csv sidecars for several");
    }
    const auto kernels = a.kernels.empty() ? std::nullopt : std::optional<fs::path>(a.kernels);
    Json all = Json::array();
    for (const auto& t : a.traces) {
        const auto f = featurize(t, kernels, g, a.flags);
        if (g.out.empty()) {
            all.push_back(to_json(f.doc));
        } else {
            write_text_file(fs::path(g.out) / (file_key(f.doc.id()) + ".features.json"), dump_json(to_json(f.doc)));
        }
    }
    if (g.out.empty()) {
        out << dump_json(all.size() == 1 ? all.at(0) : all);
    }
}

// ---------------------------------------------------------------- cluster

struct ClusterArgs {
    std::string mode = "power";
    double threshold = 0.0;
    CLI::Option* threshold_opt = nullptr;
    std::string linkage = "ward";
    std::size_t k = 0;
    std::size_t k_min = 3;
    std::size_t k_max = 17;
    bool largest_only = false;
};

std::string classes_csv(const std::map<std::string, int>& labels) {
    std::ostringstream s;
    s << "workload,class\n";
    for (const auto& [id, label] : labels) {
        s << id << ',' << label << '\n';
    }
    return s.str();
}

void cmd_cluster(const ClusterArgs& a, const GlobalFlags& g, std::ostream& out) {
    auto refs = open_refset(g);
    if (a.largest_only) {
        refs = refs.one_input_per_workload();
    }
    if (a.mode == "power") {
        const auto d = hac_build(refs.materialize_vectors(vector_bin_width(g)), parse_linkage(a.linkage));
        emit(g, "dendrogram.json", dump_json(to_json(d)), out);
        if (a.threshold_opt->count()) {
            if (g.out.empty()) {
                out << classes_csv(slice_dendrogram(d, a.threshold));
            } else {
                write_text_file(fs::path(g.out) / "classes.csv", classes_csv(slice_dendrogram(d, a.threshold)));
            }
        }
        return;
    }
    if (a.mode != "util") {
        invalid("--mode expects power or util");
    }
    const auto points = refs.utilization_points();
    KMeansModel model;
    std::ostringstream scores;
    scores << "k,silhouette\n";
    if (a.k > 0) {
        model = kmeans_fit(points, a.k, g.seed);
    } else {
        auto sweep = silhouette_sweep(points, a.k_min, a.k_max, g.seed);
        for (const auto& [k, s] : sweep.scores) {
            scores << k << ',' << format_double(s) << '\n';
        }
        model = std::move(sweep.models.at(sweep.best_k));
    }
    emit(g, "kmeans.json", dump_json(to_json(model)), out);
    if (!g.out.empty()) {
        std::map<std::string, int> labels;
        for (const auto& [id, c] : model.assignments) {
            labels[id] = static_cast<int>(c);
        }
        write_text_file(fs::path(g.out) / "classes.csv", classes_csv(labels));
        if (a.k == 0) {
            write_text_file(fs::path(g.out) / "silhouette.csv", scores.str());
        }
    }
}

// ---------------------------------------------------------------- refset

struct RefsetAddArgs {
    std::string id;
    bool largest = false;
    std::string trace;
    std::string kernels;
    std::string profile;
    std::vector<std::string> sweep;
    IngestFlags flags;
};

ScalingProfile profile_from_sweep(const RefsetAddArgs& a, const GlobalFlags& g) {
    std::map<double, Featurized> runs;
    for (const auto& path : a.sweep) {
        auto f = featurize(path, std::nullopt, g, a.flags);
        if (!f.freq_cap_mhz) {
            throw Error(ErrorCode::InvalidRecord, path + ": sweep traces need freq_cap_mhz in their metadata");
        }
        if (!runs.emplace(*f.freq_cap_mhz, std::move(f)).second) {
            throw Error(ErrorCode::InvalidRecord, path + ": frequency already covered by another sweep trace");
        }
    }
    if (runs.empty()) {
        invalid("--sweep needs at least one trace");
    }
    const auto& top = runs.rbegin()->second;
    ScalingProfile p;
    p.uncapped_freq_mhz = runs.rbegin()->first;
    p.uncapped_runtime_s = top.duration_s;
    std::map<double, double> times;
    for (const auto& [freq, f] : runs) {
        p.entries.push_back({freq, f.doc.summary.p90_rel_tdp, f.doc.summary.p95_rel_tdp, f.doc.summary.p99_rel_tdp,
                             (f.duration_s / top.duration_s - 1.0) * 100.0});
        times[freq] = f.duration_s;
    }
    p.profiling_times_s = std::move(times);
    return p;
}

void cmd_refset_add(const RefsetAddArgs& a, const GlobalFlags& g, std::ostream& out) {
    if (g.refset.empty()) {
        invalid("no reference set; pass --refset or set MINOS_REFSET");
    }
    if (a.profile.empty() == a.sweep.empty()) {
        invalid("pass exactly one of --profile or --sweep");
    }
    const auto kernels = a.kernels.empty() ? std::nullopt : std::optional<fs::path>(a.kernels);
    const auto target = featurize(a.trace, kernels, g, a.flags);

    ScalingProfile profile;
    if (!a.profile.empty()) {
        profile = scaling_profile_from_json(parse_json(read_text_file(a.profile), a.profile));
    } else {
        profile = profile_from_sweep(a, g);
    }

    ReferenceSet refs = fs::exists(g.refset) ? load_refset(g.refset) : ReferenceSet(target.tdp_w);
    if (refs.device_tdp_w() != target.tdp_w) {
        invalid("trace TDP " + format_double(target.tdp_w) + " W differs from the reference set's " +
                format_double(refs.device_tdp_w()) + " W");
    }
    WorkloadRecord r;
    r.id = a.id.empty() ? target.doc.id() : a.id;
    if (r.id.find('/') == std::string::npos) {
        invalid("workload id '" + r.id + "' must have the form app/config");
    }
    r.largest = a.largest;
    r.magnitudes = target.doc.magnitudes;
    r.summary = target.doc.summary;
    r.utilization = target.doc.utilization;
    r.profile = std::move(profile);
    const auto id = r.id;
    refs.add(std::move(r));
    save_refset(refs, g.refset);
    out << "added " << id << " (" << refs.size() << " workloads)\n";
}

void cmd_refset_list(const GlobalFlags& g, std::ostream& out) {
    const auto refs = open_refset(g);
    std::ostringstream s;
    s << "workload,largest,spikes,mean_rel_tdp,p90_rel_tdp,sm_util_pct,dram_util_pct,min_freq_mhz,uncapped_freq_mhz\n";
    for (const auto& [id, r] : refs.records()) {
        s << id << ',' << (r.largest ? 1 : 0) << ',' << r.magnitudes.total() << ','
          << format_double(r.summary.mean_rel_tdp) << ',' << format_double(r.summary.p90_rel_tdp) << ',';
        if (r.utilization) {
            s << format_double(r.utilization->app_sm_util) << ',' << format_double(r.utilization->app_dram_util);
        } else {
            s << ',';
        }
        s << ',' << format_double(r.profile.min_freq()) << ',' << format_double(r.profile.uncapped_freq_mhz) << '\n';
    }
    emit(g, "refset.csv", s.str(), out);
}

void cmd_refset_filter(const std::string& dest, const GlobalFlags& g, std::ostream& out) {
    const auto filtered = open_refset(g).one_input_per_workload();
    if (!dest.empty()) {
        save_refset(filtered, dest);
    } else {
        emit(g, "largest" + std::string(kRefsetExtension), refset_to_string(filtered), out);
    }
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
    std::string features;
    std::string trace;
    std::string kernels;
    std::string exclude;
    std::string util_scope = "global";
    std::size_t util_k = 3;
    IngestFlags flags;
};

UtilScope parse_util_scope(const std::string& s) {
    if (s == "global") {
        return UtilScope::Global;
    }
    if (s == "same-cluster") {
        return UtilScope::SameCluster;
    }
    invalid("--util-scope expects global or same-cluster");
}

void cmd_predict(const PredictArgs& a, const GlobalFlags& g, std::ostream& out) {
    auto options = run_config(g);
    options.util_scope = parse_util_scope(a.util_scope);
    options.util_k = a.util_k;
    auto refs = open_refset(g);
    if (!a.exclude.empty()) {
        refs = refs.without(a.exclude);
    }
    if (a.features.empty() == a.trace.empty()) {
        invalid("pass exactly one of --features or --trace");
    }
    TargetFeatures target;
    if (!a.features.empty()) {
        target = target_from_features(
            feature_document_from_json(parse_json(read_text_file(a.features), a.features), a.features));
    } else {
        const auto kernels = a.kernels.empty() ? std::nullopt : std::optional<fs::path>(a.kernels);
        target = target_from_features(featurize(a.trace, kernels, g, a.flags).doc);
    }
    const auto rec = select_optimal_freq(target, refs, options);
    emit(g, file_key(target.id) + ".prediction.json", dump_json(to_json(rec)), out);
}

// ---------------------------------------------------------------- holdout

struct HoldoutArgs {
    std::vector<double> edges;
    bool largest_only = false;
    std::string util_scope = "global";
    std::size_t util_k = 3;
};

std::string optional_text(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string pairs_csv(const EvaluationReport& r) {
    std::ostringstream s;
    s << "workload,neighbor,neighbor_kind,distance,bin_width,chosen_freq_mhz,predicted,observed,error,infeasible,"
         "baseline_neighbor,baseline_distance,baseline_freq_mhz,baseline_observed,baseline_error\n";
    for (const auto& e : r.entries) {
        s << e.workload << ',' << e.neighbor.neighbor << ',' << to_string(e.neighbor_kind) << ','
          << format_double(e.neighbor.distance) << ',' << optional_text(e.bin_width) << ','
          << format_double(e.chosen_freq_mhz) << ',' << format_double(e.predicted) << ','
          << format_double(e.observed) << ',' << format_double(e.error) << ',' << (e.infeasible ? 1 : 0) << ',';
        if (e.baseline) {
            s << e.baseline->neighbor.neighbor << ',' << format_double(e.baseline->neighbor.distance) << ','
              << format_double(e.baseline->chosen_freq_mhz) << ',' << format_double(e.baseline->observed) << ','
              << format_double(e.baseline->error);
        } else {
            s << ",,,,";
        }
        s << '\n';
    }
    return s.str();
}

std::string histogram_csv(std::span<const HistogramBin> bins) {
    std::ostringstream s;
    s << "lower,upper,count,mean_error\n";
    for (const auto& b : bins) {
        s << format_double(b.lower) << ',' << (std::isinf(b.upper) ? std::string("inf") : format_double(b.upper))
          << ',' << b.count << ',' << format_double(b.mean_error) << '\n';
    }
    return s.str();
}

EvaluationReport run_holdout(const HoldoutArgs& a, const GlobalFlags& g) {
    auto options = run_config(g);
    options.util_scope = parse_util_scope(a.util_scope);
    options.util_k = a.util_k;
    auto refs = open_refset(g);
    if (a.largest_only) {
        refs = refs.one_input_per_workload();
    }
    const auto edges = a.edges.empty() ? default_distance_edges(options.objective) : a.edges;
    return holdout_evaluate(refs, options, edges);
}

void cmd_holdout(const HoldoutArgs& a, const GlobalFlags& g, std::ostream& out) {
    const auto report = run_holdout(a, g);
    emit(g, "holdout.json", dump_json(to_json(report)), out);
    if (!g.out.empty()) {
        write_text_file(fs::path(g.out) / "holdout_pairs.csv", pairs_csv(report));
    }
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string spec;
    std::string name;
};

void cmd_synth(const SynthArgs& a, const GlobalFlags& g, std::ostream& out) {
    require_out(g, "synth");
    const auto text = read_text_file(a.spec);
    auto spec = synth_spec_from_json_text(text, a.spec);
    if (g.seed_opt->count()) {
        spec.seed = g.seed;
    }
    if (g.tdp_opt->count()) {
        spec.tdp_w = g.tdp_w;
    }
    const auto j = parse_json(text, a.spec);
    TraceMeta meta;
    meta.device_tdp_w = spec.tdp_w;
    meta.workload = j.value("workload", std::string("synth"));
    meta.config = j.value("config", std::string());
    const std::string name = a.name.empty() ? file_key(meta.config.empty() ? meta.workload
                                                                            : meta.workload + "/" + meta.config)
                                            : a.name;
    const fs::path dir(g.out);

    std::ostringstream csv;
    write_energy_trace_csv(csv, synth_trace(spec));
    write_text_file(dir / (name + ".csv"), csv.str());
    write_text_file(dir / (name + ".meta.json"), meta_to_string(meta));
    std::vector<std::string> written{name + ".csv", name + ".meta.json"};

    if (j.contains("utilization") && !j.at("utilization").is_null()) {
        std::ostringstream k;
        write_kernel_csv(k, synth_kernels(spec.seed, utilization_from_json(j.at("utilization"))));
        write_text_file(dir / (name + ".kernels.csv"), k.str());
        written.push_back(name + ".kernels.csv");
    }
    if (spec.scaling) {
        write_text_file(dir / (name + ".profile.json"), dump_json(to_json(synth_profile(*spec.scaling))));
        written.push_back(name + ".profile.json");
    }
    for (const auto& w : written) {
        out << (dir / w).string() << '\n';
    }
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::vector<std::string> traces;
    bool skip_holdout = false;
    HoldoutArgs holdout;
    IngestFlags flags;
};

std::string cdf_csv(const PowerTrace& trace) {
    std::ostringstream s;
    s << "power_rel_tdp,cumulative_fraction\n";
    for (const auto& p : cdf_points(trace)) {
        s << format_double(p.value) << ',' << format_double(p.cumulative_fraction) << '\n';
    }
    return s.str();
}

std::string scaling_csv(const ReferenceSet& refs) {
    std::ostringstream s;
    s << "workload,freq_cap_mhz,p90_rel_tdp,p95_rel_tdp,p99_rel_tdp,perf_degradation_pct\n";
    for (const auto& [id, r] : refs.records()) {
        for (const auto& e : r.profile.entries) {
            s << id << ',' << format_double(e.freq_mhz) << ',' << format_double(e.p90_rel_tdp) << ','
              << format_double(e.p95_rel_tdp) << ',' << format_double(e.p99_rel_tdp) << ','
              << format_double(e.perf_degradation_pct) << '\n';
        }
    }
    return s.str();
}

std::string spike_vectors_csv(const ReferenceSet& refs, double c) {
    std::ostringstream s;
    s << "workload,bin_lower,bin_upper,value\n";
    for (const auto& [id, v] : refs.materialize_vectors(c)) {
        const auto n = v.values.size();
        for (std::size_t j = 0; j < n; ++j) {
            s << id << ',' << format_double(bin_edge(j, c, n)) << ',' << format_double(bin_edge(j + 1, c, n)) << ','
              << format_double(v.values[j]) << '\n';
        }
    }
    return s.str();
}

void cmd_report(const ReportArgs& a, const GlobalFlags& g, std::ostream& out) {
    require_out(g, "report");
    const fs::path dir(g.out);
    std::vector<std::string> written;
    for (const auto& t : a.traces) {
        const auto file = read_trace_csv(t);
        TraceMeta meta;
        if (fs::exists(meta_path_for(t))) {
            meta = read_meta(meta_path_for(t));
        }
        const double tdp = g.tdp().value_or(meta.device_tdp_w);
        if (!(tdp > 0.0)) {
            invalid(t + ": device TDP unknown; pass --tdp-w or provide a metadata sidecar");
        }
        const auto name = "cdf_" + fs::path(t).stem().string() + ".csv";
        write_text_file(dir / name, cdf_csv(to_power_trace(file, tdp, ingest_options(a.flags))));
        written.push_back(name);
    }
    if (!g.refset.empty()) {
        const auto refs = load_refset(g.refset);
        write_text_file(dir / "scaling_curves.csv", scaling_csv(refs));
        write_text_file(dir / "spike_vectors.csv", spike_vectors_csv(refs, vector_bin_width(g)));
        written.insert(written.end(), {"scaling_curves.csv", "spike_vectors.csv"});
        if (!a.skip_holdout && refs.size() >= 2) {
            const auto report = run_holdout(a.holdout, g);
            write_text_file(dir / "error_histogram.csv", histogram_csv(report.histogram));
            write_text_file(dir / "holdout_pairs.csv", pairs_csv(report));
            written.insert(written.end(), {"error_histogram.csv", "holdout_pairs.csv"});
        }
    }
    if (written.empty()) {
        invalid("report needs --trace files or a reference set");
    }
    for (const auto& w : written) {
        out << (dir / w).string() << '\n';
    }
}

void report_error(std::ostream& err, std::string_view code, const std::string& message) {
    Json j{{"error", Json{{"code", code}, {"message", message}}}};
    err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"minos: power-spike profiling and frequency-cap selection for GPU workloads", "minos"};
    app.fallthrough();
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--refset", g.refset, "Reference set file (" + std::string(kRefsetExtension) + ")")
        ->envname("MINOS_REFSET");
    g.tdp_opt = app.add_option("--tdp-w", g.tdp_w, "Device TDP in watts, overriding trace metadata");
    app.add_option("--bin-width", g.bin_width, "Spike-vector bin width <c|auto>")->capture_default_str();
    app.add_option("--objective", g.objective, "Capping objective <power|perf>")->capture_default_str();
    g.power_bound_opt =
        app.add_option("--power-bound", g.power_bound, "PowerCentric bound, multiple of TDP")->capture_default_str();
    g.perf_bound_opt =
        app.add_option("--perf-bound", g.perf_bound, "PerfCentric degradation bound, percent")->capture_default_str();
    g.percentile_opt = app.add_option("--percentile", g.percentile, "Power percentile <90|95|99>")
                           ->check(CLI::IsMember({90, 95, 99}))
                           ->capture_default_str();
    g.min_freq_opt = app.add_option("--min-freq-mhz", g.min_freq_mhz, "PerfCentric frequency floor in MHz");
    g.seed_opt = app.add_option("--seed", g.seed, "Seed for all randomness")->capture_default_str();
    app.add_option("--out", g.out, "Output directory");

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Extract a feature document from each trace");
    ingest_cmd->add_option("traces", ingest.traces, "Trace CSV files")->required();
    ingest_cmd->add_option("--kernels", ingest.kernels, "Kernel CSV for a single trace");
    add_ingest_flags(ingest_cmd, ingest.flags);

    ClusterArgs cluster;
    auto* cluster_cmd = app.add_subcommand("cluster", "Cluster the reference set");
    cluster_cmd->add_option("--mode", cluster.mode, "power | util")->capture_default_str();
    cluster.threshold_opt = cluster_cmd->add_option("--threshold", cluster.threshold, "Dendrogram cut height");
    cluster_cmd->add_option("--linkage", cluster.linkage, "ward | average | complete")->capture_default_str();
    cluster_cmd->add_option("--k", cluster.k, "Fixed K-means cluster count");
    cluster_cmd->add_option("--k-min", cluster.k_min, "Smallest k in the silhouette sweep")->capture_default_str();
    cluster_cmd->add_option("--k-max", cluster.k_max, "Largest k in the silhouette sweep")->capture_default_str();
    cluster_cmd->add_flag("--largest-only", cluster.largest_only, "Use one input per application");

    auto* refset_cmd = app.add_subcommand("refset", "Manage the reference set");
    refset_cmd->require_subcommand(1);
    RefsetAddArgs add;
    auto* add_cmd = refset_cmd->add_subcommand("add", "Profile a workload into the reference set");
    add_cmd->add_option("--id", add.id, "Workload id app/config (default: from trace metadata)");
    add_cmd->add_flag("--largest", add.largest, "Mark as the largest input of its application");
    add_cmd->add_option("--trace", add.trace, "Uncapped trace CSV")->required();
    add_cmd->add_option("--kernels", add.kernels, "Kernel CSV (default: <stem>.kernels.csv when present)");
    add_cmd->add_option("--profile", add.profile, "Scaling profile JSON");
    add_cmd->add_option("--sweep", add.sweep, "Capped traces whose metadata carry freq_cap_mhz");
    add_ingest_flags(add_cmd, add.flags);
    auto* list_cmd = refset_cmd->add_subcommand("list", "Summarize the reference set as CSV");
    std::string filter_dest;
    auto* filter_cmd = refset_cmd->add_subcommand("filter-largest", "Keep one input per application");
    filter_cmd->add_option("--dest", filter_dest, "Write the filtered set to this file");

    PredictArgs predict;
    auto* predict_cmd = app.add_subcommand("predict", "Recommend a frequency cap for a target workload");
    predict_cmd->add_option("--features", predict.features, "Feature JSON from ingest");
    predict_cmd->add_option("--trace", predict.trace, "Uncapped trace CSV");
    predict_cmd->add_option("--kernels", predict.kernels, "Kernel CSV for --trace");
    predict_cmd->add_option("--exclude", predict.exclude, "Reference id to leave out");
    predict_cmd->add_option("--util-scope", predict.util_scope, "global | same-cluster")->capture_default_str();
    predict_cmd->add_option("--util-k", predict.util_k, "K-means k for same-cluster scope")->capture_default_str();
    add_ingest_flags(predict_cmd, predict.flags);

    HoldoutArgs holdout;
    auto* holdout_cmd = app.add_subcommand("holdout", "Hold-one-out evaluation of the reference set");
    holdout_cmd->add_option("--edges", holdout.edges, "Distance histogram edges")->delimiter(',');
    holdout_cmd->add_flag("--largest-only", holdout.largest_only, "Use one input per application");
    holdout_cmd->add_option("--util-scope", holdout.util_scope, "global | same-cluster")->capture_default_str();
    holdout_cmd->add_option("--util-k", holdout.util_k, "K-means k for same-cluster scope")->capture_default_str();

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic workload from a JSON spec");
    synth_cmd->add_option("--spec", synth.spec, "Synthesis spec JSON")->required();
    synth_cmd->add_option("--name", synth.name, "Output file stem");

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Emit plot-ready CSV data");
    report_cmd->add_option("--trace", report.traces, "Traces to emit power CDFs for");
    report_cmd->add_flag("--no-holdout", report.skip_holdout, "Skip the error histogram");
    report_cmd->add_option("--edges", report.holdout.edges, "Distance histogram edges")->delimiter(',');
    add_ingest_flags(report_cmd, report.flags);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report_error(err, "Usage", e.what());
        return 2;
    }

    try {
        if (app.got_subcommand(ingest_cmd)) {
            cmd_ingest(ingest, g, out);
        } else if (app.got_subcommand(cluster_cmd)) {
            cmd_cluster(cluster, g, out);
        } else if (refset_cmd->got_subcommand(add_cmd)) {
            cmd_refset_add(add, g, out);
        } else if (refset_cmd->got_subcommand(list_cmd)) {
            cmd_refset_list(g, out);
        } else if (refset_cmd->got_subcommand(filter_cmd)) {
            cmd_refset_filter(filter_dest, g, out);
        } else if (app.got_subcommand(predict_cmd)) {
            cmd_predict(predict, g, out);
        } else if (app.got_subcommand(holdout_cmd)) {
            cmd_holdout(holdout, g, out);
        } else if (app.got_subcommand(synth_cmd)) {
            cmd_synth(synth, g, out);
        } else if (app.got_subcommand(report_cmd)) {
            cmd_report(report, g, out);
        }
    } catch (const Error& e) {
        report_error(err, to_string(e.code()), e.what());
        return 1;
    } catch (const Json::exception& e) {
        report_error(err, to_string(ErrorCode::ParseError), e.what());
        return 1;
    } catch (const fs::filesystem_error& e) {
        report_error(err, to_string(ErrorCode::IoError), e.what());
        return 1;
    }
    return 0;
}

}  // namespace minos::cli
