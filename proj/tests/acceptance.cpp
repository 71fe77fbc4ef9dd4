// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "fixtures.hpp"
#include "minos/cluster.hpp"
#include "minos/error.hpp"
#include "minos/formats.hpp"
#include "minos/json_io.hpp"
#include "minos/predict.hpp"
#include "minos/synth.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace minos;

namespace {

/// Collects failed expectations for one criterion.
struct Check {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            failures.push_back(what);
        }
    }
};

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("minos_acceptance_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult cli_run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string num(double v) { return format_double(v); }

// ---------------------------------------------------------------- 1

FeatureDocument feature_doc(const WorkloadRecord& r) {
    FeatureDocument d;
    d.workload = r.app();
    d.config = r.config();
    d.spike_vector = r.magnitudes.to_vector(0.1, fixtures::kTdp);
    d.summary = r.summary;
    d.utilization = r.utilization;
    d.magnitudes = r.magnitudes;
    return d;
}

void case_study(Check& c) {
    const auto cs = fixtures::case_study();
    const auto faiss = TargetFeatures::from_record(cs.faiss);
    const auto qwen = TargetFeatures::from_record(cs.qwen);
    const double fmax = 2100.0;

    for (const std::optional<double> width : {std::optional<double>{}, std::optional<double>{0.1}}) {
        const std::string tag = width ? " (c=0.1)" : " (auto c)";
        PredictOptions power;
        power.bin_width = width;
        const auto f = select_optimal_freq(faiss, cs.refs, power);
        c.expect(f.neighbor.neighbor == "sdxl/bsz8", "FAISS power neighbor is " + f.neighbor.neighbor + tag);
        c.expect(f.chosen_freq_mhz == 1300.0, "FAISS cap " + num(f.chosen_freq_mhz) + tag);
        const auto q = select_optimal_freq(qwen, cs.refs, power);
        c.expect(q.neighbor.neighbor == "milc/24", "Qwen power neighbor is " + q.neighbor.neighbor + tag);
        c.expect(q.chosen_freq_mhz == 1500.0, "Qwen cap " + num(q.chosen_freq_mhz) + tag);
        if (width) {
            c.expect(std::abs(f.neighbor.distance - 0.05) < 1e-3, "FAISS distance " + num(f.neighbor.distance));
            c.expect(std::abs(q.neighbor.distance - 0.01) < 1e-3, "Qwen distance " + num(q.neighbor.distance));
        }
    }
    PredictOptions perf;
    perf.objective = Objective::PerfCentric;
    const auto qp = select_optimal_freq(qwen, cs.refs, perf);
    c.expect(qp.neighbor.neighbor == "deepmd/water", "Qwen perf neighbor is " + qp.neighbor.neighbor);
    c.expect(qp.chosen_freq_mhz == 1900.0, "Qwen perf cap " + num(qp.chosen_freq_mhz));
    const auto fp = select_optimal_freq(faiss, cs.refs, perf);
    c.expect(fp.neighbor.neighbor == "sdxl/bsz8", "FAISS perf neighbor is " + fp.neighbor.neighbor);
    c.expect(fp.chosen_freq_mhz == fmax, "FAISS perf cap " + num(fp.chosen_freq_mhz));

    // Observed outcome on the targets' own curves.
    c.expect(prediction_error_power(cs.faiss.profile.find(1300.0)->p90_rel_tdp) == 0.0, "FAISS power error");
    c.expect(std::abs(prediction_error_power(cs.qwen.profile.find(1500.0)->p90_rel_tdp) - 5.4) < 1e-9,
             "Qwen power error");

    // The same answers through the command line.
    const auto dir = scratch("case_study");
    const auto ref = (dir / ("case" + std::string(kRefsetExtension))).string();
    save_refset(cs.refs, ref);
    struct Expect {
        const WorkloadRecord* target;
        std::string objective;
        double freq;
        std::string neighbor;
    };
    for (const auto& e : {Expect{&cs.faiss, "power", 1300.0, "sdxl/bsz8"}, Expect{&cs.qwen, "power", 1500.0, "milc/24"},
                          Expect{&cs.faiss, "perf", fmax, "sdxl/bsz8"}, Expect{&cs.qwen, "perf", 1900.0, "deepmd/water"}}) {
        const auto doc = dir / (e.target->app() + ".features.json");
        write_text_file(doc, dump_json(to_json(feature_doc(*e.target))));
        const auto r = cli_run({"--refset", ref, "--objective", e.objective, "predict", "--features", doc.string()});
        if (r.code != 0) {
            c.expect(false, "CLI predict failed: " + r.err);
            continue;
        }
        const auto j = parse_json(r.out, "predict");
        c.expect(j.at("chosen_freq_mhz").get<double>() == e.freq,
                 "CLI " + e.objective + " cap for " + e.target->id);
        c.expect(j.at("neighbor").at("id").get<std::string>() == e.neighbor,
                 "CLI " + e.objective + " neighbor for " + e.target->id);
    }
}

// ---------------------------------------------------------------- 2

void savings(Check& c) {
    std::map<double, double> ten;
    for (int i = 0; i < 10; ++i) {
        ten[1200.0 + 100.0 * i] = 30.0;
    }
    const double s = profiling_savings(ten, 2100.0);
    c.expect(std::abs(s - 90.0) <= 1e-12 * 90.0, "ten equal profiles give " + num(s));

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> t(1e-3, 1e4);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::map<double, double> m;
        const auto n = 1 + rng() % 20;
        for (std::size_t i = 0; i < n; ++i) {
            m[800.0 + 50.0 * static_cast<double>(i)] = t(rng);
        }
        auto it = m.begin();
        std::advance(it, static_cast<long>(rng() % n));
        const double got = profiling_savings(m, it->first);
        const double want = oracle::profiling_savings(m, it->first);
        const double rel = want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
        worst = std::max(worst, rel);
    }
    c.expect(worst <= 1e-12, "worst relative deviation " + num(worst));
}

// ---------------------------------------------------------------- 3

void spike_vector_oracle(Check& c) {
    std::mt19937_64 rng(33);
    std::size_t mismatches = 0;
    std::size_t bad_sums = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> mags(1 + rng() % 500);
        const int mode = trial % 3;
        for (auto& m : mags) {
            if (mode == 0) {
                m = 0.5 + 1.8 * unit_uniform(rng);
            } else if (mode == 1) {
                // Exactly on the quantization grid, edges included.
                m = SpikeMagnitudes::dequantize(5000 + static_cast<std::int64_t>(rng() % 17001));
            } else {
                m = 0.5 + 0.05 * static_cast<double>(rng() % 40);
            }
        }
        for (const double w : default_bin_candidates()) {
            const auto v = build_spike_vector(mags, w, fixtures::kTdp);
            const auto expect = oracle::bin_counts(mags, w);
            bool same = v.values.size() == expect.size();
            for (std::size_t j = 0; same && j < expect.size(); ++j) {
                same = v.values[j] == static_cast<double>(expect[j]) / static_cast<double>(mags.size());
            }
            mismatches += same ? 0 : 1;
            const double sum = std::accumulate(v.values.begin(), v.values.end(), 0.0);
            bad_sums += std::abs(sum - 1.0) <= 1e-12 ? 0 : 1;
        }
    }
    c.expect(mismatches == 0, std::to_string(mismatches) + " vectors differ from the counting oracle");
    c.expect(bad_sums == 0, std::to_string(bad_sums) + " vectors do not sum to 1");
}

// ---------------------------------------------------------------- 4

void clustering(Check& c) {
    std::mt19937_64 rng(44);
    std::size_t hac_mismatch = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 2 + rng() % 11;
        const auto dims = 2 + rng() % 8;
        std::vector<std::vector<double>> pts(n, std::vector<double>(dims));
        for (auto& p : pts) {
            for (auto& x : p) {
                // Small integers make exact distance ties common.
                x = trial % 2 ? unit_uniform(rng) : static_cast<double>(rng() % 3);
            }
            if (std::all_of(p.begin(), p.end(), [](double x) { return x == 0.0; })) {
                p[0] = 1.0;
            }
        }
        std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
        DistanceMatrix dm(n);
        std::vector<std::string> leaves;
        for (std::size_t i = 0; i < n; ++i) {
            leaves.push_back("w" + std::to_string(100 + i));
            for (std::size_t j = i + 1; j < n; ++j) {
                d[i][j] = d[j][i] = cosine_distance(pts[i], pts[j]);
                dm.set(i, j, d[i][j]);
            }
        }
        for (const auto linkage : {Linkage::Ward, Linkage::Average, Linkage::Complete}) {
            const auto got = hac_from_distances(leaves, dm, linkage).merges;
            const auto want = oracle::naive_hac(d, linkage);
            bool same = got.size() == want.size();
            for (std::size_t m = 0; same && m < got.size(); ++m) {
                same = got[m].a == want[m].a && got[m].b == want[m].b && got[m].size == want[m].size &&
                       std::abs(got[m].distance - want[m].distance) <= 1e-12 * std::max(1.0, want[m].distance);
            }
            hac_mismatch += same ? 0 : 1;
        }
    }
    c.expect(hac_mismatch == 0, std::to_string(hac_mismatch) + " merge sequences differ from the naive oracle");

    std::size_t rising = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 r(seed + 1000);
        std::map<std::string, UtilizationPoint> pts;
        const auto n = 10 + r() % 60;
        for (std::size_t i = 0; i < n; ++i) {
            pts["p" + std::to_string(i)] = {100.0 * unit_uniform(r), 100.0 * unit_uniform(r)};
        }
        const auto k = 2 + seed % 7;
        const auto model = kmeans_fit(pts, k, seed);
        for (std::size_t i = 1; i < model.objective_history.size(); ++i) {
            rising += model.objective_history[i] <= model.objective_history[i - 1] ? 0 : 1;
        }
    }
    c.expect(rising == 0, std::to_string(rising) + " K-means iterations increased the objective");

    std::map<std::string, UtilizationPoint> blobs;
    std::normal_distribution<double> jitter(0.0, 2.0);
    const std::vector<UtilizationPoint> centers{{15.0, 80.0}, {80.0, 20.0}, {50.0, 50.0}};
    for (std::size_t b = 0; b < centers.size(); ++b) {
        for (int i = 0; i < 30; ++i) {
            blobs["b" + std::to_string(b) + "_" + std::to_string(10 + i)] = {
                centers[b].app_sm_util + jitter(rng), centers[b].app_dram_util + jitter(rng)};
        }
    }
    const auto sweep = silhouette_sweep(blobs, 3, 17, 0);
    c.expect(sweep.best_k == 3, "silhouette sweep picked k=" + std::to_string(sweep.best_k));
    c.expect(sweep.scores.at(3) > 0.9, "silhouette at k=3 is " + num(sweep.scores.at(3)));
}

// ---------------------------------------------------------------- 5

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void holdout_consistency(Check& c) {
    const auto refs = fixtures::grouped_refset(false);
    c.expect(refs.size() == 11, "grouped set has " + std::to_string(refs.size()) + " workloads");
    PredictOptions power;
    const auto pr = holdout_evaluate(refs, power, default_distance_edges(Objective::PowerCentric));
    c.expect(pr.mean_abs_error == 0.0, "power mean error " + num(pr.mean_abs_error));
    PredictOptions perf;
    perf.objective = Objective::PerfCentric;
    const auto fr = holdout_evaluate(refs, perf, default_distance_edges(Objective::PerfCentric));
    c.expect(fr.mean_abs_error == 0.0, "perf mean error " + num(fr.mean_abs_error));

    const auto isolated = fixtures::grouped_refset(true);
    const auto vectors = isolated.materialize_vectors(0.1);
    double closest = 1.0;
    for (const auto& [id, v] : vectors) {
        if (id != fixtures::kIsolatedId) {
            closest = std::min(closest, cosine_distance(vectors.at(fixtures::kIsolatedId), v));
        }
    }
    c.expect(closest > 0.1, "isolated workload is only " + num(closest) + " from its nearest reference");
    const auto ir = holdout_evaluate(isolated, power, default_distance_edges(Objective::PowerCentric));
    double isolated_error = -1.0;
    std::vector<double> rest;
    for (const auto& e : ir.entries) {
        if (e.workload == fixtures::kIsolatedId) {
            isolated_error = e.error;
        } else {
            rest.push_back(e.error);
        }
    }
    const double m = median(rest);
    c.expect(isolated_error > m, "isolated error " + num(isolated_error) + " vs median " + num(m));
}

// ---------------------------------------------------------------- 6

void baseline_separation(Check& c) {
    const auto refs = fixtures::mean_collision_refset();
    const auto r = holdout_evaluate(refs, PredictOptions{}, default_distance_edges(Objective::PowerCentric));
    if (!r.baseline_mean_abs_error) {
        c.expect(false, "baseline was not evaluated");
        return;
    }
    c.expect(*r.baseline_mean_abs_error > r.mean_abs_error,
             "baseline " + num(*r.baseline_mean_abs_error) + " vs " + num(r.mean_abs_error));
}

// ---------------------------------------------------------------- 7

void pipeline_duality(Check& c) {
    std::mt19937_64 rng(77);
    const auto widths = default_bin_candidates();
    std::size_t vector_misses = 0;
    std::size_t trim_misses = 0;
    for (int trial = 0; trial < 100; ++trial) {
        SynthSpec s;
        s.seed = rng();
        s.bin_width = widths[rng() % widths.size()];
        const auto n = bin_count(s.bin_width);
        double total = 0.0;
        s.occupancies.assign(n, 0.0);
        for (auto& o : s.occupancies) {
            o = rng() % 3 == 0 ? 0.0 : unit_uniform(rng);
            total += o;
        }
        if (total == 0.0) {
            s.occupancies[rng() % n] = total = 1.0;
        }
        for (auto& o : s.occupancies) {
            o /= total;
        }
        s.sample_count = 200 + rng() % 2800;
        s.idle_head = rng() % 100;
        s.idle_tail = rng() % 100;
        s.interval_us = 100 + static_cast<std::int64_t>(rng() % 9900);
        s.tdp_w = 300.0 + static_cast<double>(rng() % 600);
        s.idle_rel_tdp = 0.05 + 0.4 * unit_uniform(rng);
        double narrowest = s.bin_width;
        for (std::size_t j = 0; j < n; ++j) {
            narrowest = std::min(narrowest, bin_edge(j + 1, s.bin_width, n) - bin_edge(j, s.bin_width, n));
        }
        s.noise_amplitude = 0.25 * narrowest * unit_uniform(rng);

        std::ostringstream csv;
        write_energy_trace_csv(csv, synth_trace(s));
        const auto file = parse_trace_csv(csv.str(), "synth");
        const auto trace = to_power_trace(file, s.tdp_w);
        const auto v = build_spike_vector(detect_spikes(trace), s.bin_width, s.tdp_w);
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(v.values[j] - s.occupancies[j]) > 1.0 / static_cast<double>(s.sample_count) + 1e-12) {
                ++vector_misses;
                break;
            }
        }
        const auto samples = trace.samples();
        const bool trimmed = trace.size() == s.sample_count &&
                             samples.front().timestamp_us ==
                                 static_cast<std::int64_t>(s.idle_head + 1) * s.interval_us &&
                             samples.back().timestamp_us ==
                                 static_cast<std::int64_t>(s.idle_head + s.sample_count) * s.interval_us;
        trim_misses += trimmed ? 0 : 1;
    }
    c.expect(vector_misses == 0, std::to_string(vector_misses) + " specs not recovered within 1/sample_count");
    c.expect(trim_misses == 0, std::to_string(trim_misses) + " specs with wrong trim boundaries");
}

// ---------------------------------------------------------------- 8

void bin_size_robustness(Check& c, std::string& detail) {
    const std::vector<double> widths{0.1, 0.15, 0.2};
    std::map<double, double> sum;
    std::size_t count = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto refs = fixtures::smooth_refset(seed, 24);
        for (const auto& [id, r] : refs.records()) {
            const auto others = refs.without(id);
            for (const double w : widths) {
                const auto n = nearest_power_neighbor(r.magnitudes.to_vector(w, fixtures::kTdp),
                                                      others.materialize_vectors(w));
                sum[w] += std::abs(r.summary.p90_rel_tdp - others.get(n.neighbor).summary.p90_rel_tdp);
            }
            ++count;
        }
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::ostringstream s;
    for (const double w : widths) {
        const double mean = sum[w] / static_cast<double>(count);
        lo = std::min(lo, mean);
        hi = std::max(hi, mean);
        s << "Err(" << num(w) << ")=" << num(mean) << ' ';
    }
    const double spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    s << "spread=" << num(spread);
    detail = s.str();
    c.expect(spread < 0.1, "normalized spread " + num(spread));
}

// ---------------------------------------------------------------- 9

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            files[fs::relative(e.path(), dir).string()] = read_text_file(e.path());
        }
    }
    return files;
}

std::string spec_json(const std::string& workload, const std::string& config, double mu, double sm, double dram,
                      double crossing, double slope) {
    const auto n = bin_count(0.1);
    Json occ = Json::array();
    double total = 0.0;
    std::vector<double> raw;
    for (std::size_t j = 0; j < n; ++j) {
        const double center = 0.55 + 0.1 * static_cast<double>(j);
        raw.push_back(std::exp(-std::pow((center - mu) / 0.15, 2)));
        total += raw.back();
    }
    for (const double r : raw) {
        occ.push_back(r / total);
    }
    Json j{{"workload", workload},
           {"config", config},
           {"seed", 11},
           {"bin_width", 0.1},
           {"occupancies", occ},
           {"sample_count", 600},
           {"idle_head", 15},
           {"idle_tail", 10},
           {"tdp_w", 750},
           {"noise_amplitude", 0.02},
           {"utilization", Json{{"app_sm_util", sm}, {"app_dram_util", dram}}},
           {"scaling", Json{{"crossing_freq_mhz", crossing}, {"degradation_slope_pct", slope}}}};
    return dump_json(j);
}

bool pipeline_run(const fs::path& root, Check& c) {
    const auto work = root / "work";
    const auto out = root / "out";
    fs::create_directories(work);
    fs::create_directories(out);
    const auto ref = (out / ("refs" + std::string(kRefsetExtension))).string();
    struct W {
        std::string app, config;
        double mu, sm, dram, crossing, slope;
    };
    const std::vector<W> ws{{"alpha", "a", 0.8, 20, 70, 2100, 2}, {"alpha", "b", 0.85, 22, 68, 2100, 2},
                            {"beta", "a", 1.3, 70, 20, 1500, 1}, {"gamma", "a", 1.7, 45, 45, 1300, 0.5},
                            {"delta", "a", 1.1, 90, 85, 1700, 3}};
    auto ok = [&](const CliResult& r, const std::string& step) {
        c.expect(r.code == 0, step + ": " + r.err);
        return r.code == 0;
    };
    std::vector<std::string> traces;
    for (const auto& w : ws) {
        const auto spec = work / (w.app + "_" + w.config + ".spec.json");
        write_text_file(spec, spec_json(w.app, w.config, w.mu, w.sm, w.dram, w.crossing, w.slope));
        if (!ok(cli_run({"--out", work.string(), "synth", "--spec", spec.string()}), "synth")) {
            return false;
        }
        const auto stem = (work / (w.app + "_" + w.config)).string();
        traces.push_back(stem + ".csv");
        std::vector<std::string> add{"--refset", ref, "refset", "add", "--trace", stem + ".csv", "--profile",
                                     stem + ".profile.json"};
        if (w.config == "b") {
            add.push_back("--largest");
        }
        if (!ok(cli_run(add), "refset add")) {
            return false;
        }
    }
    std::vector<std::string> ingest{"--out", out.string(), "ingest"};
    ingest.insert(ingest.end(), traces.begin(), traces.end());
    bool all = ok(cli_run(ingest), "ingest");
    all = ok(cli_run({"--refset", ref, "--out", out.string(), "cluster", "--threshold", "0.5"}), "cluster power") && all;
    const auto util_dir = out / "util";
    fs::create_directories(util_dir);
    all = ok(cli_run({"--refset", ref, "--out", util_dir.string(), "cluster", "--mode", "util", "--k-max", "4"}),
             "cluster util") &&
          all;
    all = ok(cli_run({"--refset", ref, "--out", out.string(), "predict", "--features",
                      (out / "beta_a.features.json").string(), "--exclude", "beta/a"}),
             "predict") &&
          all;
    all = ok(cli_run({"--refset", ref, "--out", out.string(), "holdout"}), "holdout") && all;
    all = ok(cli_run({"--refset", ref, "--out", out.string(), "refset", "list"}), "refset list") && all;
    all = ok(cli_run({"--refset", ref, "--out", out.string(), "refset", "filter-largest"}), "filter-largest") && all;
    const auto report_dir = out / "report";
    fs::create_directories(report_dir);
    all = ok(cli_run({"--refset", ref, "--out", report_dir.string(), "report", "--trace", traces.front()}), "report") &&
          all;
    return all;
}

void byte_stability(Check& c) {
    const auto a = scratch("stable_a");
    const auto b = scratch("stable_b");
    if (!pipeline_run(a, c) || !pipeline_run(b, c)) {
        return;
    }
    const auto sa = snapshot(a);
    const auto sb = snapshot(b);
    c.expect(sa.size() == sb.size(), "runs produced different file sets");
    std::size_t json = 0;
    std::size_t csv = 0;
    for (const auto& [name, text] : sa) {
        const auto it = sb.find(name);
        c.expect(it != sb.end() && it->second == text, name + " differs between runs");
        json += name.ends_with(".json") ? 1 : 0;
        csv += name.ends_with(".csv") ? 1 : 0;
    }
    c.expect(json >= 10 && csv >= 10, "too few emissions compared");

    const auto ref = a / "out" / ("refs" + std::string(kRefsetExtension));
    const auto first = read_text_file(ref);
    const auto copy = a / ("copy" + std::string(kRefsetExtension));
    save_refset(load_refset(ref), copy);
    c.expect(read_text_file(copy) == first, "store after load changes the reference set bytes");
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        double budget_s;
        std::function<void(Check&, std::string&)> run;
    };
    const std::vector<Criterion> criteria{
        {1, "case-study caps and neighbors", 1.0, [](Check& c, std::string&) { case_study(c); }},
        {2, "profiling savings formula", 1.0, [](Check& c, std::string&) { savings(c); }},
        {3, "spike vectors equal the counting oracle", 10.0, [](Check& c, std::string&) { spike_vector_oracle(c); }},
        {4, "clustering oracles", 60.0, [](Check& c, std::string&) { clustering(c); }},
        {5, "hold-one-out self-consistency", 30.0, [](Check& c, std::string&) { holdout_consistency(c); }},
        {6, "spike neighbors beat the mean-power baseline", 10.0,
         [](Check& c, std::string&) { baseline_separation(c); }},
        {7, "synth to ingest recovers vectors and trim", 30.0, [](Check& c, std::string&) { pipeline_duality(c); }},
        {8, "bin-size robustness on smooth distributions", 30.0,
         [](Check& c, std::string& d) { bin_size_robustness(c, d); }},
        {9, "byte-stable emissions and round trips", 5.0, [](Check& c, std::string&) { byte_stability(c); }},
    };

    int failed = 0;
    for (const auto& cr : criteria) {
        Check check;
        std::string detail;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.run(check, detail);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        check.expect(secs < cr.budget_s, "took " + num(secs) + " s, budget " + num(cr.budget_s) + " s");
        const bool pass = check.failures.empty();
        failed += pass ? 0 : 1;
        std::printf("%s criterion %d: %s (%.0f ms)%s%s\n", pass ? "PASS" : "FAIL", cr.id, cr.name.c_str(),
                    secs * 1000.0, detail.empty() ? "" : " ", detail.c_str());
        for (const auto& f : check.failures) {
            std::printf("    %s\n", f.c_str());
        }
    }
    fs::remove_all(fs::temp_directory_path() / ("minos_acceptance_" + std::to_string(::getpid())));
    return failed == 0 ? 0 : 1;
}
