#pragma once

// On-disk formats for telemetry and counters:
//
//   trace CSV    timestamp_us,energy_uj[,activity]   energy-accumulator log
//                timestamp_us,power_w[,activity]     pre-derived power
//   kernel CSV   kernel_name,duration_ns,sm_util_pct,dram_util_pct
//   sidecar      <stem>.meta.json with device_tdp_w, workload, config,
//                freq_cap_mhz
//
// Headers are required, fields are comma separated, the decimal point is '.'
// and kernel names may be double-quoted.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "minos/features.hpp"
#include "minos/trace.hpp"

namespace minos {

std::vector<std::string> split_csv_line(std::string_view line, const std::string& source, std::size_t line_no);

/// Shortest decimal text that parses back to `v`.
std::string format_double(double v);

enum class TraceFormat { Energy, Power };

struct TraceFile {
    TraceFormat format = TraceFormat::Energy;
    bool has_activity = false;
    std::vector<RawSample> raw;      // Energy format
    std::vector<PowerSample> power;  // Power format
    std::vector<std::uint64_t> activity;  // Power format, when present
};

TraceFile parse_trace_csv(std::string_view text, const std::string& source);
TraceFile read_trace_csv(const std::filesystem::path& path);

/// Derives (when needed), filters and trims a parsed trace.
PowerTrace to_power_trace(const TraceFile& file, double device_tdp_w, const IngestOptions& options = {});

void write_energy_trace_csv(std::ostream& out, const RawSampleSeries& raw);

std::vector<KernelRecord> parse_kernel_csv(std::string_view text, const std::string& source);
std::vector<KernelRecord> read_kernel_csv(const std::filesystem::path& path);
void write_kernel_csv(std::ostream& out, std::span<const KernelRecord> kernels);

struct TraceMeta {
    double device_tdp_w = 0.0;
    std::string workload;
    std::string config;
    std::optional<double> freq_cap_mhz;
};

/// `dir/run.csv` -> `dir/run.meta.json`.
std::filesystem::path meta_path_for(const std::filesystem::path& trace_path);

TraceMeta parse_meta(std::string_view text, const std::string& source);
TraceMeta read_meta(const std::filesystem::path& path);
std::string meta_to_string(const TraceMeta& meta);

std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace minos
