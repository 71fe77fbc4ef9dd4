#include "minos/formats.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "minos/error.hpp"
#include "minos/json_io.hpp"

namespace minos {

namespace {

struct Lines {
    std::vector<std::string_view> lines;
};

Lines split_lines(std::string_view text) {
    Lines out;
    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (line.ends_with('\r')) {
            line.remove_suffix(1);
        }
        out.lines.push_back(line);
        if (nl == std::string_view::npos) {
            break;
        }
        start = nl + 1;
    }
    // A trailing newline leaves one empty element behind.
    while (!out.lines.empty() && out.lines.back().empty()) {
        out.lines.pop_back();
    }
    return out;
}

template <typename T>
T parse_field(std::string_view field, const std::string& source, std::size_t line_no, std::string_view column) {
    T value{};
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ParseError(source, line_no,
                         "column '" + std::string(column) + "': cannot parse '" + std::string(field) + "'");
    }
    return value;
}

std::string join(const std::vector<std::string>& cols) {
    std::string out;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out += (i ? "," : "") + cols[i];
    }
    return out;
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line, const std::string& source, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"' && cur.empty() && !was_quoted) {
            quoted = true;
            was_quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            was_quoted = false;
        } else {
            if (was_quoted) {
                throw ParseError(source, line_no, "unexpected text after a quoted field");
            }
            cur += ch;
        }
    }
    if (quoted) {
        throw ParseError(source, line_no, "unterminated quoted field");
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

TraceFile parse_trace_csv(std::string_view text, const std::string& source) {
    const auto lines = split_lines(text).lines;
    if (lines.empty()) {
        throw ParseError(source, 1, "empty trace file; expected a header row");
    }
    const auto header = split_csv_line(lines[0], source, 1);
    TraceFile file;
    if (header == std::vector<std::string>{"timestamp_us", "energy_uj", "activity"}) {
        file.format = TraceFormat::Energy;
        file.has_activity = true;
    } else if (header == std::vector<std::string>{"timestamp_us", "energy_uj"}) {
        file.format = TraceFormat::Energy;
    } else if (header == std::vector<std::string>{"timestamp_us", "power_w", "activity"}) {
        file.format = TraceFormat::Power;
        file.has_activity = true;
    } else if (header == std::vector<std::string>{"timestamp_us", "power_w"}) {
        file.format = TraceFormat::Power;
    } else {
        throw ParseError(source, 1,
                         "unrecognized header '" + std::string(lines[0]) +
                             "'; expected timestamp_us,energy_uj[,activity] or timestamp_us,power_w[,activity]");
    }
    const auto columns = header.size();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto line_no = i + 1;
        const auto fields = split_csv_line(lines[i], source, line_no);
        if (fields.size() != columns) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(columns) + " fields, found " + std::to_string(fields.size()));
        }
        const auto ts = parse_field<std::int64_t>(fields[0], source, line_no, header[0]);
        std::uint64_t activity = 0;
        if (file.has_activity) {
            activity = parse_field<std::uint64_t>(fields[2], source, line_no, header[2]);
        }
        if (file.format == TraceFormat::Energy) {
            const auto e = parse_field<std::uint64_t>(fields[1], source, line_no, header[1]);
            if (!file.raw.empty() && ts <= file.raw.back().timestamp_us) {
                throw ParseError(source, line_no, "timestamps must be strictly increasing");
            }
            file.raw.push_back({ts, e, activity});
        } else {
            const auto w = parse_field<double>(fields[1], source, line_no, header[1]);
            if (!(w >= 0.0)) {
                throw ParseError(source, line_no, "power must be non-negative");
            }
            if (!file.power.empty() && ts <= file.power.back().timestamp_us) {
                throw ParseError(source, line_no, "timestamps must be strictly increasing");
            }
            file.power.push_back({ts, w});
            if (file.has_activity) {
                file.activity.push_back(activity);
            }
        }
    }
    return file;
}

TraceFile read_trace_csv(const std::filesystem::path& path) { return parse_trace_csv(read_text_file(path), path.string()); }

PowerTrace to_power_trace(const TraceFile& file, double device_tdp_w, const IngestOptions& options) {
    if (file.format == TraceFormat::Energy) {
        return process_raw(RawSampleSeries(file.raw, device_tdp_w, file.has_activity), options);
    }
    if (file.has_activity) {
        return process_power(file.power, std::span<const std::uint64_t>(file.activity), device_tdp_w, options);
    }
    return process_power(file.power, std::nullopt, device_tdp_w, options);
}

void write_energy_trace_csv(std::ostream& out, const RawSampleSeries& raw) {
    out << (raw.has_activity() ? "timestamp_us,energy_uj,activity\n" : "timestamp_us,energy_uj\n");
    for (const auto& s : raw.samples()) {
        out << s.timestamp_us << ',' << s.energy_uj;
        if (raw.has_activity()) {
            out << ',' << s.activity;
        }
        out << '\n';
    }
}

std::vector<KernelRecord> parse_kernel_csv(std::string_view text, const std::string& source) {
    const auto lines = split_lines(text).lines;
    if (lines.empty()) {
        throw ParseError(source, 1, "empty kernel file; expected a header row");
    }
    const std::vector<std::string> expected{"kernel_name", "duration_ns", "sm_util_pct", "dram_util_pct"};
    const auto header = split_csv_line(lines[0], source, 1);
    if (header != expected) {
        throw ParseError(source, 1, "unrecognized header; expected " + join(expected));
    }
    std::vector<KernelRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto line_no = i + 1;
        const auto f = split_csv_line(lines[i], source, line_no);
        if (f.size() != expected.size()) {
            throw ParseError(source, line_no, "expected 4 fields, found " + std::to_string(f.size()));
        }
        KernelRecord k;
        k.name = f[0];
        k.duration_ns = parse_field<double>(f[1], source, line_no, expected[1]);
        k.sm_util = parse_field<double>(f[2], source, line_no, expected[2]);
        k.dram_util = parse_field<double>(f[3], source, line_no, expected[3]);
        out.push_back(std::move(k));
    }
    return out;
}

std::vector<KernelRecord> read_kernel_csv(const std::filesystem::path& path) {
    return parse_kernel_csv(read_text_file(path), path.string());
}

void write_kernel_csv(std::ostream& out, std::span<const KernelRecord> kernels) {
    out << "kernel_name,duration_ns,sm_util_pct,dram_util_pct\n";
    for (const auto& k : kernels) {
        std::string name = k.name;
        if (name.find_first_of(",\"") != std::string::npos) {
            std::string quoted = "\"";
            for (const char ch : name) {
                quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            }
            name = quoted + "\"";
        }
        out << name << ',' << format_double(k.duration_ns) << ',' << format_double(k.sm_util) << ','
            << format_double(k.dram_util) << '\n';
    }
}

std::filesystem::path meta_path_for(const std::filesystem::path& trace_path) {
    auto p = trace_path;
    p.replace_extension(".meta.json");
    return p;
}

TraceMeta parse_meta(std::string_view text, const std::string& source) {
    const auto j = parse_json(text, source);
    try {
        TraceMeta meta;
        meta.device_tdp_w = j.at("device_tdp_w").get<double>();
        meta.workload = j.at("workload").get<std::string>();
        meta.config = j.value("config", std::string());
        if (j.contains("freq_cap_mhz") && !j.at("freq_cap_mhz").is_null()) {
            meta.freq_cap_mhz = j.at("freq_cap_mhz").get<double>();
        }
        if (!(meta.device_tdp_w > 0.0)) {
            throw Error(ErrorCode::ParseError, source + ": device_tdp_w must be positive");
        }
        return meta;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, source + ": " + e.what());
    }
}

TraceMeta read_meta(const std::filesystem::path& path) { return parse_meta(read_text_file(path), path.string()); }

std::string meta_to_string(const TraceMeta& meta) {
    Json j{{"device_tdp_w", meta.device_tdp_w},
           {"workload", meta.workload},
           {"config", meta.config},
           {"freq_cap_mhz", meta.freq_cap_mhz ? Json(*meta.freq_cap_mhz) : Json(nullptr)}};
    return dump_json(j);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error(ErrorCode::IoError, "failed writing " + path.string());
    }
}

}  // namespace minos
