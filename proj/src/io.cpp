#include "fwave/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>

#include <nlohmann/json.hpp>

namespace fwave {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string location(const std::string& path, std::size_t line) {
    return path + ":" + std::to_string(line) + ": ";
}

// Reserved CSV characters are rejected on write so that reads never need
// quoting rules.
void check_csv_text(const std::string& value, const std::string& what) {
    if (value.find_first_of(",\r\n\"") != std::string::npos)
        throw Error(ErrorCode::BadParams, what + " contains a reserved CSV character: '" + value + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path);
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
}

// Lines without their terminators; a trailing \r (CRLF input) is stripped.
std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = end + 1;
    }
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

void check_field_count(const std::vector<std::string>& fields, std::size_t expected,
                       const std::string& path, std::size_t line) {
    if (fields.size() != expected)
        throw Error(ErrorCode::ParseError, location(path, line) + "expected " +
                                               std::to_string(expected) + " fields, got " +
                                               std::to_string(fields.size()));
}

ordered_json load_json(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
}

const ordered_json& require_field(const ordered_json& j, const char* key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end())
        throw Error(ErrorCode::ParseError, path + ": missing field '" + key + "'");
    return *it;
}

std::string require_string(const ordered_json& j, const char* key, const std::string& path) {
    const ordered_json& v = require_field(j, key, path);
    if (!v.is_string())
        throw Error(ErrorCode::ParseError, path + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

double require_number(const ordered_json& j, const char* key, const std::string& path) {
    const ordered_json& v = require_field(j, key, path);
    if (!v.is_number())
        throw Error(ErrorCode::ParseError, path + ": field '" + key + "' must be a number");
    return v.get<double>();
}

const std::string& signal_header() {
    static const std::string header = "sample_index,amplitude_mv";
    return header;
}

std::string feature_header() {
    std::string header = "patient_id";
    for (const char* name : SpectralFeatures::names()) {
        header += ',';
        header += name;
    }
    header += ",n_segments,outcome,status";
    return header;
}

const std::string& clinical_header() {
    static const std::string header = "patient_id,sex,age_years,af_duration,bmi,la_diameter_mm";
    return header;
}

void check_header(const std::string& got, const std::string& expected, const std::string& path) {
    if (got != expected)
        throw Error(ErrorCode::ParseError,
                    location(path, 1) + "expected header '" + expected + "', got '" + got + "'");
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::optional<double> parse_optional(const std::string& text, const std::string& what) {
    if (text.empty()) return std::nullopt;
    return parse_double(text, what);
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& text, const std::string& what) {
    double v = 0.0;
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(text.data(), last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw Error(ErrorCode::ParseError, what + ": bad number '" + text + "'");
    return v;
}

std::string sidecar_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    p.replace_extension(".json");
    return p.string();
}

void save_signal(const EcgRecord& record, const std::string& csv_path) {
    check_csv_text(record.patient_id, "patient id");
    check_csv_text(record.lead, "lead");

    std::string csv = signal_header();
    csv += '\n';
    for (std::size_t i = 0; i < record.samples.size(); ++i) {
        csv += std::to_string(i);
        csv += ',';
        csv += format_double(record.samples[i]);
        csv += '\n';
    }
    write_file(csv_path, csv);

    ordered_json meta;
    meta["patient_id"] = record.patient_id;
    meta["lead"] = record.lead;
    meta["sampling_rate_hz"] = record.sampling_rate;
    meta["stage"] = stage_name(record.stage);
    write_file(sidecar_path(csv_path), meta.dump(2) + "\n");
}

EcgRecord load_signal(const std::string& csv_path) {
    const std::string meta_path = sidecar_path(csv_path);
    const ordered_json meta = load_json(meta_path);

    EcgRecord record;
    record.patient_id = require_string(meta, "patient_id", meta_path);
    record.lead = require_string(meta, "lead", meta_path);
    record.sampling_rate = require_number(meta, "sampling_rate_hz", meta_path);
    const std::string stage = require_string(meta, "stage", meta_path);
    try {
        record.stage = stage_from_name(stage);
    } catch (const Error&) {
        throw Error(ErrorCode::ParseError, meta_path + ": unknown stage '" + stage + "'");
    }

    const std::vector<std::string> lines = split_lines(read_file(csv_path));
    if (lines.empty())
        throw Error(ErrorCode::ParseError, location(csv_path, 1) + "empty file");
    check_header(lines[0], signal_header(), csv_path);

    record.samples.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_fields(lines[i]);
        check_field_count(fields, 2, csv_path, i + 1);
        const std::string& loc = csv_path;
        const double index = parse_double(fields[0], location(loc, i + 1) + "sample_index");
        if (index != static_cast<double>(i - 1))
            throw Error(ErrorCode::ParseError, location(loc, i + 1) + "expected sample_index " +
                                                   std::to_string(i - 1) + ", got '" + fields[0] + "'");
        record.samples.push_back(parse_double(fields[1], location(loc, i + 1) + "amplitude_mv"));
    }
    return record;
}

void save_feature_table(const std::vector<FeatureRow>& rows, const std::string& csv_path) {
    const auto& names = SpectralFeatures::names();

    std::string csv = feature_header();
    csv += '\n';
    ordered_json mirror;
    mirror["patients"] = ordered_json::array();
    for (const FeatureRow& row : rows) {
        check_csv_text(row.patient.patient_id, "patient id");
        const auto values = row.patient.features.as_array();

        csv += row.patient.patient_id;
        for (double v : values) {
            csv += ',';
            csv += row.failed ? "nan" : format_double(v);
        }
        csv += ',';
        csv += std::to_string(row.failed ? 0 : row.patient.n_segments);
        csv += ',';
        csv += outcome_name(row.patient.outcome);
        csv += ',';
        csv += row.failed ? "failed" : "ok";
        csv += '\n';

        ordered_json entry;
        entry["patient_id"] = row.patient.patient_id;
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (row.failed)
                entry[names[k]] = nullptr;
            else
                entry[names[k]] = values[k];
        }
        entry["n_segments"] = row.failed ? 0 : row.patient.n_segments;
        entry["outcome"] = outcome_name(row.patient.outcome);
        entry["status"] = row.failed ? "failed" : "ok";
        mirror["patients"].push_back(std::move(entry));
    }
    write_file(csv_path, csv);
    write_file(sidecar_path(csv_path), mirror.dump(2) + "\n");
}

std::vector<FeatureRow> load_feature_table(const std::string& csv_path) {
    const std::vector<std::string> lines = split_lines(read_file(csv_path));
    if (lines.empty())
        throw Error(ErrorCode::ParseError, location(csv_path, 1) + "empty file");
    check_header(lines[0], feature_header(), csv_path);

    constexpr std::size_t n_fields = 1 + SpectralFeatures::count + 3;
    std::vector<FeatureRow> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_fields(lines[i]);
        check_field_count(fields, n_fields, csv_path, i + 1);
        const std::string loc = location(csv_path, i + 1);

        FeatureRow row;
        row.patient.patient_id = fields[0];
        std::array<double, SpectralFeatures::count> values{};
        for (std::size_t k = 0; k < SpectralFeatures::count; ++k)
            values[k] = parse_double(fields[1 + k], loc + SpectralFeatures::names()[k]);
        row.patient.features = SpectralFeatures::from_array(values);

        const double n_segments = parse_double(fields[1 + SpectralFeatures::count], loc + "n_segments");
        if (n_segments < 0 || n_segments != std::floor(n_segments))
            throw Error(ErrorCode::ParseError, loc + "n_segments must be a non-negative integer");
        row.patient.n_segments = static_cast<int>(n_segments);

        const std::string& outcome = fields[2 + SpectralFeatures::count];
        try {
            row.patient.outcome = outcome_from_name(outcome);
        } catch (const Error&) {
            throw Error(ErrorCode::ParseError, loc + "unknown outcome '" + outcome + "'");
        }

        const std::string& status = fields[3 + SpectralFeatures::count];
        if (status == "failed")
            row.failed = true;
        else if (status != "ok")
            throw Error(ErrorCode::ParseError, loc + "unknown status '" + status + "'");
        rows.push_back(std::move(row));
    }
    return rows;
}

void save_clinical_table(const std::vector<ClinicalRecord>& rows, const std::string& csv_path) {
    std::string csv = clinical_header();
    csv += '\n';
    for (const ClinicalRecord& row : rows) {
        check_csv_text(row.patient_id, "patient id");
        csv += row.patient_id;
        csv += ',';
        csv += row.sex == Sex::unknown ? "" : sex_name(row.sex);
        csv += ',';
        csv += format_optional(row.age_years);
        csv += ',';
        csv += row.af_duration == AfDurationClass::unknown ? "" : af_duration_name(row.af_duration);
        csv += ',';
        csv += format_optional(row.bmi);
        csv += ',';
        csv += format_optional(row.la_diameter);
        csv += '\n';
    }
    write_file(csv_path, csv);
}

std::vector<ClinicalRecord> load_clinical_table(const std::string& csv_path) {
    const std::vector<std::string> lines = split_lines(read_file(csv_path));
    if (lines.empty())
        throw Error(ErrorCode::ParseError, location(csv_path, 1) + "empty file");
    check_header(lines[0], clinical_header(), csv_path);

    std::vector<ClinicalRecord> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_fields(lines[i]);
        check_field_count(fields, 6, csv_path, i + 1);
        const std::string loc = location(csv_path, i + 1);

        ClinicalRecord row;
        row.patient_id = fields[0];
        try {
            row.sex = sex_from_name(fields[1]);
            row.af_duration = af_duration_from_name(fields[3]);
        } catch (const Error& e) {
            throw Error(ErrorCode::ParseError, loc + e.what());
        }
        row.age_years = parse_optional(fields[2], loc + "age_years");
        row.bmi = parse_optional(fields[4], loc + "bmi");
        row.la_diameter = parse_optional(fields[5], loc + "la_diameter_mm");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace fwave
