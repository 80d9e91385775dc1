#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fwave/cohort.hpp"
#include "fwave/core.hpp"
#include "fwave/io.hpp"
#include "fwave/learn.hpp"
#include "fwave/parallel.hpp"
#include "fwave/preprocess.hpp"
#include "fwave/spectral.hpp"
#include "fwave/stats.hpp"
#include "fwave/synth.hpp"
#include "fwave/ventricular.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace fwave;

namespace {

// ---------------------------------------------------------------------------
// logging: stderr verbosity from FWAVE_LOG, plus a deterministic run log file
// (no timestamps, so identical runs produce identical logs).

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel g_stderr_level = LogLevel::info;

const char* level_tag(LogLevel lv) {
    switch (lv) {
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warning";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "info";
}

void init_stderr_level() {
    const char* env = std::getenv("FWAVE_LOG");
    if (!env) return;
    const std::string value(env);
    if (value == "error") g_stderr_level = LogLevel::error;
    else if (value == "warn") g_stderr_level = LogLevel::warn;
    else if (value == "info") g_stderr_level = LogLevel::info;
    else if (value == "debug") g_stderr_level = LogLevel::debug;
    else
        std::cerr << "fwave: warning: unknown FWAVE_LOG level '" << value
                  << "' (use error|warn|info|debug)\n";
}

struct RunLog {
    std::vector<std::string> lines;

    void add(LogLevel lv, const std::string& msg) {
        lines.push_back(std::string(level_tag(lv)) + ": " + msg);
        if (lv <= g_stderr_level) std::cerr << "fwave: " << level_tag(lv) << ": " << msg << "\n";
    }
    void info(const std::string& msg) { add(LogLevel::info, msg); }
    void warn(const std::string& msg) { add(LogLevel::warn, msg); }
    void debug(const std::string& msg) { add(LogLevel::debug, msg); }

    void write(const fs::path& out_dir) const {
        std::ofstream out(out_dir / "run_log.txt", std::ios::binary | std::ios::trunc);
        for (const auto& line : lines) out << line << '\n';
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + (out_dir / "run_log.txt").string());
    }
};

// ---------------------------------------------------------------------------
// shared plumbing

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::IoError:
        case ErrorCode::ParseError:
        case ErrorCode::BadParams:
            return 2;  // input or format problem
        default:
            return 3;  // the data failed validation or is degenerate
    }
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + out);
    return dir;
}

double mean_of(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc / static_cast<double>(x.size());
}

double sd_of(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

// Exact decimal label for a tenth-of-a-hertz grid position.
std::string deci_string(long long tenths) {
    const bool neg = tenths < 0;
    const long long mag = neg ? -tenths : tenths;
    std::string s = neg ? "-" : "";
    s += std::to_string(mag / 10);
    if (mag % 10 != 0) {
        s += '.';
        s += static_cast<char>('0' + mag % 10);
    }
    return s;
}

// ---------------------------------------------------------------------------
// option logging: every option's resolved value with where it came from
// (command line beats config file beats built-in default).

bool token_mentions(const std::vector<std::string>& tokens, const CLI::Option* opt) {
    for (const std::string& lname : opt->get_lnames()) {
        const std::string flag = "--" + lname;
        for (const std::string& t : tokens)
            if (t == flag || t.rfind(flag + "=", 0) == 0) return true;
    }
    for (const std::string& sname : opt->get_snames()) {
        const std::string flag = "-" + sname;
        for (const std::string& t : tokens)
            if (t.rfind(flag, 0) == 0 && t.size() >= flag.size()) return true;
    }
    return false;
}

void log_options(const CLI::App& sub, const std::vector<std::string>& tokens, RunLog& log) {
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_name();
        if (name == "--help" || name == "--config" || opt->get_positional()) continue;
        std::string value;
        if (opt->count() > 0) {
            const auto& results = opt->results();
            for (std::size_t i = 0; i < results.size(); ++i)
                value += (i ? " " : "") + results[i];
        } else {
            value = opt->get_default_str();
            if (value.empty()) value = opt->get_expected_min() == 0 ? "false" : "''";
        }
        const std::string source = opt->count() == 0          ? "default"
                                   : token_mentions(tokens, opt) ? "command line"
                                                                 : "config file";
        log.info("option " + name + " = " + value + " (" + source + ")");
    }
}

void log_inputs(const std::vector<std::string>& inputs, RunLog& log) {
    std::string joined;
    for (std::size_t i = 0; i < inputs.size(); ++i) joined += (i ? " " : "") + inputs[i];
    log.info("inputs: " + joined);
}

// ---------------------------------------------------------------------------
// preprocessing flags shared by the signal-processing subcommands

struct PreprocessArgs {
    double baseline_cutoff = 0.8;
    double mains_freq = 50.0;
    double lowpass_cutoff = 70.0;
    int notch_harmonics = 0;
    std::string mains_removal = "swt";
};

void add_preprocess_flags(CLI::App* sub, PreprocessArgs& args) {
    sub->add_option("--baseline-cutoff", args.baseline_cutoff,
                    "Drift estimator cutoff in Hz")->capture_default_str();
    sub->add_option("--mains-freq", args.mains_freq,
                    "Powerline fundamental in Hz")->capture_default_str();
    sub->add_option("--lowpass-cutoff", args.lowpass_cutoff,
                    "Low-pass cutoff in Hz")->capture_default_str();
    sub->add_option("--notch-harmonics", args.notch_harmonics,
                    "Powerline tones to suppress including the fundamental; 0 means "
                    "every harmonic below the low-pass cutoff")->capture_default_str();
    sub->add_option("--mains-removal", args.mains_removal,
                    "Powerline suppression method")
        ->check(CLI::IsMember({"swt", "notch"}))
        ->capture_default_str();
}

PreprocessConfig make_preprocess_config(const PreprocessArgs& args) {
    PreprocessConfig cfg;
    cfg.baseline_cutoff = args.baseline_cutoff;
    cfg.mains_freq = args.mains_freq;
    cfg.lowpass_cutoff = args.lowpass_cutoff;
    cfg.notch_harmonics = args.notch_harmonics;
    cfg.mains_removal = args.mains_removal == "notch" ? MainsRemoval::notch : MainsRemoval::swt;
    return cfg;
}

void log_filter_chain(const PreprocessConfig& cfg, RunLog& log) {
    log.info("baseline removal: zero-phase high-pass, cutoff " +
             format_double(cfg.baseline_cutoff) + " Hz");
    std::string tones;
    for (double f : mains_tones(cfg)) tones += (tones.empty() ? "" : " ") + format_double(f);
    log.info(std::string("powerline removal: ") +
             (cfg.mains_removal == MainsRemoval::swt ? "wavelet detail thresholding"
                                                     : "zero-phase notch cascade") +
             ", tones " + tones + " Hz");
    log.info("low-pass: zero-phase Butterworth, cutoff " + format_double(cfg.lowpass_cutoff) +
             " Hz");
}

void warn_if_too_short(const EcgRecord& record, const std::string& name, RunLog& log) {
    if (record.samples.size() < segment_length(record.sampling_rate))
        log.warn(name + ": record is " + format_double(record.duration_s()) +
                 " s, too short for feature extraction (needs 6 s)");
}

// Unique per-input output stem; duplicate stems would silently overwrite.
std::vector<std::string> output_stems(const std::vector<std::string>& inputs) {
    std::vector<std::string> stems;
    std::set<std::string> seen;
    for (const std::string& input : inputs) {
        const std::string stem = fs::path(input).stem().string();
        if (!seen.insert(stem).second)
            throw Error(ErrorCode::BadParams, "duplicate input file stem '" + stem + "'");
        stems.push_back(stem);
    }
    return stems;
}

// ---------------------------------------------------------------------------
// preprocess

struct CmdPreprocess {
    std::vector<std::string> inputs;
    std::string out;
    PreprocessArgs pp;
    int jobs = 1;
};

void run_preprocess(const CmdPreprocess& args, const CLI::App& sub,
                    const std::vector<std::string>& tokens) {
    RunLog log;
    log.info("command: preprocess");
    log_options(sub, tokens, log);
    log_inputs(args.inputs, log);
    const fs::path out_dir = ensure_out_dir(args.out);
    const PreprocessConfig cfg = make_preprocess_config(args.pp);
    log_filter_chain(cfg, log);
    log.info("jobs: " + std::to_string(args.jobs));

    const auto stems = output_stems(args.inputs);
    std::vector<EcgRecord> results(args.inputs.size());
    std::vector<std::vector<std::string>> notes(args.inputs.size());
    parallel_for(args.inputs.size(), args.jobs, [&](std::size_t i) {
        const EcgRecord record = load_signal(args.inputs[i]);
        if (record.stage != Stage::raw)
            notes[i].push_back("input stage is '" + std::string(stage_name(record.stage)) +
                               "', processing anyway");
        results[i] = preprocess(record, cfg);
    });

    for (std::size_t i = 0; i < results.size(); ++i) {
        for (const auto& note : notes[i]) log.warn(args.inputs[i] + ": " + note);
        const fs::path out_path = out_dir / (stems[i] + "_preprocessed.csv");
        save_signal(results[i], out_path.string());
        log.info(args.inputs[i] + " -> " + out_path.string() + " (" +
                 format_double(results[i].duration_s()) + " s, " +
                 std::to_string(results[i].samples.size()) + " samples)");
        warn_if_too_short(results[i], args.inputs[i], log);
    }
    log.write(out_dir);
}

// ---------------------------------------------------------------------------
// extract-fwaves

struct CmdExtract {
    std::vector<std::string> inputs;
    std::string out;
    PreprocessArgs pp;
    int jobs = 1;
};

void run_extract(const CmdExtract& args, const CLI::App& sub,
                 const std::vector<std::string>& tokens) {
    RunLog log;
    log.info("command: extract-fwaves");
    log_options(sub, tokens, log);
    log_inputs(args.inputs, log);
    const fs::path out_dir = ensure_out_dir(args.out);
    const PreprocessConfig cfg = make_preprocess_config(args.pp);
    log.info("jobs: " + std::to_string(args.jobs));

    const auto stems = output_stems(args.inputs);
    std::vector<EcgRecord> results(args.inputs.size());
    std::vector<std::vector<std::string>> notes(args.inputs.size());
    parallel_for(args.inputs.size(), args.jobs, [&](std::size_t i) {
        EcgRecord record = load_signal(args.inputs[i]);
        if (record.stage == Stage::raw) {
            record = preprocess(record, cfg);
            notes[i].push_back("raw input, preprocessing first");
        }
        if (record.stage == Stage::fwave) {
            notes[i].push_back("input already at the f-wave stage, copying unchanged");
            results[i] = record;
            return;
        }
        try {
            notes[i].push_back("beats detected: " +
                               std::to_string(detect_r_peaks(record).size()));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoBeatsFound) throw;
            notes[i].push_back("beats detected: none, passing the record through");
        }
        results[i] = extract_fwaves(record);
    });

    for (std::size_t i = 0; i < results.size(); ++i) {
        for (const auto& note : notes[i]) log.info(args.inputs[i] + ": " + note);
        const fs::path out_path = out_dir / (stems[i] + "_fwave.csv");
        save_signal(results[i], out_path.string());
        log.info(args.inputs[i] + " -> " + out_path.string());
        warn_if_too_short(results[i], args.inputs[i], log);
    }
    log.write(out_dir);
}

// ---------------------------------------------------------------------------
// features

struct CmdFeatures {
    std::vector<std::string> inputs;
    std::string out;
    std::string labels;
    PreprocessArgs pp;
    bool psd = true;
    int jobs = 1;
};

std::map<std::string, Outcome> load_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::map<std::string, Outcome> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (line != "patient_id,outcome")
                throw Error(ErrorCode::ParseError,
                            path + ":1: expected header 'patient_id,outcome', got '" + line + "'");
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw Error(ErrorCode::ParseError,
                        path + ":" + std::to_string(line_no) + ": expected 2 fields");
        const std::string id = line.substr(0, comma);
        const std::string outcome = line.substr(comma + 1);
        Outcome parsed = Outcome::unknown;
        try {
            parsed = outcome_from_name(outcome);
        } catch (const Error&) {
            throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) +
                                                   ": unknown outcome '" + outcome + "'");
        }
        if (!labels.emplace(id, parsed).second)
            throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) +
                                                   ": duplicate patient id '" + id + "'");
    }
    return labels;
}

std::optional<Outcome> truth_outcome(const std::string& input_csv) {
    fs::path truth(input_csv);
    truth.replace_filename(truth.stem().string() + "_truth.json");
    if (!fs::exists(truth)) return std::nullopt;
    std::ifstream in(truth, std::ios::binary);
    if (!in) return std::nullopt;
    try {
        const auto j = ordered_json::parse(in);
        return outcome_from_name(j.at("outcome").get<std::string>());
    } catch (...) {
        return std::nullopt;
    }
}

struct PatientWork {
    FeatureRow row;
    PowerSpectrum psd;  // mean over segments, empty when failed
    std::string outcome_source;
    std::optional<std::pair<ErrorCode, std::string>> error;
};

void run_features(const CmdFeatures& args, const CLI::App& sub,
                  const std::vector<std::string>& tokens) {
    RunLog log;
    log.info("command: features");
    log_options(sub, tokens, log);
    log_inputs(args.inputs, log);
    const fs::path out_dir = ensure_out_dir(args.out);
    const PreprocessConfig cfg = make_preprocess_config(args.pp);
    log_filter_chain(cfg, log);
    log.info("jobs: " + std::to_string(args.jobs));

    std::map<std::string, Outcome> labels;
    if (!args.labels.empty()) {
        labels = load_labels(args.labels);
        log.info("labels: " + std::to_string(labels.size()) + " entries from " + args.labels);
    }

    std::vector<PatientWork> work(args.inputs.size());
    parallel_for(args.inputs.size(), args.jobs, [&](std::size_t i) {
        PatientWork& w = work[i];
        w.row.patient.patient_id = fs::path(args.inputs[i]).stem().string();
        try {
            EcgRecord record = load_signal(args.inputs[i]);
            w.row.patient.patient_id = record.patient_id;

            if (const auto it = labels.find(record.patient_id); it != labels.end()) {
                w.row.patient.outcome = it->second;
                w.outcome_source = "labels file";
            } else if (const auto truth = truth_outcome(args.inputs[i])) {
                w.row.patient.outcome = *truth;
                w.outcome_source = "truth sidecar";
            } else {
                w.outcome_source = "not provided";
            }

            if (record.stage == Stage::raw) record = preprocess(record, cfg);
            if (record.stage == Stage::preprocessed) record = extract_fwaves(record);

            const auto segments = segment_signal(record);
            std::vector<SpectralFeatures> features;
            features.reserve(segments.size());
            for (const auto& seg : segments) {
                features.push_back(extract_features(seg, WelchConfig{}));
                const PowerSpectrum psd = welch_psd(seg, WelchConfig{});
                if (w.psd.values.empty()) {
                    w.psd = psd;
                } else {
                    for (std::size_t k = 0; k < w.psd.values.size(); ++k)
                        w.psd.values[k] += psd.values[k];
                }
            }
            for (double& v : w.psd.values) v /= static_cast<double>(segments.size());

            const Outcome outcome = w.row.patient.outcome;
            w.row.patient = aggregate_patient(features, record.patient_id, outcome);
        } catch (const Error& e) {
            w.row.failed = true;
            w.error = {e.code(), e.what()};
        } catch (const std::exception& e) {
            w.row.failed = true;
            w.error = {ErrorCode::BadParams, std::string("internal error: ") + e.what()};
        }
    });

    std::vector<FeatureRow> rows;
    rows.reserve(work.size());
    std::set<std::string> seen_ids;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < work.size(); ++i) {
        const PatientWork& w = work[i];
        if (w.row.failed) {
            ++failures;
            log.warn(w.row.patient.patient_id + " failed: " + w.error->second);
        } else {
            log.info(w.row.patient.patient_id + ": " + std::to_string(w.row.patient.n_segments) +
                     " segments, outcome " + outcome_name(w.row.patient.outcome) + " (" +
                     w.outcome_source + ")");
        }
        if (!seen_ids.insert(w.row.patient.patient_id).second)
            log.warn("duplicate patient id '" + w.row.patient.patient_id + "'");
        rows.push_back(w.row);
    }

    save_feature_table(rows, (out_dir / "features.csv").string());
    log.info("feature table: " + (out_dir / "features.csv").string() + " (" +
             std::to_string(rows.size()) + " rows, " + std::to_string(failures) + " failed)");

    if (args.psd) {
        const fs::path psd_dir = out_dir / "psd";
        std::error_code ec;
        fs::create_directories(psd_dir, ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create " + psd_dir.string());

        for (const PatientWork& w : work) {
            if (w.row.failed) continue;
            const bool deci_grid = w.psd.f_start == 0.0 && w.psd.f_step == 0.1;
            std::string csv = "frequency_hz,psd_mv2_per_hz\n";
            const std::size_t last = std::min<std::size_t>(w.psd.values.size(), 301);
            for (std::size_t k = 0; k < last; ++k) {
                csv += deci_grid ? deci_string(static_cast<long long>(k))
                                 : format_double(w.psd.frequency_of(k));
                csv += ',';
                csv += format_double(w.psd.values[k]);
                csv += '\n';
            }
            write_text(psd_dir / (w.row.patient.patient_id + "_psd.csv"), csv);
        }

        // group-average spectra aligned on each patient's dominant frequency
        for (const Outcome group : {Outcome::sr, Outcome::af}) {
            std::vector<const PatientWork*> members;
            for (const PatientWork& w : work)
                if (!w.row.failed && w.row.patient.outcome == group && w.psd.f_start == 0.0 &&
                    w.psd.f_step == 0.1 && !w.psd.values.empty())
                    members.push_back(&w);
            if (members.empty()) continue;

            std::string csv = "offset_hz,psd_mv2_per_hz,n_patients\n";
            for (long long tenths = -80; tenths <= 180; ++tenths) {
                double acc = 0.0;
                std::size_t count = 0;
                for (const PatientWork* w : members) {
                    const long long df_bin =
                        static_cast<long long>(w->psd.index_of(w->row.patient.features.f0));
                    const long long bin = df_bin + tenths;
                    if (bin < 0 || bin >= static_cast<long long>(w->psd.values.size())) continue;
                    acc += w->psd.values[static_cast<std::size_t>(bin)];
                    ++count;
                }
                if (count == 0) continue;
                csv += deci_string(tenths);
                csv += ',';
                csv += format_double(acc / static_cast<double>(count));
                csv += ',';
                csv += std::to_string(count);
                csv += '\n';
            }
            const std::string name = group == Outcome::sr ? "sr" : "af";
            write_text(psd_dir / (name + "_df_aligned.csv"), csv);
            log.info("group spectrum: " + (psd_dir / (name + "_df_aligned.csv")).string() + " (" +
                     std::to_string(members.size()) + " patients)");
        }
    }

    log.write(out_dir);
    if (failures == work.size() && !work.empty()) {
        const auto& first = *work.front().error;
        throw Error(first.first, "all " + std::to_string(work.size()) +
                                     " patients failed; first: " + first.second);
    }
}

// ---------------------------------------------------------------------------
// stats

struct CmdStats {
    std::string features_path;
    std::string clinical_path;
    std::string out;
    int jobs = 1;
};

Cohort cohort_from_rows(const std::vector<FeatureRow>& rows, RunLog& log) {
    Cohort cohort;
    for (const FeatureRow& row : rows) {
        if (row.failed) {
            log.warn("skipping failed patient " + row.patient.patient_id);
            continue;
        }
        for (double v : row.patient.features.as_array())
            if (!std::isfinite(v))
                throw Error(ErrorCode::NonFiniteSample,
                            "patient " + row.patient.patient_id + " has a non-finite feature");
        CohortEntry entry;
        entry.features = row.patient;
        cohort.patients.push_back(std::move(entry));
    }
    if (cohort.patients.empty())
        throw Error(ErrorCode::EmptyList, "feature table has no usable rows");
    validate_cohort(cohort);
    return cohort;
}

struct ClinicalRow {
    std::string variable;
    std::string kind;  // continuous | categorical
    std::optional<long long> count_sr, count_af;
    std::optional<double> mean_sr, sd_sr, mean_af, sd_af;
    std::optional<std::string> test;
    std::optional<double> p_value;
};

ClinicalRow continuous_row(const std::string& name, const std::vector<double>& sr,
                           const std::vector<double>& af, RunLog& log) {
    ClinicalRow row;
    row.variable = name;
    row.kind = "continuous";
    row.count_sr = static_cast<long long>(sr.size());
    row.count_af = static_cast<long long>(af.size());
    if (!sr.empty()) {
        row.mean_sr = mean_of(sr);
        row.sd_sr = sd_of(sr);
    }
    if (!af.empty()) {
        row.mean_af = mean_of(af);
        row.sd_af = sd_of(af);
    }
    if (sr.size() < 2 || af.size() < 2) {
        log.warn(name + ": not enough values in both groups for a test");
        return row;
    }
    if (sr.size() < 4 || af.size() < 4) {
        // too small for the normality check, fall straight back to the rank test
        row.test = group_test_name(GroupTest::mann_whitney);
        row.p_value = mann_whitney(sr, af);
        return row;
    }
    const auto [test, p] = gated_test(sr, af);
    row.test = group_test_name(test);
    row.p_value = p;
    return row;
}

ClinicalRow categorical_row(const std::string& name, long long sr_in, long long sr_out,
                            long long af_in, long long af_out) {
    ClinicalRow row;
    row.variable = name;
    row.kind = "categorical";
    row.count_sr = sr_in;
    row.count_af = af_in;
    row.test = "fisher";
    row.p_value = fisher_exact({{{sr_in, sr_out}, {af_in, af_out}}});
    return row;
}

void run_stats(const CmdStats& args, const CLI::App& sub, const std::vector<std::string>& tokens) {
    RunLog log;
    log.info("command: stats");
    log_options(sub, tokens, log);
    const fs::path out_dir = ensure_out_dir(args.out);
    log.info("jobs: " + std::to_string(args.jobs));

    const auto rows = load_feature_table(args.features_path);
    const Cohort cohort = cohort_from_rows(rows, log);

    std::size_t n_sr = 0, n_af = 0;
    for (const auto& entry : cohort.patients)
        (entry.features.outcome == Outcome::sr ? n_sr : n_af) += 1;
    log.info("cohort: " + std::to_string(n_sr) + " SR, " + std::to_string(n_af) + " AF");

    const auto comparisons = compare_all_features(cohort, args.jobs);

    std::string csv = "feature,mean_sr,sd_sr,mean_af,sd_af,test,p_value\n";
    for (const GroupComparison& cmp : comparisons) {
        csv += cmp.feature_name;
        csv += ',' + format_double(cmp.mean_sr) + ',' + format_double(cmp.sd_sr);
        csv += ',' + format_double(cmp.mean_af) + ',' + format_double(cmp.sd_af);
        csv += ',';
        csv += group_test_name(cmp.test_used);
        csv += ',' + format_double(cmp.p_value);
        csv += '\n';
    }
    write_text(out_dir / "comparison.csv", csv);

    ordered_json mirror;
    mirror["n_sr"] = n_sr;
    mirror["n_af"] = n_af;
    mirror["features"] = ordered_json::array();
    for (const GroupComparison& cmp : comparisons) {
        ordered_json entry;
        entry["feature"] = cmp.feature_name;
        entry["mean_sr"] = cmp.mean_sr;
        entry["sd_sr"] = cmp.sd_sr;
        entry["mean_af"] = cmp.mean_af;
        entry["sd_af"] = cmp.sd_af;
        entry["test"] = group_test_name(cmp.test_used);
        entry["p_value"] = cmp.p_value;
        mirror["features"].push_back(std::move(entry));
    }

    if (!args.clinical_path.empty()) {
        const auto clinical = load_clinical_table(args.clinical_path);
        std::map<std::string, Outcome> outcome_of;
        for (const auto& entry : cohort.patients)
            outcome_of[entry.features.patient_id] = entry.features.outcome;

        std::vector<const ClinicalRecord*> matched;
        for (const ClinicalRecord& rec : clinical) {
            if (outcome_of.count(rec.patient_id)) {
                matched.push_back(&rec);
            } else {
                log.warn("clinical row for '" + rec.patient_id +
                         "' has no matching feature row, skipping");
            }
        }
        log.info("clinical: " + std::to_string(matched.size()) + " of " +
                 std::to_string(clinical.size()) + " rows matched");

        std::vector<ClinicalRow> table;
        const auto split = [&](auto getter) {
            std::pair<std::vector<double>, std::vector<double>> groups;
            for (const ClinicalRecord* rec : matched)
                if (const auto v = getter(*rec))
                    (outcome_of[rec->patient_id] == Outcome::sr ? groups.first : groups.second)
                        .push_back(*v);
            return groups;
        };
        {
            const auto [sr, af] = split([](const ClinicalRecord& r) { return r.age_years; });
            table.push_back(continuous_row("age_years", sr, af, log));
        }
        {
            const auto [sr, af] = split([](const ClinicalRecord& r) { return r.bmi; });
            table.push_back(continuous_row("bmi", sr, af, log));
        }
        {
            const auto [sr, af] = split([](const ClinicalRecord& r) { return r.la_diameter; });
            table.push_back(continuous_row("la_diameter_mm", sr, af, log));
        }

        long long male_sr = 0, male_af = 0, female_sr = 0, female_af = 0;
        for (const ClinicalRecord* rec : matched) {
            if (rec->sex == Sex::unknown) continue;
            const bool sr_group = outcome_of[rec->patient_id] == Outcome::sr;
            if (rec->sex == Sex::male)
                (sr_group ? male_sr : male_af) += 1;
            else
                (sr_group ? female_sr : female_af) += 1;
        }
        if (male_sr + male_af + female_sr + female_af > 0)
            table.push_back(categorical_row("sex=male", male_sr, female_sr, male_af, female_af));

        for (const AfDurationClass cls : {AfDurationClass::under_1y, AfDurationClass::from_1_to_3y,
                                          AfDurationClass::over_3y}) {
            long long sr_in = 0, sr_out = 0, af_in = 0, af_out = 0;
            for (const ClinicalRecord* rec : matched) {
                if (rec->af_duration == AfDurationClass::unknown) continue;
                const bool sr_group = outcome_of[rec->patient_id] == Outcome::sr;
                const bool in_class = rec->af_duration == cls;
                (sr_group ? (in_class ? sr_in : sr_out) : (in_class ? af_in : af_out)) += 1;
            }
            if (sr_in + sr_out + af_in + af_out > 0)
                table.push_back(categorical_row(std::string("af_duration=") + af_duration_name(cls),
                                                sr_in, sr_out, af_in, af_out));
        }

        std::string clin_csv =
            "variable,kind,count_sr,count_af,mean_sr,sd_sr,mean_af,sd_af,test,p_value\n";
        mirror["clinical"] = ordered_json::array();
        for (const ClinicalRow& row : table) {
            const auto opt_int = [](const std::optional<long long>& v) {
                return v ? std::to_string(*v) : std::string();
            };
            const auto opt_num = [](const std::optional<double>& v) {
                return v ? format_double(*v) : std::string();
            };
            clin_csv += row.variable + ',' + row.kind;
            clin_csv += ',' + opt_int(row.count_sr) + ',' + opt_int(row.count_af);
            clin_csv += ',' + opt_num(row.mean_sr) + ',' + opt_num(row.sd_sr);
            clin_csv += ',' + opt_num(row.mean_af) + ',' + opt_num(row.sd_af);
            clin_csv += ',' + row.test.value_or("") + ',' + opt_num(row.p_value);
            clin_csv += '\n';

            ordered_json entry;
            entry["variable"] = row.variable;
            entry["kind"] = row.kind;
            entry["count_sr"] = row.count_sr ? ordered_json(*row.count_sr) : ordered_json(nullptr);
            entry["count_af"] = row.count_af ? ordered_json(*row.count_af) : ordered_json(nullptr);
            entry["mean_sr"] = row.mean_sr ? ordered_json(*row.mean_sr) : ordered_json(nullptr);
            entry["sd_sr"] = row.sd_sr ? ordered_json(*row.sd_sr) : ordered_json(nullptr);
            entry["mean_af"] = row.mean_af ? ordered_json(*row.mean_af) : ordered_json(nullptr);
            entry["sd_af"] = row.sd_af ? ordered_json(*row.sd_af) : ordered_json(nullptr);
            entry["test"] = row.test ? ordered_json(*row.test) : ordered_json(nullptr);
            entry["p_value"] = row.p_value ? ordered_json(*row.p_value) : ordered_json(nullptr);
            mirror["clinical"].push_back(std::move(entry));
        }
        write_text(out_dir / "clinical_comparison.csv", clin_csv);
    }

    write_text(out_dir / "comparison.json", mirror.dump(2) + "\n");
    log.info("reports: " + (out_dir / "comparison.csv").string() + ", " +
             (out_dir / "comparison.json").string());
    log.write(out_dir);
}

// ---------------------------------------------------------------------------
// evaluate

struct CmdEvaluate {
    std::string features_path;
    std::vector<std::string> models;
    std::string out;
    int folds = 10;
    int repeats = 100;
    std::uint64_t seed = 1;
    bool equal_priors = false;
    int jobs = 1;
};

std::vector<std::string> split_features(const std::string& spec) {
    std::vector<std::string> features;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t comma = spec.find(',', start);
        if (comma == std::string::npos) comma = spec.size();
        std::string item = spec.substr(start, comma - start);
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        if (item.empty())
            throw Error(ErrorCode::BadParams, "empty feature name in model '" + spec + "'");
        features.push_back(std::move(item));
        if (comma == spec.size()) break;
        start = comma + 1;
    }
    return features;
}

std::string join_plus(const std::vector<std::string>& parts) {
    std::string joined;
    for (std::size_t i = 0; i < parts.size(); ++i) joined += (i ? "+" : "") + parts[i];
    return joined;
}

void run_evaluate(const CmdEvaluate& args, const CLI::App& sub,
                  const std::vector<std::string>& tokens) {
    RunLog log;
    log.info("command: evaluate");
    log_options(sub, tokens, log);
    const fs::path out_dir = ensure_out_dir(args.out);
    log.info("jobs: " + std::to_string(args.jobs));

    const auto rows = load_feature_table(args.features_path);
    const Cohort cohort = cohort_from_rows(rows, log);
    std::size_t n_sr = 0, n_af = 0;
    for (const auto& entry : cohort.patients)
        (entry.features.outcome == Outcome::sr ? n_sr : n_af) += 1;
    log.info("cohort: " + std::to_string(n_sr) + " SR, " + std::to_string(n_af) + " AF");

    CvConfig cfg;
    cfg.n_folds = args.folds;
    cfg.n_repeats = args.repeats;
    cfg.equal_priors = args.equal_priors;
    cfg.rng_seed = args.seed;

    struct ModelRun {
        std::string id;
        std::string requested;
        std::vector<std::string> features;
        EvaluationReport report;
        std::optional<SelectionReport> selection;
    };
    std::vector<ModelRun> runs;

    for (std::size_t m = 0; m < args.models.size(); ++m) {
        ModelRun run;
        run.id = "m" + std::to_string(m);
        run.requested = args.models[m];
        if (args.models[m] == "auto") {
            const auto& names = SpectralFeatures::names();
            std::vector<std::string> candidates(names.begin(), names.end());
            run.selection = sequential_forward_selection(cohort, candidates, cfg, args.jobs);
            run.features = run.selection->best_set;
            log.info(run.id + ": forward selection chose " + join_plus(run.features));
        } else {
            run.features = split_features(args.models[m]);
        }
        run.report = repeated_cv(cohort, run.features, cfg, args.jobs);
        log.info(run.id + " (" + join_plus(run.features) +
                 "): auc " + format_double(run.report.auc) + ", se " +
                 format_double(100.0 * run.report.se) + "%, sp " +
                 format_double(100.0 * run.report.sp) + "%, acc " +
                 format_double(100.0 * run.report.acc) + "%");
        runs.push_back(std::move(run));
    }

    std::string summary = "model,requested,features,auc,se_pct,sp_pct,acc_pct,ppv_pct,npv_pct\n";
    for (const auto& run : runs) {
        std::string requested = run.requested;
        std::replace(requested.begin(), requested.end(), ',', '+');
        summary += run.id + ',' + requested + ',' + join_plus(run.features);
        summary += ',' + format_double(run.report.auc);
        summary += ',' + format_double(100.0 * run.report.se);
        summary += ',' + format_double(100.0 * run.report.sp);
        summary += ',' + format_double(100.0 * run.report.acc);
        summary += ',' + format_double(100.0 * run.report.ppv);
        summary += ',' + format_double(100.0 * run.report.npv);
        summary += '\n';
    }
    write_text(out_dir / "evaluation.csv", summary);

    ordered_json report_json;
    report_json["config"]["n_folds"] = cfg.n_folds;
    report_json["config"]["n_repeats"] = cfg.n_repeats;
    report_json["config"]["stratified"] = cfg.stratified;
    report_json["config"]["equal_priors"] = cfg.equal_priors;
    report_json["config"]["rng_seed"] = cfg.rng_seed;
    report_json["n_sr"] = n_sr;
    report_json["n_af"] = n_af;
    report_json["models"] = ordered_json::array();

    for (const auto& run : runs) {
        const EvaluationReport& rep = run.report;

        std::string runs_csv = "repeat,auc,se,sp,acc,ppv,npv,threshold\n";
        for (std::size_t r = 0; r < rep.auc_runs.size(); ++r) {
            runs_csv += std::to_string(r);
            runs_csv += ',' + format_double(rep.auc_runs[r]);
            runs_csv += ',' + format_double(rep.se_runs[r]);
            runs_csv += ',' + format_double(rep.sp_runs[r]);
            runs_csv += ',' + format_double(rep.acc_runs[r]);
            runs_csv += ',' + format_double(rep.ppv_runs[r]);
            runs_csv += ',' + format_double(rep.npv_runs[r]);
            runs_csv += ',' + format_double(rep.thresholds[r]);
            runs_csv += '\n';
        }
        write_text(out_dir / (run.id + "_runs.csv"), runs_csv);

        // one plot-ready curve over the pooled out-of-fold scores of all repeats
        std::vector<Outcome> tiled;
        tiled.reserve(rep.oof_scores.size());
        for (int r = 0; r < cfg.n_repeats; ++r)
            tiled.insert(tiled.end(), rep.oof_truth.begin(), rep.oof_truth.end());
        const RocCurve pooled = roc_curve(rep.oof_scores, tiled);
        std::string roc_csv = "threshold,se,sp\n";
        for (const RocPoint& pt : pooled.points) {
            roc_csv += format_double(pt.threshold);
            roc_csv += ',' + format_double(pt.se);
            roc_csv += ',' + format_double(pt.sp);
            roc_csv += '\n';
        }
        write_text(out_dir / (run.id + "_roc.csv"), roc_csv);

        if (run.selection) {
            std::string sel_csv = "feature,frequency\n";
            for (std::size_t k = 0; k < run.selection->candidates.size(); ++k) {
                sel_csv += run.selection->candidates[k];
                sel_csv += ',' + format_double(run.selection->frequency[k]);
                sel_csv += '\n';
            }
            write_text(out_dir / (run.id + "_selection.csv"), sel_csv);
        }

        ordered_json entry;
        entry["model"] = run.id;
        entry["requested"] = run.requested;
        entry["features"] = run.features;
        entry["auc"] = rep.auc;
        entry["se_pct"] = 100.0 * rep.se;
        entry["sp_pct"] = 100.0 * rep.sp;
        entry["acc_pct"] = 100.0 * rep.acc;
        entry["ppv_pct"] = 100.0 * rep.ppv;
        entry["npv_pct"] = 100.0 * rep.npv;
        entry["runs"]["auc"] = rep.auc_runs;
        entry["runs"]["se"] = rep.se_runs;
        entry["runs"]["sp"] = rep.sp_runs;
        entry["runs"]["acc"] = rep.acc_runs;
        entry["runs"]["ppv"] = rep.ppv_runs;
        entry["runs"]["npv"] = rep.npv_runs;
        entry["runs"]["threshold"] = rep.thresholds;
        entry["roc"] = ordered_json::array();
        for (const RocPoint& pt : pooled.points) {
            ordered_json point;
            point["threshold"] = pt.threshold;
            point["se"] = pt.se;
            point["sp"] = pt.sp;
            entry["roc"].push_back(std::move(point));
        }
        if (run.selection) {
            entry["selection"]["candidates"] = run.selection->candidates;
            entry["selection"]["frequency"] = run.selection->frequency;
            entry["selection"]["best_set"] = run.selection->best_set;
        }
        report_json["models"].push_back(std::move(entry));
    }

    if (runs.size() >= 2) {
        std::string mc_csv = "model_a,model_b,p_value\n";
        report_json["mcnemar"] = ordered_json::array();
        std::vector<Outcome> tiled;
        for (int r = 0; r < cfg.n_repeats; ++r)
            tiled.insert(tiled.end(), runs[0].report.oof_truth.begin(),
                         runs[0].report.oof_truth.end());
        for (std::size_t a = 0; a < runs.size(); ++a)
            for (std::size_t b = a + 1; b < runs.size(); ++b) {
                const double p = mcnemar(runs[a].report.oof_predictions,
                                         runs[b].report.oof_predictions, tiled);
                mc_csv += runs[a].id + ',' + runs[b].id + ',' + format_double(p) + '\n';
                ordered_json entry;
                entry["model_a"] = runs[a].id;
                entry["model_b"] = runs[b].id;
                entry["p_value"] = p;
                report_json["mcnemar"].push_back(std::move(entry));
                log.info("mcnemar " + runs[a].id + " vs " + runs[b].id + ": p = " +
                         format_double(p));
            }
        write_text(out_dir / "mcnemar.csv", mc_csv);
    }

    write_text(out_dir / "evaluation.json", report_json.dump(2) + "\n");
    log.info("reports: " + (out_dir / "evaluation.csv").string() + ", " +
             (out_dir / "evaluation.json").string());
    log.write(out_dir);
}

// ---------------------------------------------------------------------------
// synth

struct CmdSynth {
    CohortSpec spec;
    std::string out;
    int jobs = 1;
};

void run_synth(const CmdSynth& args, const CLI::App& sub, const std::vector<std::string>& tokens) {
    RunLog log;
    log.info("command: synth");
    log_options(sub, tokens, log);
    const fs::path out_dir = ensure_out_dir(args.out);
    log.info("jobs: " + std::to_string(args.jobs));

    const CohortSpec& spec = args.spec;
    const PatientDraw probe = draw_patient(spec, 0);  // validates the spec up front
    (void)probe;
    const auto total = static_cast<std::size_t>(spec.n_sr + spec.n_af);
    log.info("patients: " + std::to_string(spec.n_sr) + " SR + " + std::to_string(spec.n_af) +
             " AF, " + format_double(spec.duration_s) + " s at " + format_double(spec.fs) + " Hz");

    struct PatientOut {
        PatientDraw draw;
        EcgRecord raw;
        RPeakList r_peaks;
    };
    std::vector<PatientOut> patients(total);
    parallel_for(total, args.jobs, [&](std::size_t i) {
        PatientOut& p = patients[i];
        p.draw = draw_patient(spec, i);
        SynthEcg ecg = synth_ecg(p.draw.params, spec.heart_rate_bpm, spec.rr_irregularity,
                                 p.draw.artifacts, spec.duration_s, spec.fs,
                                 p.draw.waveform_seed, spec.qrst_mv);
        p.raw = std::move(ecg.raw);
        p.raw.patient_id = p.draw.patient_id;
        p.r_peaks = std::move(ecg.r_peaks);
    });

    ordered_json manifest;
    manifest["spec"]["n_sr"] = spec.n_sr;
    manifest["spec"]["n_af"] = spec.n_af;
    for (const auto& [key, group] : {std::pair{"sr", &spec.sr}, std::pair{"af", &spec.af}}) {
        manifest["spec"][key]["f0_mean"] = group->f0_mean;
        manifest["spec"][key]["f0_sd"] = group->f0_sd;
        manifest["spec"][key]["gamma_mean"] = group->gamma_mean;
        manifest["spec"][key]["gamma_sd"] = group->gamma_sd;
        manifest["spec"][key]["broadband_mean"] = group->broadband_mean;
        manifest["spec"][key]["broadband_sd"] = group->broadband_sd;
    }
    manifest["spec"]["duration_s"] = spec.duration_s;
    manifest["spec"]["fs"] = spec.fs;
    manifest["spec"]["fwave_mv"] = spec.fwave_mv;
    manifest["spec"]["qrst_mv"] = spec.qrst_mv;
    manifest["spec"]["heart_rate_bpm"] = spec.heart_rate_bpm;
    manifest["spec"]["rr_irregularity"] = spec.rr_irregularity;
    manifest["spec"]["drift_mv"] = spec.drift_mv;
    manifest["spec"]["mains_mv"] = spec.mains_mv;
    manifest["spec"]["noise_mv"] = spec.noise_mv;
    manifest["spec"]["freq_jitter"] = spec.freq_jitter;
    manifest["spec"]["phase_noise"] = spec.phase_noise;
    manifest["spec"]["rng_seed"] = spec.rng_seed;
    manifest["patients"] = ordered_json::array();

    for (const PatientOut& p : patients) {
        const std::string id = p.draw.patient_id;
        save_signal(p.raw, (out_dir / (id + ".csv")).string());

        ordered_json truth;
        truth["patient_id"] = id;
        truth["outcome"] = outcome_name(p.draw.outcome);
        truth["f0_hz"] = p.draw.params.f0;
        truth["gamma"] = p.draw.params.gamma_true;
        truth["broadband_mv"] = p.draw.broadband_mv;
        truth["amplitude_mv"] = p.draw.params.amplitude;
        truth["freq_jitter_hz"] = p.draw.params.freq_jitter;
        truth["phase_noise_rad"] = p.draw.params.phase_noise;
        truth["r_peaks"] = p.r_peaks;
        write_text(out_dir / (id + "_truth.json"), truth.dump(2) + "\n");

        ordered_json entry;
        entry["patient_id"] = id;
        entry["outcome"] = outcome_name(p.draw.outcome);
        entry["signal"] = id + ".csv";
        entry["metadata"] = id + ".json";
        entry["truth"] = id + "_truth.json";
        manifest["patients"].push_back(std::move(entry));
        log.debug(id + ": f0 " + format_double(p.draw.params.f0) + " Hz, gamma " +
                  format_double(p.draw.params.gamma_true) + ", " +
                  std::to_string(p.r_peaks.size()) + " beats");
    }
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    log.info("wrote " + std::to_string(total) + " patients and " +
             (out_dir / "manifest.json").string());
    log.write(out_dir);
}

}  // namespace

int main(int argc, char** argv) {
    init_stderr_level();
    const std::vector<std::string> tokens(argv + 1, argv + argc);

    CLI::App app{"Single-lead ECG f-wave analysis: preprocessing, QRST cancellation, "
                 "spectral features, group statistics and outcome-model evaluation"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "INI file with defaults, one [section] per subcommand; "
                   "command-line flags take precedence");

    auto preprocess_args = std::make_shared<CmdPreprocess>();
    CLI::App* preprocess_cmd =
        app.add_subcommand("preprocess", "Denoise raw ECG signal files");
    preprocess_cmd->add_option("inputs", preprocess_args->inputs, "Signal CSV files")
        ->required();
    preprocess_cmd->add_option("-o,--out", preprocess_args->out, "Output directory")->required();
    add_preprocess_flags(preprocess_cmd, preprocess_args->pp);
    preprocess_cmd->add_option("--jobs", preprocess_args->jobs, "Worker threads; 0 uses all cores")
        ->capture_default_str();
    preprocess_cmd->callback(
        [&, preprocess_args] { run_preprocess(*preprocess_args, *preprocess_cmd, tokens); });

    auto extract_args = std::make_shared<CmdExtract>();
    CLI::App* extract_cmd = app.add_subcommand(
        "extract-fwaves", "Cancel the ventricular activity, leaving the atrial signal");
    extract_cmd->add_option("inputs", extract_args->inputs, "Signal CSV files")->required();
    extract_cmd->add_option("-o,--out", extract_args->out, "Output directory")->required();
    add_preprocess_flags(extract_cmd, extract_args->pp);
    extract_cmd->add_option("--jobs", extract_args->jobs, "Worker threads; 0 uses all cores")
        ->capture_default_str();
    extract_cmd->callback([&, extract_args] { run_extract(*extract_args, *extract_cmd, tokens); });

    auto features_args = std::make_shared<CmdFeatures>();
    CLI::App* features_cmd = app.add_subcommand(
        "features", "Per-patient spectral feature table from signal files");
    features_cmd->add_option("inputs", features_args->inputs, "Signal CSV files (any stage)")
        ->required();
    features_cmd->add_option("-o,--out", features_args->out, "Output directory")->required();
    features_cmd->add_option("--labels", features_args->labels,
                             "CSV patient_id,outcome with the known outcomes");
    add_preprocess_flags(features_cmd, features_args->pp);
    features_cmd
        ->add_flag("--psd,!--no-psd", features_args->psd,
                   "Write per-patient spectra and group averages aligned on the dominant "
                   "frequency")
        ->default_str("true");
    features_cmd->add_option("--jobs", features_args->jobs, "Worker threads; 0 uses all cores")
        ->capture_default_str();
    features_cmd->callback(
        [&, features_args] { run_features(*features_args, *features_cmd, tokens); });

    auto stats_args = std::make_shared<CmdStats>();
    CLI::App* stats_cmd =
        app.add_subcommand("stats", "Group comparison of features and clinical variables");
    stats_cmd->add_option("--features", stats_args->features_path, "Feature table CSV")
        ->required();
    stats_cmd->add_option("--clinical", stats_args->clinical_path, "Clinical table CSV");
    stats_cmd->add_option("-o,--out", stats_args->out, "Output directory")->required();
    stats_cmd->add_option("--jobs", stats_args->jobs, "Worker threads; 0 uses all cores")
        ->capture_default_str();
    stats_cmd->callback([&, stats_args] { run_stats(*stats_args, *stats_cmd, tokens); });

    auto evaluate_args = std::make_shared<CmdEvaluate>();
    CLI::App* evaluate_cmd = app.add_subcommand(
        "evaluate", "Cross-validated outcome prediction from a feature table");
    evaluate_cmd->add_option("--features", evaluate_args->features_path, "Feature table CSV")
        ->required();
    evaluate_cmd
        ->add_option("--model", evaluate_args->models,
                     "Comma-separated feature list, or 'auto' for forward selection; repeatable")
        ->required()
        ->type_size(1);
    evaluate_cmd->add_option("-o,--out", evaluate_args->out, "Output directory")->required();
    evaluate_cmd->add_option("--folds", evaluate_args->folds, "Cross-validation folds")
        ->capture_default_str();
    evaluate_cmd->add_option("--repeats", evaluate_args->repeats, "Cross-validation repeats")
        ->capture_default_str();
    evaluate_cmd->add_option("--seed", evaluate_args->seed, "Cross-validation seed")
        ->capture_default_str();
    evaluate_cmd->add_flag("--equal-priors", evaluate_args->equal_priors,
                           "Place the decision boundary at the class-mean midpoint");
    evaluate_cmd->add_option("--jobs", evaluate_args->jobs, "Worker threads; 0 uses all cores")
        ->capture_default_str();
    evaluate_cmd->callback(
        [&, evaluate_args] { run_evaluate(*evaluate_args, *evaluate_cmd, tokens); });

    auto synth_args = std::make_shared<CmdSynth>();
    CLI::App* synth_cmd =
        app.add_subcommand("synth", "Synthesize a labeled ECG dataset with ground truth");
    synth_cmd->add_option("-o,--out", synth_args->out, "Output directory")->required();
    synth_cmd->add_option("--n-sr", synth_args->spec.n_sr, "SR-group patients")
        ->capture_default_str();
    synth_cmd->add_option("--n-af", synth_args->spec.n_af, "AF-group patients")
        ->capture_default_str();
    synth_cmd->add_option("--sr-f0-mean", synth_args->spec.sr.f0_mean, "SR dominant-frequency mean, Hz")
        ->capture_default_str();
    synth_cmd->add_option("--sr-f0-sd", synth_args->spec.sr.f0_sd, "SR dominant-frequency SD, Hz")
        ->capture_default_str();
    synth_cmd->add_option("--sr-gamma-mean", synth_args->spec.sr.gamma_mean, "SR harmonic-decay mean")
        ->capture_default_str();
    synth_cmd->add_option("--sr-gamma-sd", synth_args->spec.sr.gamma_sd, "SR harmonic-decay SD")
        ->capture_default_str();
    synth_cmd->add_option("--sr-broadband-mean", synth_args->spec.sr.broadband_mean,
                          "SR broadband activity mean, mV RMS")
        ->capture_default_str();
    synth_cmd->add_option("--sr-broadband-sd", synth_args->spec.sr.broadband_sd,
                          "SR broadband activity SD, mV RMS")
        ->capture_default_str();
    synth_cmd->add_option("--af-f0-mean", synth_args->spec.af.f0_mean, "AF dominant-frequency mean, Hz")
        ->capture_default_str();
    synth_cmd->add_option("--af-f0-sd", synth_args->spec.af.f0_sd, "AF dominant-frequency SD, Hz")
        ->capture_default_str();
    synth_cmd->add_option("--af-gamma-mean", synth_args->spec.af.gamma_mean, "AF harmonic-decay mean")
        ->capture_default_str();
    synth_cmd->add_option("--af-gamma-sd", synth_args->spec.af.gamma_sd, "AF harmonic-decay SD")
        ->capture_default_str();
    synth_cmd->add_option("--af-broadband-mean", synth_args->spec.af.broadband_mean,
                          "AF broadband activity mean, mV RMS")
        ->capture_default_str();
    synth_cmd->add_option("--af-broadband-sd", synth_args->spec.af.broadband_sd,
                          "AF broadband activity SD, mV RMS")
        ->capture_default_str();
    synth_cmd->add_option("--duration", synth_args->spec.duration_s, "Record duration, s")
        ->capture_default_str();
    synth_cmd->add_option("--fs", synth_args->spec.fs, "Sampling rate, Hz")->capture_default_str();
    synth_cmd->add_option("--fwave-mv", synth_args->spec.fwave_mv, "F-wave amplitude, mV")
        ->capture_default_str();
    synth_cmd->add_option("--qrst-mv", synth_args->spec.qrst_mv, "R-peak amplitude, mV")
        ->capture_default_str();
    synth_cmd->add_option("--heart-rate", synth_args->spec.heart_rate_bpm, "Mean heart rate, bpm")
        ->capture_default_str();
    synth_cmd
        ->add_option("--rr-irregularity", synth_args->spec.rr_irregularity,
                     "RR spread as a fraction of the mean interval")
        ->capture_default_str();
    synth_cmd->add_option("--drift-mv", synth_args->spec.drift_mv, "Baseline drift amplitude, mV")
        ->capture_default_str();
    synth_cmd->add_option("--mains-mv", synth_args->spec.mains_mv, "Powerline amplitude, mV")
        ->capture_default_str();
    synth_cmd->add_option("--noise-mv", synth_args->spec.noise_mv, "Recording noise RMS, mV")
        ->capture_default_str();
    synth_cmd->add_option("--freq-jitter", synth_args->spec.freq_jitter,
                          "F-wave frequency modulation RMS, Hz")
        ->capture_default_str();
    synth_cmd->add_option("--phase-noise", synth_args->spec.phase_noise,
                          "Per-harmonic phase wobble RMS, radians")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth_args->spec.rng_seed, "Cohort seed")
        ->capture_default_str();
    synth_cmd->add_option("--jobs", synth_args->jobs, "Worker threads; 0 uses all cores")
        ->capture_default_str();
    synth_cmd->callback([&, synth_args] { run_synth(*synth_args, *synth_cmd, tokens); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "fwave: error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "fwave: internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
