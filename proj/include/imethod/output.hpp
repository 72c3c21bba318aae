#pragma once

// CSV traces with '#' manifest lines, and JSON-lines summaries.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "imethod/config.hpp"
#include "imethod/experiments.hpp"
#include "imethod/integrator.hpp"
#include "imethod/operators.hpp"

#ifndef IMETHOD_VERSION
#define IMETHOD_VERSION "unversioned"
#endif

namespace imethod {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCsvColumns = "t,mass,H,L,H_I,L_I,hs_norm,dist,commutator,tail_fraction";

/// Manifest: experiment name, code version, blend, the full config and extra entries.
inline std::vector<std::string> manifest(const std::string& experiment, const ExperimentConfig& config, Blend blend,
                                         const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    std::vector<std::string> lines{"experiment = " + experiment, std::string("code_version = ") + IMETHOD_VERSION,
                                   std::string("blend = ") + to_string(blend)};
    for (auto& l : config_lines(config)) lines.push_back(std::move(l));
    for (const auto& [k, v] : extra) lines.push_back(k + " = " + v);
    return lines;
}

inline std::string format_number(double v) { return detail::shortest(v); }

inline std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

inline void write_trace_csv(const std::filesystem::path& path, const std::vector<std::string>& manifest_lines,
                            const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    for (const auto& line : manifest_lines) out << "# " << line << '\n';
    out << kCsvColumns << '\n';
    for (const auto& r : records) {
        out << format_number(r.t) << ',' << format_number(r.mass) << ',' << format_number(r.hamiltonian) << ','
            << format_number(r.lyapunov) << ',' << format_optional(r.hamiltonian_i) << ','
            << format_optional(r.lyapunov_i) << ',' << format_optional(r.sobolev_norm) << ','
            << format_optional(r.distance) << ',' << format_optional(r.commutator) << ','
            << format_number(r.tail_fraction) << '\n';
    }
}

/// One JSON object per line; the first line is the manifest.
class JsonLinesWriter {
public:
    JsonLinesWriter(const std::filesystem::path& path, const std::vector<std::string>& manifest_lines) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
        Json m;
        m["kind"] = "manifest";
        for (const auto& line : manifest_lines) {
            const auto eq = line.find(" = ");
            m[line.substr(0, eq)] = eq == std::string::npos ? "" : line.substr(eq + 3);
        }
        write(m);
    }
    void write(const Json& obj) { out_ << obj.dump() << '\n'; }

private:
    std::ofstream out_;
};

inline Json fit_json(const std::string& quantity, const std::optional<LogLogFit>& fit, const std::string& note) {
    Json j;
    j["kind"] = "fit";
    j["quantity"] = quantity;
    if (fit) {
        j["slope"] = fit->slope;
        j["intercept"] = fit->intercept;
        j["r_squared"] = fit->r_squared;
    } else {
        j["slope"] = nullptr;
        j["note"] = note;
    }
    return j;
}

inline std::string number_tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::vector<std::filesystem::path> write_almost_conservation(const std::filesystem::path& dir,
                                                                     const ExperimentConfig& config,
                                                                     const AlmostConservationResult& result) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    for (std::size_t k = 0; k < result.rows.size(); ++k) {
        const auto path = dir / ("almost_conservation_N" + number_tag(result.rows[k].N) + ".csv");
        write_trace_csv(path,
                        manifest("almost-conservation", config, result.blend,
                                 {{"N", format_number(result.rows[k].N)}, {"data", "rough"},
                                  {"status", to_string(result.status)}}),
                        result.traces[k]);
        files.push_back(path);
    }
    const auto summary = dir / "almost_conservation_summary.jsonl";
    JsonLinesWriter w(summary, manifest("almost-conservation", config, result.blend,
                                        {{"status", to_string(result.status)}, {"message", result.message}}));
    for (const auto& row : result.rows) {
        Json j;
        j["kind"] = "row";
        j["N"] = row.N;
        j["drift_H"] = row.drift_H;
        j["drift_L"] = row.drift_L;
        j["commutator_max"] = row.commutator_max;
        j["commutator_initial"] = row.commutator_initial;
        w.write(j);
    }
    w.write(fit_json("drift_" + result.drift_quantity, result.drift_fit, result.fit_note));
    w.write(fit_json("commutator", result.commutator_fit, result.fit_note));
    Json c;
    c["kind"] = "conservation";
    c["mass_relative_drift"] = result.mass_drift;
    c["hamiltonian_relative_drift"] = result.hamiltonian_drift;
    w.write(c);
    files.push_back(summary);
    return files;
}

inline std::vector<std::filesystem::path> write_stability(const std::filesystem::path& dir,
                                                           const ExperimentConfig& config,
                                                           const StabilityResult& result,
                                                           Blend blend = Blend::smoothstep_log) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    const std::string band = format_number(result.band.lo) + ", " + format_number(result.band.hi);
    for (const auto& run : result.runs) {
        const auto path = dir / ("stability_sigma" + number_tag(run.sigma) + ".csv");
        write_trace_csv(path,
                        manifest("stability", config, blend,
                                 {{"sigma", format_number(run.sigma)},
                                  {"N", run.N ? format_number(*run.N) : "none"},
                                  {"radius_R_used", format_number(run.radius)},
                                  {"perturbation_band", band},
                                  {"status", to_string(run.status)}}),
                        run.records);
        files.push_back(path);
    }
    const auto summary = dir / "stability_summary.jsonl";
    JsonLinesWriter w(summary, manifest("stability", config, blend, {{"perturbation_band", band}}));
    for (const auto& run : result.runs) {
        Json j;
        j["kind"] = "row";
        j["sigma"] = run.sigma;
        j["N"] = run.N ? Json(*run.N) : Json(nullptr);
        j["radius_R"] = run.radius;
        j["exit_observed"] = run.exit_time.has_value();
        j["exit_time"] = run.exit_time ? Json(*run.exit_time) : Json(nullptr);
        j["max_distance"] = run.max_distance;
        j["status"] = to_string(run.status);
        j["message"] = run.message;
        w.write(j);
    }
    Json mono;
    mono["kind"] = "monotonicity";
    mono["nondecreasing_as_sigma_decreases"] = result.monotone;
    w.write(mono);
    w.write(fit_json("exit_time_vs_inverse_sigma", result.fit, result.fit_note));
    files.push_back(summary);
    return files;
}

inline std::vector<std::filesystem::path> write_growth(const std::filesystem::path& dir, const ExperimentConfig& config,
                                                        const GrowthResult& result,
                                                        Blend blend = Blend::smoothstep_log) {
    std::filesystem::create_directories(dir);
    const auto csv = dir / "growth.csv";
    write_trace_csv(csv,
                    manifest("growth", config, blend,
                             {{"N", format_number(config.N_list.front())}, {"data", "rough"},
                              {"status", to_string(result.status)}}),
                    result.records);
    const auto summary = dir / "growth_summary.jsonl";
    JsonLinesWriter w(summary, manifest("growth", config, blend,
                                        {{"status", to_string(result.status)}, {"message", result.message}}));
    w.write(fit_json("running_max_hs_norm_vs_t", result.fit, result.fit_note));
    return {csv, summary};
}

inline std::vector<std::filesystem::path> write_rescaling(const std::filesystem::path& dir,
                                                           const ExperimentConfig& config,
                                                           const RescalingResult& result,
                                                           Blend blend = Blend::smoothstep_log) {
    std::filesystem::create_directories(dir);
    const auto csv = dir / "rescaling.csv";
    write_trace_csv(csv,
                    manifest("rescaling", config, blend,
                             {{"data", "gaussian rescaled by lambda"},
                              {"rescaled_box_length", format_number(result.rescaled_grid.length)},
                              {"N", format_number(config.N_list.front())},
                              {"status", to_string(result.rescaled_run.status)}}),
                    result.rescaled_run.records);
    const auto summary = dir / "rescaling_summary.jsonl";
    JsonLinesWriter w(summary, manifest("rescaling", config, blend, {{"alpha_fit", format_number(result.alpha_fit)}}));
    for (const auto& row : result.rows) {
        Json j;
        j["kind"] = "scaling";
        j["lambda"] = row.lambda;
        j["hs_ratio"] = row.hs_ratio;
        j["hs_expected"] = row.hs_expected;
        j["l2_ratio"] = row.l2_ratio;
        j["l2_expected"] = row.l2_expected;
        j["max_relative_error"] = row.max_relative_error;
        w.write(j);
    }
    Json c;
    c["kind"] = "parameters";
    c["feasible"] = result.choice.feasible;
    c["N"] = result.choice.feasible ? Json(result.choice.N) : Json(nullptr);
    c["lambda"] = result.choice.feasible ? Json(result.choice.lambda) : Json(nullptr);
    c["hamiltonian_bound"] = result.choice.hamiltonian_bound;
    c["time_reach"] = result.choice.time_reach;
    c["reason"] = result.choice.reason;
    w.write(c);
    return {csv, summary};
}

}  // namespace imethod
