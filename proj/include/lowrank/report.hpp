#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lowrank/experiments.hpp"
#include "lowrank/io.hpp"

namespace lowrank {

enum class ReportFormat { csv, json, svg };

inline constexpr const char* kRecordsCsvHeader =
    "experiment,n,r,p,seed,rel_error,success,wall_time";

// One line per record, schema fixed by kRecordsCsvHeader. The extra map is
// informational and deliberately not serialized: the CSV schema is the
// stable cross-experiment surface, and extra keys vary per experiment.
inline void write_records_csv(const std::filesystem::path& path,
                              const std::vector<TrialRecord>& records) {
    auto out = detail::open_out(path);
    out << kRecordsCsvHeader << '\n';
    for (const auto& rec : records) {
        out << rec.experiment << ',' << rec.n << ',' << rec.r << ','
            << format_g17(rec.p) << ',' << rec.seed << ','
            << format_g17(rec.rel_error) << ',' << (rec.success ? 1 : 0) << ','
            << format_g17(rec.wall_time) << '\n';
    }
    if (!out) throw io_error("write failed on " + path.string());
}

inline std::vector<TrialRecord> read_records_csv(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != kRecordsCsvHeader)
        throw io_error("unexpected CSV header in " + path.string());
    std::vector<TrialRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i)
            if (i == line.size() || line[i] == ',') {
                fields.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        if (fields.size() != 8)
            throw io_error("malformed CSV row in " + path.string());
        try {
            TrialRecord rec;
            rec.experiment = fields[0];
            rec.n = static_cast<index_t>(std::stoll(fields[1]));
            rec.r = static_cast<index_t>(std::stoll(fields[2]));
            rec.p = std::stod(fields[3]);
            rec.seed = std::stoull(fields[4]);
            rec.rel_error = std::stod(fields[5]);
            rec.success = fields[6] == "1";
            rec.wall_time = std::stod(fields[7]);
            records.push_back(std::move(rec));
        } catch (const std::exception&) {
            throw io_error("malformed CSV value in " + path.string());
        }
    }
    return records;
}

namespace detail {

inline nlohmann::json record_to_json(const TrialRecord& rec) {
    nlohmann::json j{{"experiment", rec.experiment}, {"n", rec.n},
                     {"r", rec.r},                   {"p", rec.p},
                     {"seed", rec.seed},             {"rel_error", rec.rel_error},
                     {"success", rec.success},       {"wall_time", rec.wall_time}};
    if (!rec.extra.empty()) j["extra"] = rec.extra;
    return j;
}

inline nlohmann::json curve_to_json(const PhaseCurve& curve) {
    nlohmann::json j;
    j["ranks"] = curve.ranks;
    j["p_star"] = nlohmann::json::array();
    for (const auto& ps : curve.p_star)
        j["p_star"].push_back(ps ? nlohmann::json(*ps) : nlohmann::json());
    j["trials_per_point"] = curve.trials_per_point;
    j["success_quota"] = curve.success_quota;
    j["grid_step"] = curve.grid_step;
    j["reference"] = curve.reference;
    return j;
}

} // namespace detail

inline void write_records_json(const std::filesystem::path& path,
                               const std::vector<TrialRecord>& records,
                               const PhaseCurve* curve = nullptr) {
    nlohmann::json j;
    j["records"] = nlohmann::json::array();
    for (const auto& rec : records) j["records"].push_back(detail::record_to_json(rec));
    if (curve) j["curve"] = detail::curve_to_json(*curve);
    auto out = detail::open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw io_error("write failed on " + path.string());
}

// p_star vs rank scatter with the information-theoretic reference polyline.
// Ranks whose p_star is the above-1 sentinel get no marker.
inline void write_phase_svg(const std::filesystem::path& path, const PhaseCurve& curve) {
    if (curve.ranks.empty() || curve.ranks.size() != curve.p_star.size() ||
        curve.ranks.size() != curve.reference.size())
        throw parameter_error("write_phase_svg: curve rank/p_star/reference lengths differ");
    const double W = 640.0, H = 480.0;
    const double x0 = 70.0, x1 = 610.0, y0 = 430.0, y1 = 30.0;
    const double rmax = static_cast<double>(
        *std::max_element(curve.ranks.begin(), curve.ranks.end()));
    auto X = [&](double r) { return x0 + (r / rmax) * (x1 - x0); };
    auto Y = [&](double p) { return y0 + std::clamp(p, 0.0, 1.0) * (y1 - y0); };

    auto out = detail::open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "  <rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "  <line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\""
        << y0 << "\" stroke=\"black\"/>\n";
    out << "  <line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\""
        << y1 << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << (x0 + x1) / 2 << "\" y=\"" << y0 + 35
        << "\" text-anchor=\"middle\" font-size=\"14\">rank r</text>\n";
    out << "  <text x=\"18\" y=\"" << (y0 + y1) / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
        << (y0 + y1) / 2 << ")\">minimal observation rate p*</text>\n";
    for (double p = 0.0; p <= 1.0 + 1e-9; p += 0.25) {
        out << "  <line x1=\"" << x0 - 4 << "\" y1=\"" << Y(p) << "\" x2=\"" << x0
            << "\" y2=\"" << Y(p) << "\" stroke=\"black\"/>\n";
        out << "  <text x=\"" << x0 - 8 << "\" y=\"" << Y(p) + 4
            << "\" text-anchor=\"end\" font-size=\"12\">" << format_g17(p)
            << "</text>\n";
    }
    out << "  <polyline class=\"reference\" fill=\"none\" stroke=\"#888\" "
           "stroke-dasharray=\"6 3\" points=\"";
    for (std::size_t i = 0; i < curve.ranks.size(); ++i) {
        if (i) out << ' ';
        out << X(static_cast<double>(curve.ranks[i])) << ',' << Y(curve.reference[i]);
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < curve.ranks.size(); ++i) {
        out << "  <text x=\"" << X(static_cast<double>(curve.ranks[i])) << "\" y=\""
            << y0 + 18 << "\" text-anchor=\"middle\" font-size=\"12\">"
            << curve.ranks[i] << "</text>\n";
        if (!curve.p_star[i]) continue;
        out << "  <circle class=\"pstar\" cx=\"" << X(static_cast<double>(curve.ranks[i]))
            << "\" cy=\"" << Y(*curve.p_star[i])
            << "\" r=\"5\" fill=\"#1f77b4\"/>\n";
    }
    out << "</svg>\n";
    if (!out) throw io_error("write failed on " + path.string());
}

// One JSON document per certificate trial, fields mirroring CertificateReport.
inline void write_certificate_trial_json(const std::filesystem::path& path,
                                         const CertificateReport& rep) {
    nlohmann::json j;
    j["op_norm_tangent"] = rep.op_norm_tangent;
    j["cond2a_value"] = rep.cond2a_value;
    j["cond2b_value"] = rep.cond2b_value;
    j["thresholds"] = rep.thresholds;
    j["pass_op"] = rep.pass_op;
    j["pass_2a"] = rep.pass_2a;
    j["pass_2b"] = rep.pass_2b;
    j["all_pass"] = rep.all_pass();
    j["dk_frobenius_trace"] = rep.dk_frobenius_trace;
    auto out = detail::open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw io_error("write failed on " + path.string());
}

inline constexpr const char* kCertificateCsvHeader =
    "trial, op_norm, cond2a, cond2b, pass";

inline void write_certificate_csv(const std::filesystem::path& path,
                                  const std::vector<CertificateReport>& reports) {
    auto out = detail::open_out(path);
    out << kCertificateCsvHeader << '\n';
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& rep = reports[i];
        out << i << ", " << format_g17(rep.op_norm_tangent) << ", "
            << format_g17(rep.cond2a_value) << ", " << format_g17(rep.cond2b_value)
            << ", " << (rep.all_pass() ? 1 : 0) << '\n';
    }
    if (!out) throw io_error("write failed on " + path.string());
}

inline void emit_report(const std::filesystem::path& out_dir,
                        const std::vector<TrialRecord>& records,
                        const PhaseCurve* curve, ReportFormat format) {
    if (records.empty()) throw parameter_error("emit_report: records are empty");
    switch (format) {
    case ReportFormat::csv:
        write_records_csv(out_dir / "records.csv", records);
        break;
    case ReportFormat::json:
        write_records_json(out_dir / "records.json", records, curve);
        break;
    case ReportFormat::svg:
        if (!curve)
            throw parameter_error("emit_report: svg output needs a phase curve");
        write_phase_svg(out_dir / "phase.svg", *curve);
        break;
    }
}

} // namespace lowrank
