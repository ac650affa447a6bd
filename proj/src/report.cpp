#include "voxmask/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace voxmask {

namespace {

std::string cell(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", *v);
    return buf;
}

}  // namespace

std::string render_report(const EvaluationReport& report, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::kCsv) {
        out << "method,SNR,MOS,L1_F0,PCC_F0,CER,Emo,EER\n";
        for (const auto& row : report.rows)
            out << row.method << ',' << cell(row.snr) << ',' << cell(row.mos) << ','
                << cell(row.l1_f0) << ',' << cell(row.pcc_f0) << ',' << cell(row.cer) << ','
                << cell(row.emo) << ',' << cell(row.eer) << "\n";
        return out.str();
    }

    out << "| method | SNR | MOS | L1_F0 | PCC_F0 | CER | Emo | EER |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& row : report.rows)
        out << "| " << row.method << " | " << cell(row.snr) << " | " << cell(row.mos) << " | "
            << cell(row.l1_f0) << " | " << cell(row.pcc_f0) << " | " << cell(row.cer) << " | "
            << cell(row.emo) << " | " << cell(row.eer) << " |\n";
    out << "\n";
    for (const auto& row : report.rows) {
        out << row.method << ": " << row.utterances << " utterances, " << row.failures
            << " failed; metric coverage snr=" << row.snr_n << " mos=" << row.mos_n
            << " f0=" << row.f0_n << " cer=" << row.cer_n << " emo=" << row.emo_n << "\n";
    }
    return out.str();
}

void emit_report(const EvaluationReport& report, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << render_report(report, format);
}

namespace {

void put_optional(nlohmann::json& obj, const char* key, const std::optional<double>& v) {
    if (v) obj[key] = *v;
}

std::optional<double> get_optional(const nlohmann::json& obj, const char* key) {
    if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
    return obj[key].get<double>();
}

}  // namespace

void save_report_json(const EvaluationReport& report, const std::string& path) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json obj;
        obj["method"] = row.method;
        put_optional(obj, "snr", row.snr);
        put_optional(obj, "mos", row.mos);
        put_optional(obj, "l1_f0", row.l1_f0);
        put_optional(obj, "pcc_f0", row.pcc_f0);
        put_optional(obj, "cer", row.cer);
        put_optional(obj, "emo", row.emo);
        put_optional(obj, "eer", row.eer);
        obj["utterances"] = row.utterances;
        obj["failures"] = row.failures;
        obj["counts"] = {{"snr", row.snr_n}, {"mos", row.mos_n},   {"f0", row.f0_n},
                         {"cer", row.cer_n}, {"emo", row.emo_n}};
        rows.push_back(std::move(obj));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << rows.dump(2) << "\n";
}

EvaluationReport load_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json rows;
    in >> rows;
    if (!rows.is_array()) throw std::runtime_error(path + ": expected a JSON array of rows");
    EvaluationReport report;
    for (const auto& obj : rows) {
        ReportRow row;
        row.method = obj.at("method").get<std::string>();
        row.snr = get_optional(obj, "snr");
        row.mos = get_optional(obj, "mos");
        row.l1_f0 = get_optional(obj, "l1_f0");
        row.pcc_f0 = get_optional(obj, "pcc_f0");
        row.cer = get_optional(obj, "cer");
        row.emo = get_optional(obj, "emo");
        row.eer = get_optional(obj, "eer");
        row.utterances = obj.value("utterances", 0);
        row.failures = obj.value("failures", 0);
        if (obj.contains("counts")) {
            const auto& counts = obj["counts"];
            row.snr_n = counts.value("snr", 0);
            row.mos_n = counts.value("mos", 0);
            row.f0_n = counts.value("f0", 0);
            row.cer_n = counts.value("cer", 0);
            row.emo_n = counts.value("emo", 0);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace voxmask
