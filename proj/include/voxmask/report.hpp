#pragma once

#include <optional>
#include <string>
#include <vector>

namespace voxmask {

// One table row per anonymization method. Missing metrics stay empty and
// render as "-", never as zeros. The *_n fields count utterances that
// contributed to each mean.
struct ReportRow {
    std::string method;
    std::optional<double> snr;
    std::optional<double> mos;
    std::optional<double> l1_f0;
    std::optional<double> pcc_f0;
    std::optional<double> cer;
    std::optional<double> emo;
    std::optional<double> eer;
    int utterances = 0;
    int failures = 0;
    int snr_n = 0, mos_n = 0, f0_n = 0, cer_n = 0, emo_n = 0;
};

struct EvaluationReport {
    std::vector<ReportRow> rows;
};

enum class ReportFormat { kMarkdown, kCsv };

// Fixed column order: method,SNR,MOS,L1_F0,PCC_F0,CER,Emo,EER. Values are
// rendered with three decimals; absent cells as "-". The markdown variant
// appends per-row coverage notes below the table.
std::string render_report(const EvaluationReport& report, ReportFormat format);
void emit_report(const EvaluationReport& report, ReportFormat format, const std::string& path);

// Lossless JSON round trip so a saved evaluation can be re-rendered later.
void save_report_json(const EvaluationReport& report, const std::string& path);
EvaluationReport load_report_json(const std::string& path);

}  // namespace voxmask
