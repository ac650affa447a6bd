#include "voxmask/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace voxmask {

namespace {

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

[[noreturn]] void fail_line(const std::string& path, std::size_t line, const std::string& why) {
    throw std::runtime_error(path + ": line " + std::to_string(line) + ": " + why);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

DataSplit parse_split(const std::string& token) {
    const std::string t = lower(token);
    if (t == "train") return DataSplit::kTrain;
    if (t == "dev" || t == "valid" || t == "validation") return DataSplit::kDev;
    if (t == "test" || t.empty()) return DataSplit::kTest;
    throw std::invalid_argument("unknown split token '" + token + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

namespace {

std::vector<UtteranceRecord> load_manifest_csv(const std::string& path) {
    const auto rows = read_csv(path);
    if (rows.empty()) throw std::runtime_error(path + ": empty manifest");

    std::map<std::string, std::size_t> columns;
    for (std::size_t i = 0; i < rows[0].size(); ++i) columns[lower(rows[0][i])] = i;
    for (const char* required : {"id", "speaker", "gender", "wav"})
        if (!columns.count(required))
            throw std::runtime_error(path + ": manifest header is missing column '" +
                                     std::string(required) + "'");

    auto cell = [&](const std::vector<std::string>& row, const char* name) -> std::string {
        const auto it = columns.find(name);
        if (it == columns.end() || it->second >= row.size()) return "";
        return row[it->second];
    };

    std::vector<UtteranceRecord> records;
    std::set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::size_t line = r + 1;
        const auto& row = rows[r];
        UtteranceRecord rec;
        rec.id = cell(row, "id");
        rec.speaker_id = cell(row, "speaker");
        rec.wav_path = cell(row, "wav");
        if (rec.id.empty()) fail_line(path, line, "empty id");
        if (rec.speaker_id.empty()) fail_line(path, line, "empty speaker");
        if (rec.wav_path.empty()) fail_line(path, line, "empty wav path");
        if (!seen.insert(rec.id).second) fail_line(path, line, "duplicate id '" + rec.id + "'");
        try {
            rec.gender = parse_gender(cell(row, "gender"));
            rec.split = parse_split(cell(row, "split"));
        } catch (const std::invalid_argument& e) {
            fail_line(path, line, e.what());
        }
        const std::string transcript = cell(row, "transcript");
        if (!transcript.empty()) rec.transcript = transcript;
        const std::string label = cell(row, "label");
        if (!label.empty()) {
            if (label != "0" && label != "1") fail_line(path, line, "label must be 0 or 1");
            rec.risk_label = label == "1" ? 1 : 0;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<UtteranceRecord> load_manifest_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<UtteranceRecord> records;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail_line(path, lineno, std::string("invalid JSON: ") + e.what());
        }
        UtteranceRecord rec;
        try {
            rec.id = obj.at("id").get<std::string>();
            rec.speaker_id = obj.at("speaker").get<std::string>();
            rec.wav_path = obj.at("wav").get<std::string>();
            rec.gender = parse_gender(obj.value("gender", ""));
            rec.split = parse_split(obj.value("split", ""));
            if (obj.contains("transcript")) rec.transcript = obj["transcript"].get<std::string>();
            if (obj.contains("label") && !obj["label"].is_null()) {
                const int label = obj["label"].get<int>();
                if (label != 0 && label != 1) fail_line(path, lineno, "label must be 0 or 1");
                rec.risk_label = label;
            }
        } catch (const nlohmann::json::exception& e) {
            fail_line(path, lineno, std::string("bad record: ") + e.what());
        } catch (const std::invalid_argument& e) {
            fail_line(path, lineno, e.what());
        }
        if (!seen.insert(rec.id).second)
            fail_line(path, lineno, "duplicate id '" + rec.id + "'");
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw std::runtime_error(path + ": empty manifest");
    return records;
}

}  // namespace

std::vector<UtteranceRecord> load_manifest(const std::string& path) {
    if (has_suffix(path, ".jsonl") || has_suffix(path, ".ndjson"))
        return load_manifest_jsonl(path);
    return load_manifest_csv(path);
}

}  // namespace voxmask
