#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voxmask/anonymize.hpp"

namespace voxmask {

enum class DataSplit { kTrain, kDev, kTest };

DataSplit parse_split(const std::string& token);

struct UtteranceRecord {
    std::string id;
    std::string speaker_id;
    Gender gender = Gender::kUnspecified;
    std::string wav_path;
    std::optional<std::string> transcript;
    std::optional<int> risk_label;  // 0/1
    DataSplit split = DataSplit::kTest;
};

// Loads a CSV (header: id,speaker,gender,wav[,transcript,label,split]) or
// JSON-lines manifest, chosen by file extension (.jsonl/.ndjson vs
// anything else). Duplicate ids, unknown gender/split tokens and missing
// required fields are reported with their line number.
std::vector<UtteranceRecord> load_manifest(const std::string& path);

// Minimal CSV reader shared by the manifest and table loaders: handles
// quoted fields with embedded commas/newlines and doubled quotes.
std::vector<std::vector<std::string>> read_csv(const std::string& path);
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace voxmask
