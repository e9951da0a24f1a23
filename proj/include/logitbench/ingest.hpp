#pragma once

#include "logitbench/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace logitbench {

/// How to read a real dataset from CSV. Columns are referenced by header
/// name, or by name "V1", "V2", ... (1-based) when the file has no header.
struct IngestSpec {
    std::filesystem::path path;
    std::variant<std::string, std::size_t> target = std::string("y");  // name or 0-based index
    std::string positive_label = "1";
    char delimiter = ',';
    bool has_header = true;
    std::vector<std::string> categorical_columns;

    /// Reads a JSON sidecar: {"path", "target", "positive_label", "delimiter",
    /// "has_header", "categorical_columns"}; relative paths resolve against the sidecar.
    static IngestSpec from_json_file(const std::filesystem::path& file);
};

struct RowRejection {
    std::size_t row = 0;  // 1-based data row (header excluded)
    std::string reason;
};

struct IngestResult {
    Dataset data;
    std::vector<RowRejection> rejected;
    /// Post-encoding columns with zero variance (kept; the lasso holds them at 0).
    std::vector<std::string> zero_variance_columns;
};

/// RFC-4180 style parsing: quoted cells, doubled quotes, delimiters and line
/// breaks inside quotes. Returns rows of raw cells.
std::vector<std::vector<std::string>> parse_csv(const std::string& text, char delimiter = ',');

/// Loads a dataset. Numeric columns parse as reals; declared categorical
/// columns are one-hot encoded in place with the lexicographically first level
/// dropped; rows with a missing or unparseable cell are rejected and reported.
IngestResult load_csv(const IngestSpec& spec);

/// Writes covariates (named by feature names) followed by the outcome column "y".
void write_csv(const Dataset& data, const std::filesystem::path& file);

}  // namespace logitbench
