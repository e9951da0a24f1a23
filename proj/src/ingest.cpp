#include "logitbench/ingest.hpp"

#include "logitbench/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace logitbench {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) {
    const std::string t = trim(cell);
    return t.empty() || t == "NA" || t == "NaN" || t == "nan" || t == "?" || t == "null";
}

std::optional<double> parse_number(const std::string& cell) {
    const std::string t = trim(cell);
    if (t.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text, char delimiter) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool in_quotes = false;
    bool row_has_content = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            row_has_content = true;
        } else if (c == delimiter) {
            row.push_back(std::move(cell));
            cell.clear();
            row_has_content = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (row_has_content || !cell.empty()) {
                row.push_back(std::move(cell));
                rows.push_back(std::move(row));
            }
            row.clear();
            cell.clear();
            row_has_content = false;
        } else {
            cell += c;
            row_has_content = true;
        }
    }
    if (in_quotes) throw IngestError("unterminated quoted field");
    if (row_has_content || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
    }
    if (!text.empty() && static_cast<unsigned char>(text[0]) == 0xEF && !rows.empty() && !rows[0].empty() &&
        rows[0][0].rfind("\xEF\xBB\xBF", 0) == 0) {
        rows[0][0].erase(0, 3);  // UTF-8 byte order mark
    }
    return rows;
}

IngestSpec IngestSpec::from_json_file(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw IngestError("cannot open ingest spec " + file.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IngestError("invalid ingest spec JSON: " + std::string(e.what()));
    }
    IngestSpec spec;
    if (!j.contains("path")) throw IngestError("ingest spec lacks \"path\"");
    spec.path = j.at("path").get<std::string>();
    if (spec.path.is_relative()) spec.path = file.parent_path() / spec.path;
    if (j.contains("target")) {
        const auto& t = j.at("target");
        if (t.is_number_unsigned()) {
            spec.target = t.get<std::size_t>();
        } else {
            spec.target = t.get<std::string>();
        }
    }
    if (j.contains("positive_label")) {
        const auto& v = j.at("positive_label");
        spec.positive_label = v.is_string() ? v.get<std::string>() : v.dump();
    }
    if (j.contains("delimiter")) {
        const auto d = j.at("delimiter").get<std::string>();
        if (d.size() != 1) throw IngestError("delimiter must be a single character");
        spec.delimiter = d[0];
    }
    if (j.contains("has_header")) spec.has_header = j.at("has_header").get<bool>();
    if (j.contains("categorical_columns")) {
        spec.categorical_columns = j.at("categorical_columns").get<std::vector<std::string>>();
    }
    return spec;
}

IngestResult load_csv(const IngestSpec& spec) {
    std::ifstream is(spec.path, std::ios::binary);
    if (!is) throw IngestError("cannot open " + spec.path.string());
    std::stringstream buf;
    buf << is.rdbuf();
    auto rows = parse_csv(buf.str(), spec.delimiter);
    if (rows.empty()) throw IngestError(spec.path.string() + " is empty");

    std::vector<std::string> header;
    if (spec.has_header) {
        header = rows.front();
        for (auto& h : header) h = trim(h);
        rows.erase(rows.begin());
    } else {
        for (std::size_t c = 0; c < rows.front().size(); ++c) header.push_back("V" + std::to_string(c + 1));
    }
    const std::size_t width = header.size();

    std::size_t target = 0;
    if (const auto* idx = std::get_if<std::size_t>(&spec.target)) {
        if (*idx >= width) throw IngestError("target column index " + std::to_string(*idx) + " out of range");
        target = *idx;
    } else {
        const auto& name = std::get<std::string>(spec.target);
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw IngestError("target column \"" + name + "\" not found");
        target = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<bool> categorical(width, false);
    for (const auto& name : spec.categorical_columns) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw IngestError("categorical column \"" + name + "\" not found");
        const auto c = static_cast<std::size_t>(it - header.begin());
        if (c == target) throw IngestError("the target column cannot be categorical");
        categorical[c] = true;
    }

    // First pass: decide which rows are complete.
    IngestResult result{Dataset(Matrix::Zero(1, 1), Vector::Zero(1)), {}, {}};
    std::vector<std::size_t> kept;
    std::set<std::string> labels;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        std::string reason;
        if (row.size() != width) {
            reason = "expected " + std::to_string(width) + " cells, found " + std::to_string(row.size());
        } else {
            for (std::size_t c = 0; c < width && reason.empty(); ++c) {
                if (is_missing(row[c])) {
                    reason = "missing value in column \"" + header[c] + "\"";
                } else if (c != target && !categorical[c] && !parse_number(row[c])) {
                    reason = "unparseable number \"" + trim(row[c]) + "\" in column \"" + header[c] + "\"";
                }
            }
        }
        if (!reason.empty()) {
            result.rejected.push_back({r + 1, reason});
            continue;
        }
        kept.push_back(r);
        labels.insert(trim(row[target]));
    }
    if (kept.empty()) throw IngestError("no complete rows left after rejecting " + std::to_string(rows.size()));
    if (labels.size() > 2) {
        std::string all;
        for (const auto& l : labels) all += (all.empty() ? "" : ", ") + l;
        throw IngestError("target is not binary; observed labels: " + all);
    }
    if (!labels.count(spec.positive_label)) {
        throw IngestError("positive label \"" + spec.positive_label + "\" does not occur in the target column");
    }

    // Column layout: one-hot blocks sit where their source column was.
    struct OutColumn {
        std::size_t source;
        std::optional<std::string> level;  // set for one-hot indicators
    };
    std::vector<OutColumn> layout;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < width; ++c) {
        if (c == target) continue;
        if (!categorical[c]) {
            layout.push_back({c, std::nullopt});
            names.push_back(header[c]);
            continue;
        }
        std::set<std::string> levels;
        for (std::size_t r : kept) levels.insert(trim(rows[r][c]));
        bool first = true;
        for (const auto& level : levels) {
            if (first) {
                first = false;  // reference level
                continue;
            }
            layout.push_back({c, level});
            names.push_back(header[c] + "=" + level);
        }
    }
    if (layout.empty()) throw IngestError("no covariate columns after encoding");

    Matrix x(static_cast<Index>(kept.size()), static_cast<Index>(layout.size()));
    Vector y(static_cast<Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto& row = rows[kept[i]];
        const auto ii = static_cast<Index>(i);
        y[ii] = trim(row[target]) == spec.positive_label ? 1.0 : 0.0;
        for (std::size_t j = 0; j < layout.size(); ++j) {
            const auto& col = layout[j];
            x(ii, static_cast<Index>(j)) =
                col.level ? (trim(row[col.source]) == *col.level ? 1.0 : 0.0) : *parse_number(row[col.source]);
        }
    }
    for (Index j = 0; j < x.cols(); ++j) {
        if ((x.col(j).array() == x(0, j)).all()) result.zero_variance_columns.push_back(names[static_cast<std::size_t>(j)]);
    }
    result.data = Dataset(std::move(x), std::move(y), std::move(names));
    return result;
}

void write_csv(const Dataset& data, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::trunc);
    if (!os) throw IoError("cannot write " + file.string());
    for (const auto& name : data.feature_names()) os << quote_if_needed(name) << ',';
    os << "y\n";
    char buf[40];
    for (Index i = 0; i < data.n(); ++i) {
        for (Index j = 0; j < data.p(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", data.x()(i, j));
            os << buf << ',';
        }
        os << static_cast<int>(data.y()[i]) << '\n';
    }
    if (!os) throw IoError("write failed for " + file.string());
}

}  // namespace logitbench
