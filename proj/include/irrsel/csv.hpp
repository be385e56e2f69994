#pragma once

// CSV ingestion of long-format ratings.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "irrsel/error.hpp"
#include "irrsel/ratings.hpp"

namespace irrsel {

struct CsvSchema {
    std::string applicant = "applicant";
    std::string rater = "rater";
    std::string score = "score";
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// One record per line; double quotes delimit fields that contain commas and
// "" escapes a quote. Fields spanning lines are not supported.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t row) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? current : trim(current));
            current.clear();
            was_quoted = false;
        } else {
            current.push_back(c);
        }
    }
    if (quoted) throw Error(ErrorKind::invalid_input, "cli", "row " + std::to_string(row) + ": unterminated quote");
    fields.push_back(was_quoted ? current : trim(current));
    return fields;
}

inline bool parse_double(std::string_view text, double& out) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

} // namespace detail

/// Reads ratings from CSV text. Rows are numbered by line, header = row 1.
inline RatingsTable read_ratings_csv(std::istream& in, const CsvSchema& schema = {}) {
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++row;
        if (row == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (detail::trim(line).empty()) continue;
        header = detail::split_csv_line(line, row);
        break;
    }
    if (header.empty()) throw Error(ErrorKind::invalid_input, "cli", "empty CSV input");

    const auto column = [&](const std::string& name) -> long {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<long>(i);
        }
        return -1;
    };
    const long ia = column(schema.applicant);
    const long ir = column(schema.rater);
    const long is = column(schema.score);
    std::string missing;
    const std::pair<long, std::string> wanted[] = {{ia, schema.applicant}, {ir, schema.rater}, {is, schema.score}};
    for (const auto& [idx, name] : wanted) {
        if (idx < 0) missing += (missing.empty() ? "" : ", ") + std::string("'") + name + "'";
    }
    if (!missing.empty()) throw Error(ErrorKind::invalid_input, "cli", "missing column(s) " + missing + " in header");

    RatingsTable table;
    std::map<std::pair<std::string, std::string>, std::size_t> first_row;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line, row);
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::invalid_input, "cli",
                        "row " + std::to_string(row) + ": expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        RatingRecord rec;
        rec.applicant = fields[static_cast<std::size_t>(ia)];
        rec.rater = fields[static_cast<std::size_t>(ir)];
        rec.row = row;
        const auto& score_text = fields[static_cast<std::size_t>(is)];
        if (!detail::parse_double(score_text, rec.score) || !std::isfinite(rec.score)) {
            throw Error(ErrorKind::invalid_input, "cli",
                        "row " + std::to_string(row) + ": score '" + score_text + "' is not a finite number");
        }
        auto [it, inserted] = first_row.emplace(std::make_pair(rec.applicant, rec.rater), row);
        if (!inserted) {
            throw Error(ErrorKind::invalid_input, "cli",
                        "duplicate rating pair (applicant '" + rec.applicant + "', rater '" + rec.rater + "') in rows " +
                            std::to_string(it->second) + " and " + std::to_string(row));
        }
        table.records.push_back(std::move(rec));
    }
    return table;
}

inline RatingsTable ingest_csv(const std::string& path, const CsvSchema& schema = {}) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::invalid_input, "cli", "cannot open '" + path + "'");
    return read_ratings_csv(in, schema);
}

inline std::string write_ratings_csv(const ValidatedRatings& table) {
    std::ostringstream out;
    out << "applicant,rater,score\n";
    char buf[64];
    for (std::size_t i = 0; i < table.n_applicants(); ++i) {
        for (std::size_t r = 0; r < table.scores[i].size(); ++r) {
            const auto res = std::to_chars(buf, buf + sizeof buf, table.scores[i][r]);
            out << table.applicant_ids[i] << ",r" << r + 1 << ',' << std::string_view(buf, res.ptr - buf) << '\n';
        }
    }
    return out.str();
}

} // namespace irrsel
