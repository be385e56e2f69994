#pragma once

// Long-format rating data and its validated, applicant-grouped form.

#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "irrsel/error.hpp"

namespace irrsel {

struct RatingRecord {
    std::string applicant;
    std::string rater;
    double score = 0.0;
    std::size_t row = 0; // 1-based source row; 0 when not read from a file
};

/// Observed ratings as read, one record per (applicant, rater) pair.
struct RatingsTable {
    std::vector<RatingRecord> records;
};

/// Ratings grouped by applicant, in order of first appearance.
struct ValidatedRatings {
    std::vector<std::string> applicant_ids;
    std::vector<std::vector<double>> scores; // scores[i] are applicant i's ratings

    [[nodiscard]] std::size_t n_applicants() const noexcept { return scores.size(); }

    [[nodiscard]] std::size_t n_ratings() const noexcept {
        std::size_t total = 0;
        for (const auto& s : scores) total += s.size();
        return total;
    }

    [[nodiscard]] double mean_ratings() const noexcept {
        return scores.empty() ? 0.0 : static_cast<double>(n_ratings()) / static_cast<double>(scores.size());
    }

    /// Common rating count, or 0 when applicants differ in how often they were rated.
    [[nodiscard]] std::size_t balanced_count() const noexcept {
        if (scores.empty()) return 0;
        const std::size_t j = scores.front().size();
        for (const auto& s : scores) {
            if (s.size() != j) return 0;
        }
        return j;
    }
};

namespace detail {

inline void check_estimable(const ValidatedRatings& table) {
    if (table.n_applicants() < 2) {
        throw Error(ErrorKind::invalid_input, "measurement", "at least 2 applicants are required");
    }
    bool any_repeated = false;
    for (const auto& s : table.scores) any_repeated = any_repeated || s.size() >= 2;
    if (!any_repeated) {
        throw Error(ErrorKind::degenerate_data, "measurement",
                    "every applicant is rated once; error variance is inestimable");
    }
}

} // namespace detail

/// Checks the table and groups it by applicant.
inline ValidatedRatings validate_ratings(const RatingsTable& raw) {
    ValidatedRatings out;
    std::unordered_map<std::string, std::size_t> index;
    std::map<std::pair<std::string, std::string>, const RatingRecord*> seen;

    for (const auto& rec : raw.records) {
        if (!std::isfinite(rec.score)) {
            throw Error(ErrorKind::invalid_input, "measurement",
                        "non-finite score for applicant '" + rec.applicant + "', rater '" + rec.rater + "'");
        }
        auto [it, inserted] = seen.emplace(std::make_pair(rec.applicant, rec.rater), &rec);
        if (!inserted) {
            std::string where;
            if (it->second->row != 0 && rec.row != 0) {
                where = " (rows " + std::to_string(it->second->row) + " and " + std::to_string(rec.row) + ")";
            }
            throw Error(ErrorKind::invalid_input, "measurement",
                        "duplicate rating pair: applicant '" + rec.applicant + "', rater '" + rec.rater + "'" +
                            where);
        }
        auto [pos, fresh] = index.emplace(rec.applicant, out.scores.size());
        if (fresh) {
            out.applicant_ids.push_back(rec.applicant);
            out.scores.emplace_back();
        }
        out.scores[pos->second].push_back(rec.score);
    }
    detail::check_estimable(out);
    return out;
}

struct ApplicantMean {
    std::string applicant;
    double mean_score = 0.0;
};

inline std::vector<ApplicantMean> aggregate_scores(const ValidatedRatings& table) {
    std::vector<ApplicantMean> out;
    out.reserve(table.n_applicants());
    for (std::size_t i = 0; i < table.n_applicants(); ++i) {
        const auto& s = table.scores[i];
        out.push_back({table.applicant_ids[i], std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size())});
    }
    return out;
}

} // namespace irrsel
