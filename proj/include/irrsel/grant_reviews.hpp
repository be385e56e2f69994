#pragma once

// Published reliability summaries of grant peer-review procedures.

#include <array>
#include <string>
#include <vector>

#include "irrsel/format.hpp"

namespace irrsel {

struct GrantReviewRecord {
    std::string study;     // source of the reliability estimate
    std::string proposals; // agency and period
    int n_proposals = 0;
    double irr1_low = 0.0;
    double irr1_high = 0.0;
    std::vector<double> j_values; // average ratings per proposal; two review tracks for COSPUP
    double p_low = 0.0;           // selected proportion (range)
    double p_high = 0.0;
};

inline const std::vector<GrantReviewRecord>& grant_review_table() {
    static const std::vector<GrantReviewRecord> table = {
        {"Cicchetti (1991)", "NSF & COSPUP (1985)", 150, 0.18, 0.37, {4.24, 4.04}, 0.51, 0.51},
        {"Mutz et al. (2012)", "FWF (1999-04)", 8329, 0.26, 0.26, {2.82}, 0.32, 0.53},
        {"Carpenter et al. (2015)", "AIBS (2009-11)", 260, 0.14, 0.41, {2.0}, 0.05, 0.11},
        {"Erosheva et al. (2021)", "AIBS (2014-17)", 72, 0.37, 0.37, {3.0}, 0.34, 0.38},
        {"Erosheva et al. (2021)", "NIH (2014-16)", 2076, 0.34, 0.34, {2.79}, 0.18, 0.18},
    };
    return table;
}

/// One evaluable (irr1, j) combination of a record. Range-valued reliabilities
/// expand to both endpoints; the lower one is flagged.
struct GrantReviewVariant {
    const GrantReviewRecord* record = nullptr;
    double irr1 = 0.0;
    double j = 1.0;
    bool lower_irr = false;

    [[nodiscard]] std::string label() const {
        return record->proposals + " irr1=" + format_shortest(irr1) + " J=" + format_shortest(j);
    }
};

inline std::vector<GrantReviewVariant> expand_variants(const std::vector<GrantReviewRecord>& table) {
    std::vector<GrantReviewVariant> out;
    for (const auto& rec : table) {
        std::vector<double> irrs = {rec.irr1_low};
        if (rec.irr1_high != rec.irr1_low) irrs.push_back(rec.irr1_high);
        for (double irr : irrs) {
            for (double j : rec.j_values) {
                out.push_back({&rec, irr, j, irrs.size() > 1 && irr == rec.irr1_low});
            }
        }
    }
    return out;
}

} // namespace irrsel
