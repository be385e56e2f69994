#pragma once

#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "irrsel/ratings.hpp"

namespace irrsel::test {

inline RatingsTable make_table(const std::vector<std::vector<double>>& scores) {
    RatingsTable t;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        for (std::size_t r = 0; r < scores[i].size(); ++r) {
            t.records.push_back({"a" + std::to_string(i + 1), "r" + std::to_string(r + 1), scores[i][r], 0});
        }
    }
    return t;
}

inline ValidatedRatings make_ratings(const std::vector<std::vector<double>>& scores) {
    return validate_ratings(make_table(scores));
}

// Balanced one-way random-effects data with total variance 1.
inline std::vector<std::vector<double>> simulate_scores(double irr1, std::size_t n, std::size_t j, std::mt19937_64& rng,
                                                        double mu = 0.0) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<std::vector<double>> out(n, std::vector<double>(j));
    for (auto& row : out) {
        const double g = mu + std::sqrt(irr1) * z(rng);
        for (double& y : row) y = g + std::sqrt(1.0 - irr1) * z(rng);
    }
    return out;
}

inline std::string data_path(const std::string& name) {
    const char* dir = std::getenv("IRRSEL_TEST_DATA");
    return std::string(dir ? dir : "tests/data") + "/" + name;
}

} // namespace irrsel::test
