#pragma once

// Closed-form probabilities for the "did the search miss a topic?" question.
//
// A search identified N relevant documents at recall R. A topic never seen in
// those N documents has, at confidence C, a prevalence no larger than
// p = 1 - (1-C)^(1/N). The missed set holds M = floor(N (1-R) / R) relevant
// documents, and such a topic appears there with probability 1 - (1-p)^M.
// Weighting by the 1-C mass that the bound leaves uncovered gives the chance
// that a novel topic sits in the missed set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fomo/errors.hpp"

namespace fomo::analytic {

struct RecallScenario {
    std::uint64_t produced_count = 0;  // relevant documents identified
    double recall = 0.0;               // (0, 1]
    double confidence = 0.0;           // (0, 1)

    void validate() const {
        detail::require_domain(produced_count >= 1, "produced_count must be >= 1");
        detail::require_domain(recall > 0.0 && recall <= 1.0, "recall must lie in (0, 1]");
        detail::require_domain(confidence > 0.0 && confidence < 1.0,
                               "confidence must lie in (0, 1)");
    }
};

struct FomoRow {
    RecallScenario scenario;
    double prevalence_bound = 0.0;
    std::uint64_t missed_count = 0;
    double prob_in_missed = 0.0;
    double fomo_confidence = 0.0;
};

// Probability that a topic of the given prevalence is first seen in the k-th
// document scanned: (1-p)^(k-1) p.
inline double first_discovery_pmf(double prevalence, std::uint64_t k) {
    detail::require_domain(prevalence > 0.0 && prevalence <= 1.0,
                           "prevalence must lie in (0, 1]");
    detail::require_domain(k >= 1, "k must be >= 1");
    if (prevalence == 1.0) return k == 1 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(k - 1) * std::log1p(-prevalence)) * prevalence;
}

// Largest prevalence consistent, at `confidence`, with zero sightings in
// `n_identified` documents; solves (1-p)^n = 1 - confidence.
inline double prevalence_upper_bound(std::uint64_t n_identified, double confidence) {
    detail::require_domain(n_identified >= 1, "n_identified must be >= 1");
    detail::require_domain(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0, 1)");
    return -std::expm1(std::log1p(-confidence) / static_cast<double>(n_identified));
}

// floor(n (1-R) / R). Quotients within 1e-9 relative of an integer snap to it,
// so that decimal recalls such as 0.8 give 12500 rather than 12499.
inline std::uint64_t missed_set_size(std::uint64_t n_identified, double recall) {
    detail::require_domain(recall > 0.0 && recall <= 1.0, "recall must lie in (0, 1]");
    const double exact = static_cast<double>(n_identified) * (1.0 - recall) / recall;
    const double nearest = std::round(exact);
    if (std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact)) {
        return static_cast<std::uint64_t>(nearest);
    }
    return static_cast<std::uint64_t>(std::floor(exact));
}

// Probability that a topic of the given prevalence occurs at least once among
// `missed_count` documents.
inline double novel_topic_prob_in_missed(double prevalence, std::uint64_t missed_count) {
    detail::require_domain(prevalence >= 0.0 && prevalence <= 1.0,
                           "prevalence must lie in [0, 1]");
    if (missed_count == 0 || prevalence == 0.0) return 0.0;
    if (prevalence == 1.0) return 1.0;
    return -std::expm1(static_cast<double>(missed_count) * std::log1p(-prevalence));
}

inline FomoRow fomo_confidence(const RecallScenario& scenario) {
    scenario.validate();
    FomoRow row;
    row.scenario = scenario;
    row.prevalence_bound = prevalence_upper_bound(scenario.produced_count, scenario.confidence);
    row.missed_count = missed_set_size(scenario.produced_count, scenario.recall);
    // 1 - (1-p)^M with log(1-p) = log(1-C)/N taken directly, which is
    // 1 - (1-C)^(M/N) without the round trip through p. M/N is formed first
    // so equal ratios give bit-identical rows at every N.
    const double alpha = 1.0 - scenario.confidence;
    const double ratio = static_cast<double>(row.missed_count) /
                         static_cast<double>(scenario.produced_count);
    const double log_miss = ratio * std::log1p(-scenario.confidence);
    row.prob_in_missed = row.missed_count == 0 ? 0.0 : -std::expm1(log_miss);
    row.fomo_confidence = alpha * row.prob_in_missed;
    return row;
}

inline std::vector<FomoRow> fomo_table(std::span<const RecallScenario> scenarios) {
    std::vector<FomoRow> rows;
    rows.reserve(scenarios.size());
    for (const auto& s : scenarios) rows.push_back(fomo_confidence(s));
    return rows;
}

// Cartesian product, recall-major:
// every production size at the first recall, then the next recall, ...
inline std::vector<RecallScenario> scenario_grid(std::span<const std::uint64_t> produced,
                                                 std::span<const double> recalls,
                                                 double confidence) {
    std::vector<RecallScenario> out;
    out.reserve(produced.size() * recalls.size());
    for (double r : recalls) {
        for (std::uint64_t n : produced) out.push_back({n, r, confidence});
    }
    return out;
}

}  // namespace fomo::analytic
