#pragma once

// CSV (RFC 4180, header row, '\n' records) and JSON renderings of results.
// Numbers are written in shortest round-trip form; percent columns use fixed
// decimals per column (prevalence 4, probabilities 2, final confidence 3).

#include <charconv>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fomo/analytic.hpp"
#include "fomo/collector.hpp"
#include "fomo/simulation.hpp"

namespace fomo::report {

using nlohmann::ordered_json;

inline std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

// 0.026356 -> "2.636%" at 3 decimals.
inline std::string format_percent(double fraction, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f%%", decimals, fraction * 100.0);
    return buf;
}

inline constexpr int kPrevalencePercentDecimals = 4;
inline constexpr int kMissedProbPercentDecimals = 2;
inline constexpr int kFomoPercentDecimals = 3;

inline std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(std::initializer_list<std::string> fields) {
        bool first = true;
        for (const auto& f : fields) {
            if (!first) out_ << ',';
            out_ << csv_field(f);
            first = false;
        }
        out_ << '\n';
    }

private:
    std::ostream& out_;
};

// --- recall table -----------------------------------------------------------

inline void write_table_csv(std::span<const analytic::FomoRow> rows, std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"produced_count", "confidence", "prevalence_bound", "prevalence_bound_pct", "recall",
             "missed_count", "prob_in_missed", "prob_in_missed_pct", "fomo_confidence",
             "fomo_confidence_pct"});
    for (const auto& r : rows) {
        csv.row({std::to_string(r.scenario.produced_count), format_number(r.scenario.confidence),
                 format_number(r.prevalence_bound),
                 format_percent(r.prevalence_bound, kPrevalencePercentDecimals),
                 format_number(r.scenario.recall), std::to_string(r.missed_count),
                 format_number(r.prob_in_missed),
                 format_percent(r.prob_in_missed, kMissedProbPercentDecimals),
                 format_number(r.fomo_confidence),
                 format_percent(r.fomo_confidence, kFomoPercentDecimals)});
    }
}

inline ordered_json table_json(std::span<const analytic::FomoRow> rows) {
    ordered_json doc;
    doc["format"] = "fomo-table";
    doc["version"] = 1;
    auto& list = doc["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json row;
        row["produced_count"] = r.scenario.produced_count;
        row["confidence"] = r.scenario.confidence;
        row["prevalence_bound"] = r.prevalence_bound;
        row["recall"] = r.scenario.recall;
        row["missed_count"] = r.missed_count;
        row["prob_in_missed"] = r.prob_in_missed;
        row["fomo_confidence"] = r.fomo_confidence;
        list.push_back(std::move(row));
    }
    return doc;
}

// --- coverage curve ---------------------------------------------------------

inline void write_curve_csv(const simulation::CoverageCurve& curve, std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"documents_scanned", "distinct_topics_seen"});
    for (const auto& p : curve.points) {
        csv.row({std::to_string(p.documents_scanned), std::to_string(p.distinct_topics_seen)});
    }
}

inline ordered_json curve_json(const simulation::CoverageCurve& curve) {
    ordered_json doc;
    doc["format"] = "fomo-curve";
    doc["version"] = 1;
    doc["total_documents"] = curve.total_documents;
    doc["total_topics_present"] = curve.total_topics_present;
    auto& points = doc["points"] = ordered_json::array();
    for (const auto& p : curve.points) points.push_back({p.documents_scanned, p.distinct_topics_seen});
    return doc;
}

// --- shuffle summary --------------------------------------------------------

inline void write_histogram_csv(const simulation::SimulationSummary& summary, std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"bin_lower", "bin_upper", "count"});
    for (const auto& b : summary.histogram) {
        csv.row({format_number(b.lower), format_number(b.upper), std::to_string(b.count)});
    }
}

inline ordered_json summary_json(const simulation::SimulationSummary& s) {
    ordered_json doc;
    doc["format"] = "fomo-summary";
    doc["version"] = 1;
    doc["trial_count"] = s.trial_count;
    doc["seed"] = s.seed;
    doc["corpus_documents"] = s.corpus_documents;
    doc["topics_present"] = s.topics_present;
    doc["min_completion"] = s.min_completion;
    doc["max_completion"] = s.max_completion;
    doc["median_completion"] = s.median_completion;
    doc["mean_completion"] = s.mean_completion;
    auto& percentiles = doc["percentiles"] = ordered_json::object();
    auto& recall = doc["recall_at"] = ordered_json::object();
    for (const auto& q : s.percentiles) {
        percentiles[format_number(q.quantile)] = q.position;
        recall[format_number(q.quantile)] = q.recall;
    }
    doc["rarest_topic_completion_fraction"] = s.rarest_topic_completion_fraction;
    auto& hist = doc["histogram"] = ordered_json::array();
    for (const auto& b : s.histogram) {
        ordered_json bin;
        bin["bin_lower"] = b.lower;
        bin["bin_upper"] = b.upper;
        bin["count"] = b.count;
        hist.push_back(std::move(bin));
    }
    return doc;
}

inline ordered_json comparison_json(const simulation::AnalyticComparison& c) {
    ordered_json doc;
    doc["format"] = "fomo-compare";
    doc["version"] = 1;
    doc["analytic_mean"] = c.analytic_mean;
    doc["empirical_mean"] = c.empirical_mean;
    doc["mean_relative_difference"] = c.mean_relative_difference;
    doc["analytic_median"] = c.analytic_median;
    doc["empirical_median"] = c.empirical_median;
    doc["median_relative_difference"] = c.median_relative_difference;
    auto& rows = doc["quantiles"] = ordered_json::array();
    for (const auto& q : c.quantiles) {
        ordered_json row;
        row["quantile"] = q.quantile;
        row["analytic"] = q.analytic;
        row["empirical"] = q.empirical;
        row["relative_difference"] = q.relative_difference;
        rows.push_back(std::move(row));
    }
    return doc;
}

inline void write_comparison_csv(const simulation::AnalyticComparison& c, std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"statistic", "analytic", "empirical", "relative_difference"});
    csv.row({"mean", format_number(c.analytic_mean), format_number(c.empirical_mean),
             format_number(c.mean_relative_difference)});
    csv.row({"median", std::to_string(c.analytic_median), std::to_string(c.empirical_median),
             format_number(c.median_relative_difference)});
    for (const auto& q : c.quantiles) {
        csv.row({"q" + format_number(q.quantile), std::to_string(q.analytic),
                 std::to_string(q.empirical), format_number(q.relative_difference)});
    }
}

}  // namespace fomo::report
