#pragma once

// Scan a corpus for topics: once in accession order, and many times after
// uniform random shuffles. Only topic sets are read.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fomo/collector.hpp"
#include "fomo/corpus.hpp"
#include "fomo/errors.hpp"
#include "fomo/random.hpp"

namespace fomo::simulation {

using corpus::Corpus;
using corpus::TopicId;

struct CoveragePoint {
    std::uint64_t documents_scanned = 0;
    std::uint64_t distinct_topics_seen = 0;

    bool operator==(const CoveragePoint&) const = default;
};

// Cumulative distinct topics, one point per increase.
struct CoverageCurve {
    std::vector<CoveragePoint> points;
    std::uint64_t total_documents = 0;
    std::uint64_t total_topics_present = 0;
};

inline CoverageCurve scan_accession(const Corpus& corpus) {
    detail::require_domain(!corpus.documents.empty(), "cannot scan an empty corpus");
    CoverageCurve curve;
    curve.total_documents = corpus.size();
    std::vector<bool> seen(corpus.topic_count, false);
    std::uint64_t distinct = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const std::uint64_t before = distinct;
        for (TopicId t : corpus.documents[i].topics) {
            if (!seen[t]) {
                seen[t] = true;
                ++distinct;
            }
        }
        if (distinct > before) curve.points.push_back({i + 1, distinct});
    }
    curve.total_topics_present = distinct;
    return curve;
}

struct TrialResult {
    // Documents scanned when the last present topic first appeared.
    std::uint64_t completion_position = 0;
    // Indexed by topic id; 0 for topics absent from the corpus.
    std::vector<std::uint64_t> first_seen;
    std::vector<TopicId> absent_topics;
    // Topics first seen at completion_position (more than one when the last
    // document revealed several new topics at once).
    std::vector<TopicId> completing_topics;
};

// Reusable state for shuffle trials over one corpus. Shuffling is the
// forward Fisher-Yates pass (position j takes a uniform pick from positions
// j..n-1), which fixes the order front to back; a trial stops as soon as
// every present topic has been seen, and the prefix it scanned is exactly
// the prefix of the full permutation for that seed.
class ShuffleScanner {
public:
    explicit ShuffleScanner(const Corpus& corpus) : corpus_(&corpus) {
        detail::require_domain(!corpus.documents.empty(), "cannot shuffle an empty corpus");
        const auto counts = corpus::topic_document_counts(corpus);
        for (std::size_t t = 0; t < counts.size(); ++t) {
            if (counts[t] == 0) {
                absent_.push_back(static_cast<TopicId>(t));
            } else {
                ++present_;
            }
        }
        detail::require_domain(present_ > 0, "corpus contains no topics");
    }

    std::uint64_t topics_present() const noexcept { return present_; }
    std::span<const TopicId> absent_topics() const noexcept { return absent_; }

    TrialResult run(std::uint64_t trial_seed) {
        const auto& docs = corpus_->documents;
        const std::uint64_t n = docs.size();
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), std::uint32_t{0});

        TrialResult result;
        result.first_seen.assign(corpus_->topic_count, 0);
        result.absent_topics = absent_;
        Xoshiro256 gen(trial_seed);
        std::uint64_t found = 0;
        for (std::uint64_t j = 0; j < n && found < present_; ++j) {
            const std::uint64_t k = j + uniform_below(gen, n - j);
            std::swap(order_[j], order_[k]);
            for (TopicId t : docs[order_[j]].topics) {
                if (result.first_seen[t] == 0) {
                    result.first_seen[t] = j + 1;
                    ++found;
                    if (found == present_) result.completion_position = j + 1;
                }
            }
        }
        for (std::size_t t = 0; t < result.first_seen.size(); ++t) {
            if (result.first_seen[t] == result.completion_position) {
                result.completing_topics.push_back(static_cast<TopicId>(t));
            }
        }
        return result;
    }

private:
    const Corpus* corpus_;
    std::vector<std::uint32_t> order_;
    std::vector<TopicId> absent_;
    std::uint64_t present_ = 0;
};

inline TrialResult shuffle_trial(const Corpus& corpus, std::uint64_t trial_seed) {
    ShuffleScanner scanner(corpus);
    return scanner.run(trial_seed);
}

// ---------------------------------------------------------------------------

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::uint64_t count = 0;
};

struct QuantileValue {
    double quantile = 0.0;
    std::uint64_t position = 0;
    double recall = 0.0;  // position / corpus size
};

struct SimulationSummary {
    std::uint64_t trial_count = 0;
    std::uint64_t seed = 0;
    std::uint64_t corpus_documents = 0;
    std::uint64_t topics_present = 0;
    std::vector<HistogramBin> histogram;
    std::vector<QuantileValue> percentiles;  // ascending quantile
    std::uint64_t min_completion = 0;
    std::uint64_t max_completion = 0;
    std::uint64_t median_completion = 0;
    double mean_completion = 0.0;
    // Share of trials completed by a topic with the fewest documents.
    double rarest_topic_completion_fraction = 0.0;
    // By trial index; not part of the serialized summary.
    std::vector<std::uint64_t> completions;
};

struct ShuffleOptions {
    std::uint64_t trial_count = 2000;
    std::uint64_t master_seed = 0;
    std::vector<double> quantiles{0.10, 0.20, 0.50, 0.95};
    std::size_t bin_count = 20;
    unsigned threads = 0;  // 0: default_thread_count()
};

// hardware_concurrency, capped by FOMO_THREADS when that holds a positive integer.
inline unsigned default_thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FOMO_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

// Nearest-rank: the ceil(q n)-th smallest value, 1-based.
inline std::uint64_t nearest_rank(std::span<const std::uint64_t> sorted, double q) {
    detail::require_domain(!sorted.empty(), "no samples");
    const double rank = std::ceil(q * static_cast<double>(sorted.size()) - 1e-9);
    const auto index = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(sorted.size())));
    return sorted[index - 1];
}

// bin_count equal-width bins over [lo, hi]; values equal to hi land in the last.
inline std::vector<HistogramBin> equal_width_histogram(std::span<const std::uint64_t> values,
                                                       std::uint64_t lo, std::uint64_t hi,
                                                       std::size_t bin_count) {
    detail::require_domain(bin_count >= 1, "bin_count must be >= 1");
    std::vector<HistogramBin> bins(bin_count);
    const double width = static_cast<double>(hi - lo) / static_cast<double>(bin_count);
    for (std::size_t b = 0; b < bin_count; ++b) {
        bins[b].lower = static_cast<double>(lo) + width * static_cast<double>(b);
        bins[b].upper = b + 1 == bin_count ? static_cast<double>(hi)
                                           : static_cast<double>(lo) + width * static_cast<double>(b + 1);
    }
    for (std::uint64_t v : values) {
        std::size_t b = 0;
        if (width > 0.0) {
            b = static_cast<std::size_t>(static_cast<double>(v - lo) / width);
            b = std::min(b, bin_count - 1);
        }
        ++bins[b].count;
    }
    return bins;
}

// Per-trial seeds are derive_seed(master_seed, trial_index). Trials run on
// `threads` workers and are merged by index, so the summary is the same at
// any degree of parallelism.
inline SimulationSummary run_shuffles(const Corpus& corpus, const ShuffleOptions& options) {
    detail::require_domain(options.trial_count >= 1, "trial_count must be >= 1");
    detail::require_domain(options.bin_count >= 1, "bin_count must be >= 1");
    for (double q : options.quantiles) {
        detail::require_domain(q > 0.0 && q < 1.0, "quantiles must lie in (0, 1)");
    }
    detail::require_domain(!corpus.documents.empty(), "cannot shuffle an empty corpus");

    const auto counts = corpus::topic_document_counts(corpus);
    std::uint64_t fewest = std::numeric_limits<std::uint64_t>::max();
    for (std::uint64_t c : counts) {
        if (c > 0) fewest = std::min(fewest, c);
    }

    const std::uint64_t trials = options.trial_count;
    std::vector<std::uint64_t> completions(trials);
    std::vector<char> rarest_completed(trials, 0);
    std::atomic<std::uint64_t> next{0};
    std::uint64_t topics_present = 0;

    auto worker = [&] {
        ShuffleScanner scanner(corpus);
        for (std::uint64_t i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) {
            const auto trial = scanner.run(derive_seed(options.master_seed, i));
            completions[i] = trial.completion_position;
            rarest_completed[i] = std::any_of(trial.completing_topics.begin(),
                                              trial.completing_topics.end(),
                                              [&](TopicId t) { return counts[t] == fewest; });
        }
    };

    {
        ShuffleScanner probe(corpus);  // validates before any worker starts
        topics_present = probe.topics_present();
    }
    const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(
        options.threads == 0 ? default_thread_count() : options.threads, trials));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    SimulationSummary summary;
    summary.trial_count = trials;
    summary.seed = options.master_seed;
    summary.corpus_documents = corpus.size();
    summary.topics_present = topics_present;

    std::vector<std::uint64_t> sorted = completions;
    std::sort(sorted.begin(), sorted.end());
    summary.min_completion = sorted.front();
    summary.max_completion = sorted.back();
    summary.median_completion = nearest_rank(sorted, 0.5);
    double total = 0.0;
    for (std::uint64_t c : completions) total += static_cast<double>(c);
    summary.mean_completion = total / static_cast<double>(trials);
    summary.rarest_topic_completion_fraction =
        static_cast<double>(std::count(rarest_completed.begin(), rarest_completed.end(), 1)) /
        static_cast<double>(trials);

    std::vector<double> qs = options.quantiles;
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    for (double q : qs) {
        const std::uint64_t pos = nearest_rank(sorted, q);
        summary.percentiles.push_back(
            {q, pos, static_cast<double>(pos) / static_cast<double>(corpus.size())});
    }
    summary.histogram =
        equal_width_histogram(sorted, summary.min_completion, summary.max_completion, options.bin_count);
    summary.completions = std::move(completions);
    return summary;
}

inline SimulationSummary run_shuffles(const Corpus& corpus, std::uint64_t trial_count,
                                      std::uint64_t master_seed, std::vector<double> quantiles,
                                      std::size_t bin_count) {
    ShuffleOptions options;
    options.trial_count = trial_count;
    options.master_seed = master_seed;
    options.quantiles = std::move(quantiles);
    options.bin_count = bin_count;
    return run_shuffles(corpus, options);
}

// ---------------------------------------------------------------------------

struct QuantileComparison {
    double quantile = 0.0;
    std::uint64_t analytic = 0;
    std::uint64_t empirical = 0;
    double relative_difference = 0.0;  // (analytic - empirical) / empirical
};

// Shuffle results next to the with-replacement, independent-topic model fed
// with the corpus's own topic frequencies.
struct AnalyticComparison {
    std::vector<double> empirical_prevalences;  // present topics only
    double analytic_mean = 0.0;
    double empirical_mean = 0.0;
    double mean_relative_difference = 0.0;
    std::uint64_t analytic_median = 0;
    std::uint64_t empirical_median = 0;
    double median_relative_difference = 0.0;
    std::vector<QuantileComparison> quantiles;
};

inline AnalyticComparison completion_vs_analytic(const Corpus& corpus,
                                                 const SimulationSummary& summary) {
    detail::require_domain(summary.corpus_documents == corpus.size(),
                           "summary was produced from a corpus of a different size");
    AnalyticComparison cmp;
    const double n = static_cast<double>(corpus.size());
    for (std::uint64_t c : corpus::topic_document_counts(corpus)) {
        if (c > 0) cmp.empirical_prevalences.push_back(static_cast<double>(c) / n);
    }
    const auto& prev = cmp.empirical_prevalences;
    cmp.analytic_mean = collector::expected_scan_length(prev, 1e-6);
    cmp.empirical_mean = summary.mean_completion;
    cmp.mean_relative_difference = (cmp.analytic_mean - cmp.empirical_mean) / cmp.empirical_mean;
    cmp.analytic_median = collector::completion_quantile(prev, 0.5);
    cmp.empirical_median = summary.median_completion;
    cmp.median_relative_difference =
        (static_cast<double>(cmp.analytic_median) - static_cast<double>(cmp.empirical_median)) /
        static_cast<double>(cmp.empirical_median);
    for (const auto& pq : summary.percentiles) {
        QuantileComparison row;
        row.quantile = pq.quantile;
        row.analytic = collector::completion_quantile(prev, pq.quantile);
        row.empirical = pq.position;
        row.relative_difference =
            (static_cast<double>(row.analytic) - static_cast<double>(row.empirical)) /
            static_cast<double>(row.empirical);
        cmp.quantiles.push_back(row);
    }
    return cmp;
}

}  // namespace fomo::simulation
