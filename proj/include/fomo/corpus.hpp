#pragma once

// Topic prevalence models, synthetic multi-label corpora, and the JSON-lines
// corpus file format:
//
//   {"format":"fomo-corpus","version":1,"topic_count":<m>}
//   {"doc_id":"<string>","topics":[<int>,...]}
//   ...
//
// One document per line after the header, topics ascending without
// duplicates, UTF-8, '\n' line endings. Line order is accession order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "fomo/errors.hpp"
#include "fomo/random.hpp"

namespace fomo::corpus {

using TopicId = std::uint32_t;

// Marginal probability that a document carries each topic. Documents are
// multi-label, so the prevalences need not sum to one.
struct TopicDistribution {
    std::vector<double> prevalences;

    std::size_t size() const noexcept { return prevalences.size(); }

    void validate() const {
        if (prevalences.empty()) throw DomainError("topic distribution is empty");
        for (double q : prevalences) {
            if (!(q > 0.0 && q <= 1.0)) {
                throw DomainError("topic prevalence must lie in (0, 1], got " + std::to_string(q));
            }
        }
    }

    // Probability that a draw carries no topic at all.
    double empty_probability() const {
        double log_empty = 0.0;
        for (double q : prevalences) {
            if (q >= 1.0) return 0.0;
            log_empty += std::log1p(-q);
        }
        return std::exp(log_empty);
    }

    // Expected topics per document once empty draws are rejected.
    double mean_topics_per_document() const {
        double total = 0.0;
        for (double q : prevalences) total += q;
        return total / (1.0 - empty_probability());
    }

    bool operator==(const TopicDistribution&) const = default;
};

// Zipf-Mandelbrot prevalences q_i = max * ((1+offset)/(i+1+offset))^s, with s
// chosen so that q_0 = max and q_{m-1} = min. offset = 0 is plain Zipf.
inline TopicDistribution zipf_mandelbrot_prevalences(std::size_t topic_count, double max_prevalence,
                                                     double min_prevalence, double offset) {
    detail::require_domain(topic_count >= 2, "topic_count must be >= 2");
    detail::require_domain(min_prevalence > 0.0 && min_prevalence <= max_prevalence &&
                               max_prevalence <= 1.0,
                           "prevalences must satisfy 0 < min <= max <= 1");
    detail::require_domain(offset >= 0.0 && std::isfinite(offset), "offset must be >= 0");
    const double m = static_cast<double>(topic_count);
    const double exponent =
        std::log(max_prevalence / min_prevalence) / std::log((m + offset) / (1.0 + offset));
    TopicDistribution dist;
    dist.prevalences.resize(topic_count);
    for (std::size_t i = 0; i < topic_count; ++i) {
        const double rank = static_cast<double>(i) + 1.0;
        dist.prevalences[i] = max_prevalence * std::pow((1.0 + offset) / (rank + offset), exponent);
    }
    dist.prevalences.front() = max_prevalence;
    dist.prevalences.back() = min_prevalence;
    // Pinning the endpoints must not break monotonicity through rounding.
    for (std::size_t i = 1; i < topic_count; ++i) {
        dist.prevalences[i] = std::min(dist.prevalences[i], dist.prevalences[i - 1]);
        dist.prevalences[i] = std::max(dist.prevalences[i], min_prevalence);
    }
    return dist;
}

inline TopicDistribution zipf_prevalences(std::size_t topic_count, double max_prevalence,
                                          double min_prevalence) {
    return zipf_mandelbrot_prevalences(topic_count, max_prevalence, min_prevalence, 0.0);
}

// Offset for zipf_mandelbrot_prevalences that yields the requested mean number
// of topics per (nonempty) document, holding both extremes fixed. The mean
// grows with the offset, from plain Zipf at 0 towards a geometric decay.
inline double calibrate_zipf_offset(std::size_t topic_count, double max_prevalence,
                                    double min_prevalence, double target_mean_topics) {
    auto mean_at = [&](double offset) {
        return zipf_mandelbrot_prevalences(topic_count, max_prevalence, min_prevalence, offset)
            .mean_topics_per_document();
    };
    double lo = 0.0;
    double hi = 1e6;
    const double mean_lo = mean_at(lo);
    const double mean_hi = mean_at(hi);
    if (target_mean_topics < mean_lo || target_mean_topics > mean_hi) {
        throw DomainError("target mean topics per document " + std::to_string(target_mean_topics) +
                          " is outside the reachable range [" + std::to_string(mean_lo) + ", " +
                          std::to_string(mean_hi) + "]");
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        (mean_at(mid) < target_mean_topics ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct Document {
    std::string doc_id;
    std::vector<TopicId> topics;  // ascending, unique

    bool operator==(const Document&) const = default;
};

struct Corpus {
    std::vector<Document> documents;  // accession order
    std::size_t topic_count = 0;

    std::size_t size() const noexcept { return documents.size(); }

    // Throws ValidationError naming the offending document (1-based).
    void validate() const {
        if (topic_count == 0) throw ValidationError("topic_count must be positive", 0);
        if (documents.empty()) throw ValidationError("corpus has no documents", 0);
        for (std::size_t i = 0; i < documents.size(); ++i) {
            const auto& doc = documents[i];
            const auto where = "document " + std::to_string(i + 1) + ": ";
            if (doc.topics.empty()) throw ValidationError(where + "empty topic set", 0);
            for (std::size_t k = 0; k < doc.topics.size(); ++k) {
                if (doc.topics[k] >= topic_count) {
                    throw ValidationError(where + "topic id " + std::to_string(doc.topics[k]) +
                                              " >= topic_count " + std::to_string(topic_count),
                                          0);
                }
                if (k > 0 && doc.topics[k] <= doc.topics[k - 1]) {
                    throw ValidationError(where + "topics must be ascending without duplicates", 0);
                }
            }
        }
    }

    bool operator==(const Corpus&) const = default;
};

// Number of documents carrying each topic.
inline std::vector<std::uint64_t> topic_document_counts(const Corpus& corpus) {
    std::vector<std::uint64_t> counts(corpus.topic_count, 0);
    for (const auto& doc : corpus.documents) {
        for (TopicId t : doc.topics) ++counts[t];
    }
    return counts;
}

inline double mean_topics_per_document(const Corpus& corpus) {
    if (corpus.documents.empty()) return 0.0;
    std::uint64_t total = 0;
    for (const auto& doc : corpus.documents) total += doc.topics.size();
    return static_cast<double>(total) / static_cast<double>(corpus.size());
}

inline std::string generated_doc_id(std::uint64_t index) { return "doc-" + std::to_string(index); }

// Each document draws each topic independently with its prevalence; empty
// draws are redrawn from the same stream. Document i uses the stream
// derive_seed(seed, i), so the output does not depend on `threads`.
// Rejecting empty draws inflates every prevalence by 1 / (1 - P(empty)).
inline Corpus generate_corpus(std::uint64_t doc_count, const TopicDistribution& dist,
                              std::uint64_t seed, unsigned threads = 1) {
    detail::require_domain(doc_count >= 1, "doc_count must be >= 1");
    dist.validate();
    if (dist.empty_probability() >= 1.0 - 1e-9) {
        throw DegenerateInputError(
            "topic distribution almost never yields a nonempty document; rejection would not "
            "terminate");
    }
    Corpus corpus;
    corpus.topic_count = dist.size();
    corpus.documents.resize(doc_count);

    auto fill = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            Xoshiro256 gen(derive_seed(seed, i));
            auto& doc = corpus.documents[i];
            doc.doc_id = generated_doc_id(i);
            while (doc.topics.empty()) {
                for (std::size_t t = 0; t < dist.size(); ++t) {
                    if (uniform01(gen) < dist.prevalences[t]) {
                        doc.topics.push_back(static_cast<TopicId>(t));
                    }
                }
            }
        }
    };

    threads = std::max(1u, threads);
    if (threads == 1 || doc_count < 2 * threads) {
        fill(0, doc_count);
        return corpus;
    }
    std::vector<std::jthread> workers;
    const std::uint64_t chunk = (doc_count + threads - 1) / threads;
    for (std::uint64_t begin = 0; begin < doc_count; begin += chunk) {
        workers.emplace_back(fill, begin, std::min(doc_count, begin + chunk));
    }
    return corpus;
}

// ---------------------------------------------------------------------------
// JSON-lines I/O

inline constexpr const char* kCorpusFormat = "fomo-corpus";
inline constexpr int kCorpusVersion = 1;

inline void write_corpus(const Corpus& corpus, std::ostream& out) {
    corpus.validate();
    nlohmann::ordered_json header;
    header["format"] = kCorpusFormat;
    header["version"] = kCorpusVersion;
    header["topic_count"] = corpus.topic_count;
    out << header.dump() << '\n';
    for (const auto& doc : corpus.documents) {
        nlohmann::ordered_json line;
        line["doc_id"] = doc.doc_id;
        line["topics"] = doc.topics;
        try {
            out << line.dump() << '\n';
        } catch (const nlohmann::json::exception&) {
            throw ValidationError("doc_id '" + doc.doc_id + "' is not valid UTF-8", 0);
        }
    }
}

inline void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_corpus(corpus, out);
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

namespace detail {

inline nlohmann::json parse_line(const std::string& text, std::size_t line_no) {
    try {
        auto value = nlohmann::json::parse(text);
        if (!value.is_object()) throw ParseError("expected a JSON object", line_no);
        return value;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
}

}  // namespace detail

inline Corpus read_corpus(std::istream& in) {
    std::string text;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, text)) return false;
        ++line_no;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        return true;
    };

    if (!next_line()) throw ParseError("missing header line", 1);
    const auto header = detail::parse_line(text, line_no);
    const auto format = header.find("format");
    if (format == header.end() || *format != kCorpusFormat) {
        throw ParseError("header must declare \"format\":\"fomo-corpus\"", line_no);
    }
    const auto version = header.find("version");
    if (version == header.end() || !version->is_number_integer() || *version != kCorpusVersion) {
        throw ParseError("unsupported corpus version", line_no);
    }
    const auto topic_count = header.find("topic_count");
    if (topic_count == header.end() || !topic_count->is_number_unsigned() || *topic_count == 0) {
        throw ParseError("header needs a positive integer topic_count", line_no);
    }

    Corpus corpus;
    corpus.topic_count = topic_count->get<std::size_t>();
    while (next_line()) {
        if (text.empty()) {
            // Only a trailing newline may leave an empty final line.
            if (in.peek() == std::char_traits<char>::eof()) break;
            throw ParseError("empty line", line_no);
        }
        const auto value = detail::parse_line(text, line_no);
        const auto id = value.find("doc_id");
        if (id == value.end() || !id->is_string()) throw ParseError("doc_id must be a string", line_no);
        const auto topics = value.find("topics");
        if (topics == value.end() || !topics->is_array()) {
            throw ParseError("topics must be an array", line_no);
        }
        Document doc;
        doc.doc_id = id->get<std::string>();
        doc.topics.reserve(topics->size());
        for (const auto& t : *topics) {
            if (!t.is_number_unsigned()) {
                throw ParseError("topic ids must be nonnegative integers", line_no);
            }
            const auto topic = t.get<std::uint64_t>();
            if (topic >= corpus.topic_count) {
                throw ValidationError("topic id " + std::to_string(topic) + " >= topic_count " +
                                          std::to_string(corpus.topic_count),
                                      line_no);
            }
            if (!doc.topics.empty() && topic <= doc.topics.back()) {
                throw ValidationError("topics must be ascending without duplicates", line_no);
            }
            doc.topics.push_back(static_cast<TopicId>(topic));
        }
        if (doc.topics.empty()) throw ValidationError("document has an empty topic set", line_no);
        corpus.documents.push_back(std::move(doc));
    }
    if (in.bad()) throw IoError("read failure");
    if (corpus.documents.empty()) throw ValidationError("corpus has no documents", 0);
    return corpus;
}

inline Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return read_corpus(in);
    } catch (const ParseError& e) {
        throw ParseError(e.message(), e.line(), path.string());
    } catch (const ValidationError& e) {
        throw ValidationError(e.message(), e.line(), path.string());
    }
}

}  // namespace fomo::corpus
