// fomo: command-line front end for the recall-risk library.
//
//   fomo table       recall table (prevalence bound, missed set, novel-topic odds)
//   fomo bound       zero-sighting prevalence bound, or first-discovery pmf
//   fomo collector   coupon collector expectations (dice, uniform, file, birthday)
//   fomo simulate    shuffle trials over a corpus file
//   fomo curve       accession-order coverage curve
//   fomo gen-corpus  synthetic Zipf corpus
//   fomo compare     shuffle results against the with-replacement model

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fomo/fomo.hpp"

namespace {

using namespace fomo;

enum class Format { csv, json };

struct OutputOptions {
    Format format = Format::csv;
    std::string path;  // empty: stdout
};

void add_output_options(CLI::App* cmd, OutputOptions& out) {
    const std::map<std::string, Format> formats{{"csv", Format::csv}, {"json", Format::json}};
    cmd->add_option("--format", out.format, "Output format: csv or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
        ->default_str("csv");
    cmd->add_option("-o,--output", out.path, "Write the report here instead of standard output");
}

void emit(const OutputOptions& out, const std::function<void(std::ostream&)>& write) {
    if (out.path.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream file(out.path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + out.path + " for writing");
    write(file);
    if (!file) throw IoError("write failed for " + out.path);
}

void write_json(std::ostream& os, const nlohmann::ordered_json& doc) { os << doc.dump(2) << '\n'; }

// --- table ------------------------------------------------------------------

struct TableArgs {
    std::vector<std::uint64_t> produced{50000, 100000, 200000};
    std::vector<double> recalls{0.8, 0.7, 0.6, 0.5};
    double confidence = 0.95;
    OutputOptions out;
};

void run_table(const TableArgs& a) {
    detail::require_domain(!a.produced.empty() && !a.recalls.empty(),
                           "--produced and --recall need at least one value");
    const auto scenarios = analytic::scenario_grid(a.produced, a.recalls, a.confidence);
    const auto rows = analytic::fomo_table(scenarios);
    emit(a.out, [&](std::ostream& os) {
        if (a.out.format == Format::json) {
            write_json(os, report::table_json(rows));
        } else {
            report::write_table_csv(rows, os);
        }
    });
}

// --- bound ------------------------------------------------------------------

struct BoundArgs {
    std::optional<std::uint64_t> identified;
    double confidence = 0.95;
    std::optional<std::uint64_t> missed;
    std::optional<double> prevalence;
    std::vector<std::uint64_t> positions{1, 2, 3};
    OutputOptions out;
};

void run_bound(const BoundArgs& a) {
    if (a.identified.has_value() == a.prevalence.has_value()) {
        throw DomainError("give exactly one of --identified or --prevalence");
    }
    if (a.prevalence) {
        std::vector<std::pair<std::uint64_t, double>> pmf;
        for (std::uint64_t k : a.positions) {
            pmf.emplace_back(k, analytic::first_discovery_pmf(*a.prevalence, k));
        }
        emit(a.out, [&](std::ostream& os) {
            if (a.out.format == Format::json) {
                nlohmann::ordered_json doc;
                doc["format"] = "fomo-first-discovery";
                doc["version"] = 1;
                doc["prevalence"] = *a.prevalence;
                auto& rows = doc["pmf"] = nlohmann::ordered_json::array();
                for (const auto& [k, p] : pmf) rows.push_back({{"k", k}, {"probability", p}});
                write_json(os, doc);
                return;
            }
            report::CsvWriter csv(os);
            csv.row({"k", "probability", "probability_pct"});
            for (const auto& [k, p] : pmf) {
                csv.row({std::to_string(k), report::format_number(p), report::format_percent(p, 0)});
            }
        });
        return;
    }

    const double bound = analytic::prevalence_upper_bound(*a.identified, a.confidence);
    std::optional<double> in_missed;
    if (a.missed) in_missed = analytic::novel_topic_prob_in_missed(bound, *a.missed);
    emit(a.out, [&](std::ostream& os) {
        if (a.out.format == Format::json) {
            nlohmann::ordered_json doc;
            doc["format"] = "fomo-bound";
            doc["version"] = 1;
            doc["identified"] = *a.identified;
            doc["confidence"] = a.confidence;
            doc["prevalence_bound"] = bound;
            doc["one_in"] = 1.0 / bound;
            if (in_missed) {
                doc["missed_count"] = *a.missed;
                doc["prob_in_missed"] = *in_missed;
            }
            write_json(os, doc);
            return;
        }
        report::CsvWriter csv(os);
        if (in_missed) {
            csv.row({"identified", "confidence", "prevalence_bound", "prevalence_bound_pct", "one_in",
                     "missed_count", "prob_in_missed"});
            csv.row({std::to_string(*a.identified), report::format_number(a.confidence),
                     report::format_number(bound),
                     report::format_percent(bound, report::kPrevalencePercentDecimals),
                     report::format_number(1.0 / bound), std::to_string(*a.missed),
                     report::format_number(*in_missed)});
        } else {
            csv.row({"identified", "confidence", "prevalence_bound", "prevalence_bound_pct", "one_in"});
            csv.row({std::to_string(*a.identified), report::format_number(a.confidence),
                     report::format_number(bound),
                     report::format_percent(bound, report::kPrevalencePercentDecimals),
                     report::format_number(1.0 / bound)});
        }
    });
}

// --- collector --------------------------------------------------------------

enum class Method { exact, sum, montecarlo };

struct CollectorArgs {
    bool dice = false;
    bool birthday = false;
    std::optional<std::uint64_t> uniform;
    std::string probs_path;
    Method method = Method::exact;
    std::uint64_t seed = 1;
    std::uint64_t trials = 100000;
    double tolerance = 1e-9;
    std::optional<double> quantile;
    OutputOptions out;
};

collector::CouponDistribution read_probabilities(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), 0, path);
    }
    const nlohmann::json* list = &doc;
    if (doc.is_object() && doc.contains("probabilities")) list = &doc["probabilities"];
    if (!list->is_array()) {
        throw ValidationError("expected an array of probabilities or {\"probabilities\": [...]}", 0,
                              path);
    }
    std::vector<double> p;
    for (const auto& v : *list) {
        if (!v.is_number()) throw ValidationError("probabilities must be numbers", 0, path);
        p.push_back(v.get<double>());
    }
    try {
        return collector::CouponDistribution(std::move(p));
    } catch (const DomainError& e) {
        throw ValidationError(e.what(), 0, path);
    }
}

std::string method_name(Method m) {
    switch (m) {
        case Method::exact: return "exact";
        case Method::sum: return "sum";
        case Method::montecarlo: return "montecarlo";
    }
    return "?";
}

void run_collector(const CollectorArgs& a) {
    const int sources = int{a.dice} + int{a.birthday} + int{a.uniform.has_value()} +
                        int{!a.probs_path.empty()};
    if (sources != 1) {
        throw DomainError("give exactly one of --dice, --uniform, --probs, --birthday");
    }

    if (a.birthday) {
        const double first = collector::birthday_first_collision_expected(365);
        const double all = collector::expected_draws_equal(365);
        emit(a.out, [&](std::ostream& os) {
            if (a.out.format == Format::json) {
                nlohmann::ordered_json doc;
                doc["format"] = "fomo-birthday";
                doc["version"] = 1;
                doc["days"] = 365;
                doc["first_shared_birthday_expected"] = first;
                doc["every_day_covered_expected"] = all;
                write_json(os, doc);
                return;
            }
            report::CsvWriter csv(os);
            csv.row({"question", "expected_people"});
            csv.row({"first_shared_birthday", report::format_number(first)});
            csv.row({"every_day_covered", report::format_number(all)});
        });
        return;
    }

    collector::CouponDistribution dist;
    if (a.dice) {
        dist = collector::dice_sum_distribution();
    } else if (a.uniform) {
        dist = collector::CouponDistribution::uniform(*a.uniform);
    } else {
        dist = read_probabilities(a.probs_path);
    }

    double expected = 0.0;
    std::optional<double> std_error;
    switch (a.method) {
        case Method::exact:
            if (dist.size() > collector::kMaxExactCoupons) {
                throw SizeError("--method exact supports at most " +
                                std::to_string(collector::kMaxExactCoupons) + " coupons (got " +
                                std::to_string(dist.size()) + "); use --method sum");
            }
            expected = collector::expected_draws_unequal_exact(dist);
            break;
        case Method::sum:
            expected = collector::expected_draws_unequal_sum(dist, a.tolerance);
            break;
        case Method::montecarlo: {
            detail::require_domain(a.trials >= 1, "--trials must be >= 1");
            const auto est = collector::monte_carlo_expected_draws(dist, a.trials, a.seed);
            expected = est.mean;
            std_error = est.std_error;
            break;
        }
    }
    std::optional<std::uint64_t> quantile_draws;
    if (a.quantile) quantile_draws = collector::completion_quantile(dist, *a.quantile);

    char rounded[64];
    std::snprintf(rounded, sizeof rounded, "%.2f", expected);
    emit(a.out, [&](std::ostream& os) {
        if (a.out.format == Format::json) {
            nlohmann::ordered_json doc;
            doc["format"] = "fomo-collector";
            doc["version"] = 1;
            doc["method"] = method_name(a.method);
            doc["coupons"] = dist.size();
            doc["expected_draws"] = expected;
            if (std_error) {
                doc["std_error"] = *std_error;
                doc["trials"] = a.trials;
                doc["seed"] = a.seed;
            }
            if (quantile_draws) {
                doc["quantile"] = *a.quantile;
                doc["quantile_draws"] = *quantile_draws;
            }
            write_json(os, doc);
            return;
        }
        report::CsvWriter csv(os);
        csv.row({"method", "coupons", "expected_draws", "expected_draws_2dp", "std_error", "trials",
                 "quantile", "quantile_draws"});
        csv.row({method_name(a.method), std::to_string(dist.size()), report::format_number(expected),
                 rounded, std_error ? report::format_number(*std_error) : "",
                 std_error ? std::to_string(a.trials) : "",
                 a.quantile ? report::format_number(*a.quantile) : "",
                 quantile_draws ? std::to_string(*quantile_draws) : ""});
    });
}

// --- simulate / compare -----------------------------------------------------

struct SimulateArgs {
    std::string corpus_path;
    std::uint64_t trials = 2000;
    std::uint64_t seed = 1;
    std::vector<double> quantiles{0.10, 0.20, 0.50, 0.95};
    std::size_t bins = 20;
    unsigned threads = 0;
    std::string summary_path = "fomo-summary.json";
    std::string histogram_path = "fomo-histogram.csv";
    OutputOptions out;
};

simulation::ShuffleOptions shuffle_options(const SimulateArgs& a) {
    simulation::ShuffleOptions opts;
    opts.trial_count = a.trials;
    opts.master_seed = a.seed;
    opts.quantiles = a.quantiles;
    opts.bin_count = a.bins;
    opts.threads = a.threads;
    return opts;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& write) {
    emit(OutputOptions{Format::csv, path}, write);
}

void run_simulate(const SimulateArgs& a) {
    const auto corpus = corpus::load_corpus(a.corpus_path);
    const auto summary = simulation::run_shuffles(corpus, shuffle_options(a));
    const auto doc = report::summary_json(summary);
    write_file(a.summary_path, [&](std::ostream& os) { write_json(os, doc); });
    write_file(a.histogram_path, [&](std::ostream& os) { report::write_histogram_csv(summary, os); });
    emit(a.out, [&](std::ostream& os) {
        if (a.out.format == Format::json) {
            nlohmann::ordered_json brief;
            brief["percentiles"] = doc["percentiles"];
            brief["recall_at"] = doc["recall_at"];
            write_json(os, brief);
            return;
        }
        report::CsvWriter csv(os);
        csv.row({"quantile", "completion_position", "recall"});
        for (const auto& q : summary.percentiles) {
            csv.row({report::format_number(q.quantile), std::to_string(q.position),
                     report::format_number(q.recall)});
        }
    });
}

void run_compare(const SimulateArgs& a) {
    const auto corpus = corpus::load_corpus(a.corpus_path);
    const auto summary = simulation::run_shuffles(corpus, shuffle_options(a));
    const auto cmp = simulation::completion_vs_analytic(corpus, summary);
    emit(a.out, [&](std::ostream& os) {
        if (a.out.format == Format::json) {
            write_json(os, report::comparison_json(cmp));
        } else {
            report::write_comparison_csv(cmp, os);
        }
    });
}

// --- curve ------------------------------------------------------------------

struct CurveArgs {
    std::string corpus_path;
    OutputOptions out;
};

void run_curve(const CurveArgs& a) {
    const auto corpus = corpus::load_corpus(a.corpus_path);
    const auto curve = simulation::scan_accession(corpus);
    emit(a.out, [&](std::ostream& os) {
        if (a.out.format == Format::json) {
            write_json(os, report::curve_json(curve));
        } else {
            report::write_curve_csv(curve, os);
        }
    });
}

// --- gen-corpus -------------------------------------------------------------

struct GenArgs {
    std::uint64_t docs = 0;
    std::size_t topics = 0;
    double max_prev = 0.0;
    double min_prev = 0.0;
    std::optional<double> mean_topics;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out_path;
};

void run_gen_corpus(const GenArgs& a) {
    double offset = 0.0;
    if (a.mean_topics) {
        offset = corpus::calibrate_zipf_offset(a.topics, a.max_prev, a.min_prev, *a.mean_topics);
    }
    const auto dist = corpus::zipf_mandelbrot_prevalences(a.topics, a.max_prev, a.min_prev, offset);
    const unsigned threads = a.threads == 0 ? simulation::default_thread_count() : a.threads;
    const auto generated = corpus::generate_corpus(a.docs, dist, a.seed, threads);
    corpus::save_corpus(generated, a.out_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Estimate the risk that an imperfect document search missed a topic"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fomo 1.0.0");

    TableArgs table;
    auto* table_cmd = app.add_subcommand("table", "Novel-topic confidence for recall scenarios");
    table_cmd->add_option("--produced", table.produced, "Identified relevant document counts")
        ->delimiter(',')
        ->capture_default_str();
    table_cmd->add_option("--recall", table.recalls, "Recall levels in (0, 1]")
        ->delimiter(',')
        ->capture_default_str();
    table_cmd->add_option("--confidence", table.confidence, "Confidence level in (0, 1)")
        ->capture_default_str();
    add_output_options(table_cmd, table.out);
    table_cmd->callback([&] { run_table(table); });

    BoundArgs bound;
    auto* bound_cmd = app.add_subcommand(
        "bound", "Prevalence bound after zero sightings, or first-discovery probabilities");
    bound_cmd->add_option("--identified", bound.identified, "Documents searched without a sighting");
    bound_cmd->add_option("--confidence", bound.confidence, "Confidence level in (0, 1)")
        ->capture_default_str();
    bound_cmd->add_option("--missed", bound.missed, "Missed-set size for the novel-topic probability");
    bound_cmd->add_option("--prevalence", bound.prevalence, "Topic prevalence for the first-discovery pmf");
    bound_cmd->add_option("--positions", bound.positions, "Scan positions k for the pmf")
        ->delimiter(',')
        ->capture_default_str();
    add_output_options(bound_cmd, bound.out);
    bound_cmd->callback([&] { run_bound(bound); });

    CollectorArgs coll;
    auto* coll_cmd = app.add_subcommand("collector", "Expected draws to collect every coupon");
    coll_cmd->add_flag("--dice", coll.dice, "Sums of two dice");
    coll_cmd->add_option("--uniform", coll.uniform, "m equally likely coupons");
    coll_cmd->add_option("--probs", coll.probs_path, "JSON file with coupon probabilities")
        ->check(CLI::ExistingFile);
    coll_cmd->add_flag("--birthday", coll.birthday, "The two birthday questions for 365 days");
    const std::map<std::string, Method> methods{
        {"exact", Method::exact}, {"sum", Method::sum}, {"montecarlo", Method::montecarlo}};
    coll_cmd->add_option("--method", coll.method, "exact, sum or montecarlo")
        ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case))
        ->default_str("exact");
    coll_cmd->add_option("--seed", coll.seed, "Monte Carlo seed")->capture_default_str();
    coll_cmd->add_option("--trials", coll.trials, "Monte Carlo trials")->capture_default_str();
    coll_cmd->add_option("--tolerance", coll.tolerance, "Truncation tolerance for --method sum")
        ->capture_default_str();
    coll_cmd->add_option("--quantile", coll.quantile,
                         "Also report the draws needed with this probability (independent-sighting model)");
    add_output_options(coll_cmd, coll.out);
    coll_cmd->callback([&] { run_collector(coll); });

    SimulateArgs sim;
    auto add_shuffle_options = [](CLI::App* cmd, SimulateArgs& s) {
        cmd->add_option("--corpus", s.corpus_path, "Corpus file (JSON lines)")->required();
        cmd->add_option("--trials", s.trials, "Number of shuffles")->capture_default_str();
        cmd->add_option("--seed", s.seed, "Master seed")->capture_default_str();
        cmd->add_option("--quantiles", s.quantiles, "Quantiles in (0, 1)")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--bins", s.bins, "Histogram bins")->capture_default_str();
        cmd->add_option("--threads", s.threads, "Worker threads (0: FOMO_THREADS or all cores)")
            ->capture_default_str();
    };
    auto* sim_cmd = app.add_subcommand("simulate", "Shuffle-and-scan trials over a corpus");
    add_shuffle_options(sim_cmd, sim);
    sim_cmd->add_option("--summary", sim.summary_path, "Summary JSON output file")
        ->capture_default_str();
    sim_cmd->add_option("--histogram", sim.histogram_path, "Histogram CSV output file")
        ->capture_default_str();
    add_output_options(sim_cmd, sim.out);
    sim_cmd->callback([&] { run_simulate(sim); });

    SimulateArgs cmp;
    cmp.trials = 200;
    auto* cmp_cmd =
        app.add_subcommand("compare", "Shuffle results against the with-replacement approximation");
    add_shuffle_options(cmp_cmd, cmp);
    add_output_options(cmp_cmd, cmp.out);
    cmp_cmd->callback([&] { run_compare(cmp); });

    CurveArgs curve;
    auto* curve_cmd = app.add_subcommand("curve", "Distinct topics seen in accession order");
    curve_cmd->add_option("--corpus", curve.corpus_path, "Corpus file (JSON lines)")->required();
    add_output_options(curve_cmd, curve.out);
    curve_cmd->callback([&] { run_curve(curve); });

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-corpus", "Write a synthetic Zipf corpus");
    gen_cmd->add_option("--docs", gen.docs, "Number of documents")->required();
    gen_cmd->add_option("--topics", gen.topics, "Number of topics (>= 2)")->required();
    gen_cmd->add_option("--max-prev", gen.max_prev, "Prevalence of the most common topic")->required();
    gen_cmd->add_option("--min-prev", gen.min_prev, "Prevalence of the rarest topic")->required();
    gen_cmd->add_option("--mean-topics", gen.mean_topics,
                        "Calibrate the Zipf-Mandelbrot offset to this mean topics per document");
    gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    gen_cmd->add_option("--threads", gen.threads, "Worker threads (0: FOMO_THREADS or all cores)")
        ->capture_default_str();
    gen_cmd->add_option("--out", gen.out_path, "Output corpus file")->required();
    gen_cmd->callback([&] { run_gen_corpus(gen); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "fomo: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
