// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fomo/fomo.hpp"
#include "oracles.hpp"
#include "properties.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail = what;
            pass = false;
        }
    }
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string capture(const std::string& args) {
    const std::string cmd = "'" FOMO_CLI_PATH "' " + args + " 2>&1";
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    pclose(pipe);
    return out;
}

std::vector<std::vector<std::string>> csv_lines(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        rows.push_back(fields);
    }
    return rows;
}

// --- 1 ----------------------------------------------------------------------

Outcome table_reproduction() {
    Outcome o;
    const auto start = Clock::now();
    const auto rows = csv_lines(capture("table --produced 50000,100000,200000 --recall 0.8,0.7,0.6,0.5 "
                                        "--confidence 0.95"));
    const double elapsed = seconds_since(start);
    const std::array<double, 3> bound_pct{0.0060, 0.0030, 0.0015};
    const std::array<std::uint64_t, 12> missed{12500, 21428, 33333, 50000, 25000, 42857,
                                               66666, 100000, 50000, 85714, 133333, 200000};
    const std::array<double, 4> prob_pct{52.71, 72.30, 86.43, 95.00};
    const std::array<double, 4> fomo_pct{2.636, 3.615, 4.321, 4.750};
    const std::array<std::uint64_t, 3> produced{50000, 100000, 200000};
    const std::array<double, 4> recalls{0.8, 0.7, 0.6, 0.5};
    o.check(rows.size() == 13, "expected 12 table rows, got " + std::to_string(rows.size()) + " lines");
    if (!o.pass) return o;
    // Column order: produced, confidence, bound, bound_pct, recall, missed,
    // prob, prob_pct, fomo, fomo_pct.
    // Rows come out recall-major; the expected missed counts are listed
    // production-major, so they are looked up by (N, R).
    for (std::size_t i = 0; i < 12; ++i) {
        const auto& r = rows[i + 1];
        const std::size_t n_idx = i % 3;
        const std::size_t r_idx = i / 3;
        const std::string where = "row " + std::to_string(i + 1) + ": ";
        o.check(r.size() == 10, where + "column count");
        if (r.size() != 10) continue;
        o.check(std::stoull(r[0]) == produced[n_idx], where + "produced count");
        o.check(std::abs(std::stod(r[4]) - recalls[r_idx]) < 1e-12, where + "recall");
        o.check(std::stoull(r[5]) == missed[n_idx * 4 + r_idx], where + "missed count " + r[5]);
        o.check(std::abs(std::stod(r[2]) * 100 - bound_pct[n_idx]) <= 0.005, where + "prevalence bound " + r[3]);
        o.check(std::abs(std::stod(r[6]) * 100 - prob_pct[r_idx]) <= 0.005, where + "missed-set probability " + r[7]);
        o.check(std::abs(std::stod(r[8]) * 100 - fomo_pct[r_idx]) <= 0.005, where + "final confidence " + r[9]);
    }
    if (o.pass) {
        o.detail = "12 rows match; e.g. N=50000 R=0.8: " + rows[1][3] + ", " + rows[1][7] + ", " + rows[1][9] +
                   " (CLI " + fmt("%.3f", elapsed * 1000) + " ms incl. process start)";
    }
    return o;
}

// --- 2 ----------------------------------------------------------------------

Outcome geometric_example() {
    Outcome o;
    const std::array<long, 3> expect{36, 23, 15};
    std::string got;
    for (std::uint64_t k = 1; k <= 3; ++k) {
        const long pct = std::lround(fomo::analytic::first_discovery_pmf(0.36, k) * 100);
        got += (k > 1 ? ", " : "") + std::to_string(pct) + "%";
        o.check(pct == expect[k - 1], "k=" + std::to_string(k) + " gave " + std::to_string(pct) + "%");
    }
    if (o.pass) o.detail = got;
    return o;
}

// --- 3 ----------------------------------------------------------------------

Outcome dice_collector() {
    Outcome o;
    const auto start = Clock::now();
    const auto dice = fomo::collector::dice_sum_distribution();
    const double exact = fomo::collector::expected_draws_unequal_exact(dice);
    const auto mc = fomo::collector::monte_carlo_expected_draws(dice, 1'000'000, 20260101);
    const double elapsed = seconds_since(start);
    o.check(std::abs(exact - 61.22) <= 0.01, "exact = " + fmt("%.6f", exact));
    const double z = (mc.mean - exact) / mc.std_error;
    o.check(std::abs(z) <= 3.0, "Monte Carlo " + fmt("%.4f", mc.mean) + " is " + fmt("%.2f", z) + " SE away");
    o.check(elapsed < 10.0, "took " + fmt("%.2f", elapsed) + " s");
    if (o.pass) {
        o.detail = "exact " + fmt("%.4f", exact) + ", MC " + fmt("%.4f", mc.mean) + " +/- " +
                   fmt("%.4f", mc.std_error) + " (z=" + fmt("%.2f", z) + "), " + fmt("%.2f", elapsed) + " s";
    }
    return o;
}

// --- 4 ----------------------------------------------------------------------

Outcome birthday_answers() {
    Outcome o;
    const double all_days = fomo::collector::expected_draws_equal(365);
    const double collision = fomo::collector::birthday_first_collision_expected();
    o.check(std::abs(all_days - 2364.65) <= 0.01, "expected_draws_equal(365) = " + fmt("%.4f", all_days));
    o.check(std::abs(collision - 24.62) <= 0.01, "first collision = " + fmt("%.4f", collision));
    if (o.pass) o.detail = fmt("%.4f", all_days) + " and " + fmt("%.4f", collision);
    return o;
}

// --- 5 ----------------------------------------------------------------------

Outcome oracle_equivalence() {
    Outcome o;
    using fomo::collector::CouponDistribution;
    std::vector<CouponDistribution> dists{fomo::collector::dice_sum_distribution()};
    for (std::size_t m = 1; m <= 12; ++m) dists.push_back(CouponDistribution::uniform(m));
    std::mt19937_64 rng(5150);
    for (int i = 0; i < 1000; ++i) {
        const auto m = fomo::props::uniform_int(rng, 1, 12);
        dists.emplace_back(fomo::props::random_probabilities(rng, m, fomo::props::uniform(rng, 0.05, 1.0)));
    }
    double worst = 0.0;
    for (const auto& d : dists) {
        const double exact = fomo::collector::expected_draws_unequal_exact(d);
        const double sum = fomo::collector::expected_draws_unequal_sum(d);
        worst = std::max(worst, std::abs(sum - exact) / exact);
    }
    o.check(worst <= 1e-6, "sum vs exact relative difference " + fmt("%.3g", worst));

    int corpora = 0;
    double worst_z = 0.0;
    for (int i = 0; i < 12; ++i) {
        const auto docs = fomo::props::uniform_int(rng, 1, 8);
        const auto topics = fomo::props::uniform_int(rng, 1, 6);
        const auto c = fomo::props::random_corpus(rng, docs, topics);
        std::vector<std::vector<std::uint32_t>> sets;
        for (const auto& d : c.documents) sets.emplace_back(d.topics.begin(), d.topics.end());
        const double exhaustive = fomo::oracle::exhaustive_completion_mean(sets);
        fomo::simulation::ShuffleOptions opt;
        opt.trial_count = 100000;
        opt.master_seed = 9000 + i;
        const auto s = fomo::simulation::run_shuffles(c, opt);
        const auto est = fomo::collector::summarize_mean(s.completions);
        ++corpora;
        if (est.std_error == 0.0) {
            o.check(est.mean == exhaustive, "degenerate corpus " + std::to_string(i) + " mean mismatch");
            continue;
        }
        const double z = (est.mean - exhaustive) / est.std_error;
        worst_z = std::max(worst_z, std::abs(z));
        o.check(std::abs(z) <= 3.0, "corpus " + std::to_string(i) + " (" + std::to_string(docs) +
                                        " docs): MC " + fmt("%.4f", est.mean) + " vs exhaustive " +
                                        fmt("%.4f", exhaustive) + " (z=" + fmt("%.2f", z) + ")");
    }
    if (o.pass) {
        o.detail = std::to_string(dists.size()) + " distributions, worst rel diff " + fmt("%.2g", worst) + "; " +
                   std::to_string(corpora) + " corpora, worst |z| " + fmt("%.2f", worst_z);
    }
    return o;
}

// --- 6 and 7 ----------------------------------------------------------------

struct DeskStudy {
    fomo::corpus::Corpus corpus;
    double mean_topics = 0.0;
    double build_seconds = 0.0;
};

DeskStudy build_desk_corpus() {
    const auto start = Clock::now();
    constexpr std::size_t topics = 64;
    constexpr double max_prev = 0.36;
    constexpr double min_prev = 1.0 / 8571;
    const double offset = fomo::corpus::calibrate_zipf_offset(topics, max_prev, min_prev, 1.37);
    const auto dist = fomo::corpus::zipf_mandelbrot_prevalences(topics, max_prev, min_prev, offset);
    DeskStudy study;
    study.corpus = fomo::corpus::generate_corpus(120000, dist, 20240601, fomo::simulation::default_thread_count());
    study.mean_topics = fomo::corpus::mean_topics_per_document(study.corpus);
    study.build_seconds = seconds_since(start);
    return study;
}

Outcome desk_study(const DeskStudy& study) {
    Outcome o;
    const auto start = Clock::now();
    const auto& c = study.corpus;
    o.check(study.mean_topics >= 1.2 && study.mean_topics <= 1.6,
            "mean topics/doc " + fmt("%.4f", study.mean_topics) + " outside [1.2, 1.6]");
    fomo::simulation::ShuffleOptions opt;
    opt.trial_count = 200;
    opt.master_seed = 18;
    const auto s = fomo::simulation::run_shuffles(c, opt);
    const auto cmp = fomo::simulation::completion_vs_analytic(c, s);
    const double elapsed = study.build_seconds + seconds_since(start);

    // (a) every trial finds all 64 topics.
    o.check(s.topics_present == 64, "(a) corpus has only " + std::to_string(s.topics_present) + " topics");
    bool every_trial_complete = true;
    for (auto pos : s.completions) every_trial_complete &= pos >= 1 && pos <= c.size();
    o.check(every_trial_complete, "(a) a trial did not complete");
    // (b) p95 completion recall in [5%, 45%].
    double p95 = -1.0;
    for (const auto& q : s.percentiles) {
        if (std::abs(q.quantile - 0.95) < 1e-12) p95 = q.recall;
    }
    o.check(p95 >= 0.05 && p95 <= 0.45, "(b) p95 completion recall " + fmt("%.4f", p95));
    // (c) rarest topic determines completion in a majority of trials.
    o.check(s.rarest_topic_completion_fraction > 0.5,
            "(c) rarest topic completed only " + fmt("%.3f", s.rarest_topic_completion_fraction) +
                " of trials");
    // (d) median relative difference against the analytic model.
    o.check(std::abs(cmp.median_relative_difference) <= 0.15,
            "(d) median relative difference " + fmt("%.4f", cmp.median_relative_difference));
    o.check(elapsed < 120.0, "took " + fmt("%.1f", elapsed) + " s");

    const auto counts = fomo::corpus::topic_document_counts(c);
    const auto rarest = *std::min_element(counts.begin(), counts.end());
    std::ostringstream info;
    info << "mean topics/doc " << fmt("%.3f", study.mean_topics) << ", rarest topic in " << rarest
         << " docs, p95 recall " << fmt("%.4f", p95) << ", rarest-completes fraction "
         << fmt("%.3f", s.rarest_topic_completion_fraction) << ", median rel diff "
         << fmt("%.4f", cmp.median_relative_difference) << ", " << fmt("%.1f", elapsed) << " s";
    o.detail = o.pass ? info.str() : o.detail + " [" + info.str() + "]";
    return o;
}

Outcome determinism(const DeskStudy& study) {
    Outcome o;
    std::string reference;
    for (unsigned threads : {1u, 4u, 8u}) {
        fomo::simulation::ShuffleOptions opt;
        opt.trial_count = 200;
        opt.master_seed = 77;
        opt.threads = threads;
        const auto text = fomo::report::summary_json(fomo::simulation::run_shuffles(study.corpus, opt)).dump(2);
        if (reference.empty()) {
            reference = text;
        } else {
            o.check(text == reference, "summary at " + std::to_string(threads) + " threads differs");
        }
    }
    if (o.pass) o.detail = "summary JSON identical at 1, 4, 8 threads (" + std::to_string(reference.size()) + " bytes)";
    return o;
}

// --- 8 ----------------------------------------------------------------------

Outcome invariant_suites() {
    Outcome o;
    int total = 0;
    const auto reports = fomo::props::all_properties();
    for (const auto& rep : reports) {
        total += rep.cases;
        o.check(rep.cases >= 100, rep.name + ": only " + std::to_string(rep.cases) + " cases");
        o.check(rep.failures == 0, rep.name + ": " + std::to_string(rep.failures) + " failures, first: " +
                                       rep.first_failure);
    }
    if (o.pass) {
        o.detail = std::to_string(reports.size()) + " properties, " + std::to_string(total) +
                   " cases";
    }
    return o;
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int id, const std::string& name, const Outcome& o) {
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " " << name << ": " << o.detail << '\n'
                  << std::flush;
        failed += !o.pass;
    };
    report(1, "recall table", table_reproduction());
    report(2, "geometric worked example", geometric_example());
    report(3, "dice collector", dice_collector());
    report(4, "birthday answers", birthday_answers());
    report(5, "oracle equivalence", oracle_equivalence());
    const auto study = build_desk_corpus();
    report(6, "desk-scale shuffle study", desk_study(study));
    report(7, "thread determinism", determinism(study));
    report(8, "invariant suites", invariant_suites());
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
    return failed == 0 ? 0 : 1;
}
