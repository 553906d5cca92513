#include "nestreuse/cli/commands.hpp"

#include "nestreuse/audit.hpp"
#include "nestreuse/complexity.hpp"
#include "nestreuse/error.hpp"
#include "nestreuse/reuse_engine.hpp"
#include "nestreuse/robustness.hpp"
#include "nestreuse/stats.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>
#include <vector>

namespace nestreuse::cli {

namespace {

namespace fs = std::filesystem;

class NullBuffer : public std::streambuf {
protected:
    int overflow(int c) override { return c; }
};

std::string num(double v) {
    return fmt::format("{:.12g}", v);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string z_text(const CostLine& line) {
    switch (line.status) {
        case ZStatus::finite: return num(line.z);
        case ZStatus::exact_match: return "exact";
        case ZStatus::exact_mismatch: return line.z > 0 ? "inf" : "-inf";
        case ZStatus::no_data: return "NA";
    }
    return "NA";
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    }
    return out;
}

void write_provenance(std::ostream& out, const ExperimentConfig& cfg) {
    fmt::print(out, "# tool: {}\n", tool_version);
    fmt::print(out, "# generator: {}\n", generator_name);
    fmt::print(out, "# seed: {}\n", cfg.seed);
    fmt::print(out, "# config_hash: {}\n", config_hash(cfg));
}

/// Runs fn(trial) for every trial on a small pool; each trial owns its slot.
template <class Fn>
void for_each_trial(std::size_t trials, std::size_t threads, Fn&& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t t = next++; t < trials; t = next++) {
            try {
                fn(t);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = trials;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < threads; ++w) {
            pool.emplace_back(worker);
        }
        worker();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

/// Analytic nesting gate for chains that could not be verified at construction.
bool nesting_gate(const ExperimentConfig& cfg, const NestedChain& chain, std::ostream& log) {
    if (!chain.needs_audit()) {
        return true;
    }
    const std::size_t k = cfg.audit_samples.value_or(1000);
    if (k == 0) {
        throw ConfigError(cfg.source, 0, "audit_samples", "must be at least 1");
    }
    auto rng = make_stream(cfg.seed, 0, StreamPurpose::audit);
    const auto report = audit_nestedness(chain, k, rng);
    if (!report.passed()) {
        const auto& v = report.violations.front();
        fmt::print(log, "nesting audit failed: {} violations (first: point from set {} outside set {})\n",
                   report.violations.size(), v.source + 1, v.failing + 1);
        return false;
    }
    fmt::print(log, "nesting audit passed ({} points)\n", report.points_checked);
    return true;
}

CostReport single_trial_report(const ReuseLedger& ledger, const CostOracle& oracle) {
    CostReport report;
    report.sample_size = ledger.sample_size;
    report.trials = 1;
    report.truncated_trials = ledger.truncated() ? 1 : 0;
    report.theorem_bound = oracle.theorem_bound;
    report.corollary_bound = oracle.corollary_bound;
    for (std::size_t i = 0; i < ledger.set_count(); ++i) {
        CostLine line;
        line.expected = oracle.expected_fresh[i];
        line.mean = static_cast<double>(ledger.fresh[i]);
        report.per_set.push_back(line);
    }
    report.total.expected = std::accumulate(oracle.expected_fresh.begin(), oracle.expected_fresh.end(), 0.0);
    report.total.mean = static_cast<double>(ledger.total_fresh());
    report.total_q05 = report.total_q50 = report.total_q95 = report.total.mean;
    return report;
}

void write_cost(const fs::path& path, const ExperimentConfig& cfg, const CostReport& report) {
    auto out = open_output(path);
    write_provenance(out, cfg);
    fmt::print(out, "# theorem_bound: {}\n", num(report.theorem_bound));
    fmt::print(out, "# corollary_bound: {}\n", report.corollary_bound ? num(*report.corollary_bound) : "NA");
    fmt::print(out, "# trials: {}\n", report.trials);
    fmt::print(out, "# truncated_trials: {}\n", report.truncated_trials);
    fmt::print(out, "# total_quantiles: q05={} q50={} q95={}\n", num(report.total_q05), num(report.total_q50),
               num(report.total_q95));
    out << "set_index,expected_fresh,mean_fresh,stderr,z\n";
    const bool single = report.trials < 2;
    auto row = [&](const std::string& label, const CostLine& line) {
        fmt::print(out, "{},{},{},{},{}\n", label, num(line.expected), num(line.mean),
                   single ? "NA" : num(line.stderr_mean), single ? "NA" : z_text(line));
    };
    for (std::size_t i = 0; i < report.per_set.size(); ++i) {
        row(std::to_string(i + 1), report.per_set[i]);
    }
    row("total", report.total);
}

void write_curve(const fs::path& path, const ExperimentConfig& cfg, const RobustnessCurve& curve) {
    auto out = open_output(path);
    write_provenance(out, cfg);
    fmt::print(out, "# confidence: {}\n", num(curve.level));
    fmt::print(out, "# pooled_trials: {}\n", cfg.trials);
    out << "index,radius,k,N,estimate,ci_lo,ci_hi\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i];
        fmt::print(out, "{},{},{},{},{},{},{}\n", i + 1, num(p.label), p.successes, p.trials, num(p.estimate),
                   num(p.ci.lo), num(p.ci.hi));
    }
}

void write_margins(const fs::path& path, const ExperimentConfig& cfg, const RobustnessCurve& curve) {
    auto out = open_output(path);
    write_provenance(out, cfg);
    out << "epsilon,margin,margin_lower_bound\n";
    auto text = [](std::optional<double> r) { return r ? num(*r) : std::string("below_grid"); };
    for (const double eps : cfg.epsilons) {
        fmt::print(out, "{},{},{}\n", num(eps), text(margin(curve, eps, MarginRule::point_estimate)),
                   text(margin(curve, eps, MarginRule::lower_bound)));
    }
}

void write_infimum(const fs::path& path, const ExperimentConfig& cfg, const RobustnessCurve& curve) {
    auto out = open_output(path);
    write_provenance(out, cfg);
    out << "index,radius,infimum\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const double r = curve.points[i].label;
        fmt::print(out, "{},{},{}\n", i + 1, num(r), num(curve_infimum(curve, r)));
    }
}

void write_donut(const fs::path& path, const ExperimentConfig& cfg, const RobustnessCurve& curve,
                 const NestedChain& chain) {
    auto out = open_output(path);
    write_provenance(out, cfg);
    fmt::print(out, "# inner_radius: {}\n", num(cfg.inner_radius));
    out << "index,outer_radius,donut_estimate,lambda,reconstructed\n";
    const auto est = reconstruct_donut_curve(curve, chain);
    for (std::size_t i = 0; i < est.size(); ++i) {
        const auto& shape = std::get<DonutShape>(chain[i].shape());
        fmt::print(out, "{},{},{},{},{}\n", i + 1, num(shape.outer_radius), num(est[i].donut_estimate),
                   num(est[i].lambda), num(est[i].reconstructed));
    }
}

void write_meta(const fs::path& path, const ExperimentConfig& cfg) {
    auto out = open_output(path);
    write_provenance(out, cfg);
    out << "# canonical configuration; rerun with --config this-file --out DIR\n";
    out << canonical_text(cfg);
}

}  // namespace

int cmd_run(const ExperimentConfig& cfg, const fs::path& out_dir, std::size_t threads, std::ostream& log) {
    const NestedChain chain = build_chain(cfg, cfg.nesting);
    if (!nesting_gate(cfg, chain, log)) {
        return exit_audit_violation;
    }
    const Predicate predicate = build_predicate(cfg);
    const std::vector<double> labels = chain_labels(cfg);
    const std::size_t m = chain.size();

    std::vector<ReuseLedger> ledgers(cfg.trials);
    std::vector<std::vector<std::size_t>> successes(cfg.trials);
    for_each_trial(cfg.trials, threads, [&](std::size_t t) {
        auto rng = make_stream(cfg.seed, t, StreamPurpose::engine);
        const ReuseResult result = run_reuse(chain, cfg.sample_size, predicate, rng);
        successes[t].resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            successes[t][i] = result.successes(i);
        }
        ledgers[t] = result.ledger;
    });

    std::vector<std::size_t> pooled(m, 0);
    for (const auto& s : successes) {
        for (std::size_t i = 0; i < m; ++i) pooled[i] += s[i];
    }
    const RobustnessCurve curve = curve_from_counts(pooled, cfg.sample_size * cfg.trials, labels, cfg.confidence);

    const auto radii = scaling_radii(cfg);
    const CostOracle oracle =
        radii ? make_cost_oracle(chain, cfg.sample_size, std::span<const double>(*radii))
              : make_cost_oracle(chain, cfg.sample_size);
    const CostReport report =
        cfg.trials >= 2 ? trial_statistics(ledgers, oracle) : single_trial_report(ledgers.front(), oracle);

    fs::create_directories(out_dir);
    write_curve(out_dir / "curve.csv", cfg, curve);
    write_cost(out_dir / "cost.csv", cfg, report);
    write_infimum(out_dir / "infimum.csv", cfg, curve);
    if (!cfg.epsilons.empty()) {
        write_margins(out_dir / "margins.csv", cfg, curve);
    }
    if (cfg.family == Family::donut) {
        write_donut(out_dir / "donut.csv", cfg, curve, chain);
    }
    write_meta(out_dir / "meta.cfg", cfg);

    fmt::print(log, "run: {} sets, N={}, {} trials; mean fresh total {} (expected {}, bound {})\n", m,
               cfg.sample_size, cfg.trials, num(report.total.mean), num(report.total.expected),
               num(report.theorem_bound));
    return exit_ok;
}

int cmd_bench(const ExperimentConfig& cfg, const fs::path& out_dir, std::size_t threads, std::ostream& log) {
    const NestedChain chain = build_chain(cfg, cfg.nesting);
    if (!nesting_gate(cfg, chain, log)) {
        return exit_audit_violation;
    }
    const Predicate base = build_predicate(cfg);
    std::atomic<std::size_t> naive_calls{0};
    std::atomic<std::size_t> reuse_calls{0};
    const auto counted = [&base](std::atomic<std::size_t>& counter) {
        return Predicate::user(
            base.name(),
            [&base, &counter](std::span<const double> q) {
                counter.fetch_add(1, std::memory_order_relaxed);
                return base.evaluate(q);
            },
            base.dimension());
    };
    const Predicate naive_pred = counted(naive_calls);
    const Predicate reuse_pred = counted(reuse_calls);

    const std::size_t m = chain.size();
    const std::size_t naive_cost = cfg.sample_size * m;
    std::vector<double> naive_totals(cfg.trials);
    std::vector<double> reuse_totals(cfg.trials);

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    for_each_trial(cfg.trials, threads, [&](std::size_t t) {
        auto rng = make_stream(cfg.seed, t, StreamPurpose::naive);
        naive_totals[t] = static_cast<double>(run_naive(chain, cfg.sample_size, naive_pred, rng).ledger.total_fresh());
    });
    const auto t1 = clock::now();
    for_each_trial(cfg.trials, threads, [&](std::size_t t) {
        auto rng = make_stream(cfg.seed, t, StreamPurpose::engine);
        reuse_totals[t] = static_cast<double>(run_reuse(chain, cfg.sample_size, reuse_pred, rng).ledger.total_fresh());
    });
    const auto t2 = clock::now();

    double ratio_sum = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        ratio_sum += chain.volume_ratio(i);
    }
    const double analytic_ratio = (static_cast<double>(m) - ratio_sum) / static_cast<double>(m);

    fs::create_directories(out_dir);
    auto out = open_output(out_dir / "bench.csv");
    write_provenance(out, cfg);
    fmt::print(out, "# sets: {}\n", m);
    fmt::print(out, "# N: {}\n", cfg.sample_size);
    fmt::print(out, "# analytic_ratio: {}\n", num(analytic_ratio));
    out << "method,trials,mean_experiments,stderr,fresh_samples,predicate_evaluations,ratio_to_naive,"
           "ratio_stderr,analytic_ratio,z\n";
    auto row = [&](const char* method, const std::vector<double>& totals, std::size_t calls, double expected) {
        const Summary s = summarize(totals);
        const double fresh = std::accumulate(totals.begin(), totals.end(), 0.0);
        const double ratio = s.mean / static_cast<double>(naive_cost);
        const double ratio_se = s.stderr_mean / static_cast<double>(naive_cost);
        std::string z;
        if (cfg.trials < 2) {
            z = "NA";
        } else if (ratio_se > 0.0) {
            z = num((ratio - expected) / ratio_se);
        } else {
            z = std::abs(ratio - expected) <= 1e-12 ? "exact" : (ratio > expected ? "inf" : "-inf");
        }
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{}\n", method, cfg.trials, num(s.mean),
                   cfg.trials < 2 ? "NA" : num(s.stderr_mean), num(fresh), calls, num(ratio),
                   cfg.trials < 2 ? "NA" : num(ratio_se), num(expected), z);
    };
    row("naive", naive_totals, naive_calls.load(), 1.0);
    row("reuse", reuse_totals, reuse_calls.load(), analytic_ratio);

    const auto ms = [](auto d) { return std::chrono::duration<double, std::milli>(d).count(); };
    fmt::print(log, "bench: naive {} evaluations in {:.1f} ms, reuse {} evaluations in {:.1f} ms\n",
               naive_calls.load(), ms(t1 - t0), reuse_calls.load(), ms(t2 - t1));
    fmt::print(log, "bench: measured ratio {} vs analytic {}\n",
               num(summarize(reuse_totals).mean / static_cast<double>(naive_cost)), num(analytic_ratio));
    return exit_ok;
}

int cmd_audit(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    const std::size_t k = cfg.audit_samples.value_or(1000);
    if (k == 0) {
        throw ConfigError(cfg.source, 0, "audit_samples", "must be at least 1");
    }
    const NestedChain chain = build_chain(cfg, NestingCheck::deferred);
    auto rng = make_stream(cfg.seed, 0, StreamPurpose::audit);
    const AuditReport report = audit_nestedness(chain, k, rng);

    fs::create_directories(out_dir);
    auto out = open_output(out_dir / "audit.csv");
    write_provenance(out, cfg);
    fmt::print(out, "# samples_per_set: {}\n", report.samples_per_set);
    fmt::print(out, "# points_checked: {}\n", report.points_checked);
    fmt::print(out, "# violations: {}\n", report.violations.size());
    out << "source_index,failing_index,point\n";
    for (const auto& v : report.violations) {
        std::string coords;
        for (std::size_t i = 0; i < v.point.size(); ++i) {
            coords += (i ? " " : "") + num(v.point[i]);
        }
        fmt::print(out, "{},{},{}\n", v.source + 1, v.failing + 1, csv_field(coords));
    }
    fmt::print(log, "audit: {} points checked, {} violations\n", report.points_checked, report.violations.size());
    return report.passed() ? exit_ok : exit_audit_violation;
}

int execute(Command command, const Options& options, std::ostream& out, std::ostream& err) {
    NullBuffer null_buffer;
    std::ostream null_stream(&null_buffer);
    std::ostream& log = options.quiet ? null_stream : out;
    try {
        ExperimentConfig cfg = load_config(options.config);
        if (options.seed) override_seed(cfg, *options.seed);
        if (options.trials) override_trials(cfg, *options.trials);
        fs::path out_dir;
        if (options.out) {
            out_dir = *options.out;
        } else if (cfg.output) {
            out_dir = *cfg.output;
        } else {
            throw ConfigError(cfg.source, 0, "output", "no output directory: pass --out or set 'output'");
        }
        switch (command) {
            case Command::run: return cmd_run(cfg, out_dir, options.threads, log);
            case Command::bench: return cmd_bench(cfg, out_dir, options.threads, log);
            case Command::audit: return cmd_audit(cfg, out_dir, log);
        }
    } catch (const ConfigError& e) {
        fmt::print(err, "config error: {}\n", e.what());
        return exit_config;
    } catch (const PredicateError& e) {
        std::string coords;
        for (std::size_t i = 0; i < e.point().size(); ++i) coords += (i ? " " : "") + num(e.point()[i]);
        fmt::print(err, "error: {} at point ({})\n", e.what(), coords);
        return exit_runtime;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return exit_runtime;
    }
    return exit_runtime;
}

}  // namespace nestreuse::cli
