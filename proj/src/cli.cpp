#include "nuc/cli.hpp"

#include "nuc/analysis.hpp"
#include "nuc/embedding_client.hpp"
#include "nuc/error.hpp"
#include "nuc/http.hpp"
#include "nuc/pipeline.hpp"
#include "nuc/sweep.hpp"
#include "nuc/synthetic.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace nuc {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct Io {
    std::ostream& out;
    std::ostream& err;
    bool quiet = false;
};

int exit_code_for(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const ExperimentAborted& a) {
        return a.cause() ? exit_code_for(a.cause()) : 2;
    } catch (const ValidationError&) {
        return 1;
    } catch (...) {
        return 2;
    }
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    fn(f);
    f.flush();
    if (!f) throw IoError("write failed for '" + path.string() + "'");
}

SyntheticSpec synthetic_spec(const Settings& s) {
    SyntheticSpec spec;
    spec.n_classes = s.count("synthetic.classes");
    spec.spread = s.real("synthetic.spread");
    spec.pool_size = s.count("synthetic.pool_size");
    spec.test_size = s.count("synthetic.test_size");
    spec.validate();
    return spec;
}

ExperimentData experiment_data(const Settings& s, const ExperimentConfig& cfg, std::int64_t seed) {
    if (!s.boolean("synthetic")) return load_experiment_data(cfg, seed);
    auto b = make_synthetic_benchmark(synthetic_spec(s), static_cast<std::uint64_t>(seed));
    return {std::move(b.test), std::move(b.pool)};
}

Corpus load_labeled(const Settings& s) {
    std::filesystem::path p = s.path("data");
    if (p.empty()) p = s.path("pool");
    if (p.empty()) throw ValidationError("data: no dataset path given");
    Corpus c = normalize(load_jsonl(p));
    if (!c.fully_labeled()) throw ValidationError("data: every example needs a gold label");
    return c;
}

ordered_json summary_json(const RunReport& r) {
    ordered_json j = to_json(r);
    j.erase("per_example");
    return j;
}

void print_table(std::ostream& err, const std::vector<RunReport>& reports) {
    err << std::left << std::setw(48) << "method" << std::right << std::setw(6) << "seed" << std::setw(10)
        << "accuracy" << std::setw(10) << "calls" << std::setw(10) << "hits" << std::setw(12) << "tokens"
        << std::setw(12) << "cost" << std::setw(12) << "time_s" << '\n';
    for (const auto& r : reports) {
        err << std::left << std::setw(48) << r.method << std::right << std::setw(6) << r.seed << std::setw(10)
            << std::fixed << std::setprecision(4) << r.accuracy << std::setw(10) << r.predictor_calls
            << std::setw(10) << r.cache_hits << std::setw(12) << r.token_estimate << std::setw(12)
            << std::setprecision(6) << r.estimated_cost << std::setw(12) << std::setprecision(1)
            << r.wall_time_seconds << '\n';
        err.unsetf(std::ios::fixed);
    }
}

void emit_reports(const Settings& s, const std::vector<RunReport>& reports, Io& io) {
    const auto out_path = s.path("out");
    const auto csv_path = s.path("csv");
    if (!out_path.empty()) write_file(out_path, [&](std::ostream& f) { write_reports_json(f, reports); });
    if (!csv_path.empty()) write_file(csv_path, [&](std::ostream& f) { write_reports_csv(f, reports); });
    if (out_path.empty()) {
        write_reports_json(io.out, reports);
    } else {
        ordered_json arr = ordered_json::array();
        for (const auto& r : reports) arr.push_back(summary_json(r));
        io.out << arr.dump(2) << '\n';
    }
    if (!io.quiet) print_table(io.err, reports);
}

int cmd_run(const Settings& s, Io& io) {
    const ExperimentConfig cfg = s.experiment();
    if (!s.boolean("synthetic")) cfg.validate_paths();
    std::shared_ptr<PredictionCache> cache;
    if (cfg.cache_enabled) cache = std::make_shared<PredictionCache>(cfg.cache_path);

    std::vector<RunReport> reports;
    int code = 0;
    for (auto seed : cfg.seeds) {
        const ExperimentData data = experiment_data(s, cfg, seed);
        try {
            reports.push_back(run_experiment(cfg, data.test, data.pool, seed, cache));
        } catch (const ExperimentAborted& e) {
            io.err << "error: seed " << seed << ": " << e.what() << " (writing partial report)\n";
            reports.push_back(e.partial());
            code = e.cause() ? exit_code_for(e.cause()) : 2;
            break;
        }
    }
    emit_reports(s, reports, io);
    return code;
}

int cmd_sweep(const Settings& s, Io& io) {
    const ExperimentConfig cfg = s.experiment();
    const SweepAxis axis = parse_sweep_axis(s.text("sweep.axis"));
    const std::vector<double> values = s.real_list("sweep.values");
    if (values.empty()) throw ValidationError("sweep.values: no sweep values given");

    SweepDataSource source;
    if (s.boolean("synthetic")) {
        SyntheticSpec spec = synthetic_spec(s);
        if (axis == SweepAxis::pool_size)
            spec.pool_size = std::max(spec.pool_size, static_cast<std::size_t>(*std::max_element(values.begin(), values.end())));
        source = [spec](std::int64_t seed) {
            auto b = make_synthetic_benchmark(spec, static_cast<std::uint64_t>(seed));
            Corpus ood = make_ood_cluster(spec, spec.pool_size, static_cast<std::uint64_t>(seed));
            return SweepData{std::move(b.test), std::move(b.pool), std::move(ood)};
        };
    } else {
        source = file_sweep_source(cfg, s.path("sweep.ood"));
    }

    const auto cells = run_sweep(axis, values, cfg, source);
    const auto out_path = s.path("out");
    if (!out_path.empty()) write_file(out_path, [&](std::ostream& f) { write_sweep_csv(f, cells); });

    ordered_json arr = ordered_json::array();
    int code = 0;
    for (const auto& c : cells) {
        ordered_json j;
        j["axis"] = to_string(c.axis);
        j["value"] = c.value;
        j["seed"] = c.seed;
        if (c.report) {
            j["method"] = c.report->method;
            j["accuracy"] = c.report->accuracy;
            j["predictor_calls"] = c.report->predictor_calls;
            j["cache_hits"] = c.report->cache_hits;
            j["token_estimate"] = c.report->token_estimate;
            j["wall_time_seconds"] = c.report->wall_time_seconds;
        } else {
            j["error"] = c.error;
            code = std::max(code, c.failure ? exit_code_for(c.failure) : 2);
            io.err << "error: " << to_string(c.axis) << "=" << c.value << " seed " << c.seed << ": " << c.error << '\n';
        }
        arr.push_back(std::move(j));
    }
    if (out_path.empty())
        write_sweep_csv(io.out, cells);
    else
        io.out << arr.dump(2) << '\n';

    if (!io.quiet) {
        std::map<double, std::vector<double>> by_value;
        for (const auto& c : cells)
            if (c.report) by_value[c.value].push_back(c.report->accuracy);
        io.err << std::setw(14) << to_string(axis) << std::setw(8) << "runs" << std::setw(12) << "mean_acc"
               << std::setw(12) << "std_acc" << '\n';
        for (const auto& [v, accs] : by_value) {
            double mean = 0.0;
            for (double a : accs) mean += a;
            mean /= static_cast<double>(accs.size());
            double var = 0.0;
            for (double a : accs) var += (a - mean) * (a - mean);
            const double sd = accs.size() > 1 ? std::sqrt(var / static_cast<double>(accs.size() - 1)) : 0.0;
            io.err << std::setw(14) << v << std::setw(8) << accs.size() << std::fixed << std::setprecision(4)
                   << std::setw(12) << mean << std::setw(12) << sd << '\n';
            io.err.unsetf(std::ios::fixed);
        }
    }
    return code;
}

int cmd_embed(const Settings& s, Io& io) {
    const auto in_path = s.path("data");
    const auto out_path = s.path("out");
    if (in_path.empty()) throw ValidationError("data: no input dataset given");
    if (out_path.empty()) throw ValidationError("out: no output path given");
    std::string url = s.text("embed.url");
    if (url.empty()) {
        const std::string base = s.text("llm_base_url");
        if (base.empty()) throw ValidationError("embed.url: no embeddings endpoint or llm_base_url given");
        const Endpoint ep = join_url(base, "embeddings");
        url = ep.origin + ep.path;
    }
    EmbedOptions opts;
    opts.batch_size = s.count("embed.batch_size");
    opts.parallelism = s.value("parallelism") ? s.count("parallelism") : 4;
    opts.retry.max_retries = static_cast<int>(s.integer("predictor.max_retries"));

    const Corpus input = load_jsonl(in_path);
    const EmbedResult res = embed_remote(input, url, s.text("embed.model"), opts);
    save_jsonl(out_path, res.corpus);

    ordered_json j;
    j["examples"] = res.corpus.size();
    j["requests"] = res.requests;
    j["dimension"] = res.corpus.dimension() ? json(*res.corpus.dimension()) : json(nullptr);
    j["out"] = out_path.string();
    io.out << j.dump(2) << '\n';
    if (!io.quiet) io.err << "embedded " << res.corpus.size() << " examples in " << res.requests << " requests\n";
    return 0;
}

int cmd_purity(const Settings& s, Io& io, bool include_self) {
    const Corpus c = load_labeled(s);
    const PurityReport r = neighborhood_purity(c, s.count("k"), include_self);
    ordered_json j;
    j["k"] = r.k;
    j["include_self"] = r.include_self;
    j["purity"] = r.purity;
    ordered_json rows = ordered_json::array();
    for (const auto& [id, p] : r.per_anchor) rows.push_back({{"id", id}, {"purity", p}});
    j["per_anchor"] = std::move(rows);
    io.out << j.dump(2) << '\n';
    if (!io.quiet) io.err << "purity@" << r.k << " = " << r.purity << " over " << c.size() << " anchors\n";
    return 0;
}

int cmd_gt_vote(const Settings& s, Io& io, bool include_self) {
    const Corpus c = load_labeled(s);
    const std::size_t k = s.count("k");
    ordered_json j;
    j["k"] = k;
    j["include_self"] = include_self;
    j["naive_accuracy"] = gt_majority_accuracy(c, k, false, include_self);
    j["weighted_accuracy"] = gt_majority_accuracy(c, k, true, include_self);
    io.out << j.dump(2) << '\n';
    if (!io.quiet)
        io.err << "gt-vote@" << k << ": naive " << j["naive_accuracy"].get<double>() << ", weighted "
               << j["weighted_accuracy"].get<double>() << '\n';
    return 0;
}

int cmd_inconsistency(const Settings& s, Io& io, std::size_t n_reruns) {
    const ExperimentConfig cfg = s.experiment();
    std::filesystem::path p = s.path("data");
    if (p.empty()) p = s.path("test");
    if (p.empty()) throw ValidationError("data: no dataset path given");
    const Corpus c = load_jsonl(p);
    std::shared_ptr<PredictionCache> cache;
    if (cfg.cache_enabled) cache = std::make_shared<PredictionCache>(cfg.cache_path);
    PredictorConfig pc = cfg.predictor;
    pc.seed = cfg.seeds.front();
    Predictor predictor(make_backend(cfg, cfg.seeds.front()), pc, cache, cfg.cost);
    const double ratio = inconsistency_ratio(c.examples(), n_reruns, predictor, c.label_space(), cfg.parallelism);
    const auto counters = predictor.counters();
    ordered_json j;
    j["n_reruns"] = n_reruns;
    j["examples"] = c.size();
    j["inconsistency_ratio"] = ratio;
    j["predictor_calls"] = counters.calls;
    j["cache_hits"] = counters.cache_hits;
    io.out << j.dump(2) << '\n';
    if (!io.quiet) io.err << "inconsistency over " << n_reruns << " reruns = " << ratio << '\n';
    return 0;
}

int cmd_ood(const Settings& s, Io& io, double ratio) {
    const auto pool_path = s.path("pool");
    const auto ood_path = s.path("sweep.ood");
    const auto out_path = s.path("out");
    if (pool_path.empty()) throw ValidationError("pool: no pool dataset path given");
    if (ood_path.empty()) throw ValidationError("ood: no OOD source dataset given");
    if (out_path.empty()) throw ValidationError("out: no output path given");
    const auto seeds = s.int_list("seed");
    const Corpus pool = load_jsonl(pool_path);
    const Corpus source = load_jsonl(ood_path);
    const Corpus mixed = inject_ood(pool, source, ratio, static_cast<std::uint64_t>(seeds.front()));
    save_jsonl(out_path, mixed);
    std::size_t replaced = 0;
    for (const auto& e : mixed) replaced += e.gold_label && *e.gold_label == kOodLabel && !pool.find(e.id) ? 1 : 0;
    ordered_json j;
    j["size"] = mixed.size();
    j["replaced"] = replaced;
    j["ratio"] = ratio;
    j["seed"] = seeds.front();
    j["out"] = out_path.string();
    io.out << j.dump(2) << '\n';
    return 0;
}

int cmd_cache_warm(const Settings& s, Io& io) {
    const ExperimentConfig cfg = s.experiment();
    if (!cfg.cache_enabled) throw ValidationError("cache: no cache path given");
    if (!s.boolean("synthetic")) cfg.validate_paths();
    auto cache = std::make_shared<PredictionCache>(cfg.cache_path);
    ordered_json arr = ordered_json::array();
    for (auto seed : cfg.seeds) {
        const ExperimentData data = experiment_data(s, cfg, seed);
        const PredictorCounters c = warm_cache(cfg, data.test, data.pool, seed, cache);
        arr.push_back({{"seed", seed}, {"pool_size", data.pool.size()}, {"predictor_calls", c.calls},
                       {"cache_hits", c.cache_hits}, {"token_estimate", c.tokens}});
        if (!io.quiet)
            io.err << "seed " << seed << ": " << c.calls << " calls, " << c.cache_hits << " cache hits\n";
    }
    ordered_json j;
    j["cache"] = cfg.cache_path.string();
    j["entries"] = cache->size();
    j["runs"] = std::move(arr);
    io.out << j.dump(2) << '\n';
    return 0;
}

// Reads the journal without compacting it.
int cmd_cache_stats(const Settings& s, Io& io) {
    const auto path = s.path("cache");
    if (path.empty()) throw ValidationError("cache: no cache path given");
    std::ifstream in(path);
    if (!in) throw IoError("cannot read cache '" + path.string() + "'");
    std::size_t records = 0, bad = 0;
    std::map<std::string, bool> fps;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            fps.emplace(j.at("fp").get<std::string>(), true);
            ++records;
        } catch (const json::exception&) {
            ++bad;
        }
    }
    ordered_json j;
    j["cache"] = path.string();
    j["records"] = records;
    j["entries"] = fps.size();
    j["invalid_lines"] = bad;
    io.out << j.dump(2) << '\n';
    return 0;
}

int cmd_report(const Settings& s, Io& io, const std::vector<std::string>& inputs) {
    if (inputs.empty()) throw ValidationError("report: no report files given");
    std::vector<RunReport> reports;
    for (const auto& p : inputs) {
        std::ifstream in(p);
        if (!in) throw IoError("cannot read report '" + p + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw ValidationError("report '" + p + "': " + e.what());
        }
        if (j.is_array())
            for (const auto& r : j) reports.push_back(report_from_json(r));
        else
            reports.push_back(report_from_json(j));
    }
    const auto csv_path = s.path("csv");
    if (!csv_path.empty()) write_file(csv_path, [&](std::ostream& f) { write_reports_csv(f, reports); });

    std::map<std::string, std::vector<const RunReport*>> by_method;
    std::vector<std::string> order;
    for (const auto& r : reports) {
        if (!by_method.count(r.method)) order.push_back(r.method);
        by_method[r.method].push_back(&r);
    }
    ordered_json arr = ordered_json::array();
    for (const auto& m : order) {
        const auto& rs = by_method[m];
        const double n = static_cast<double>(rs.size());
        double mean = 0.0, calls = 0.0, tokens = 0.0, cost = 0.0, time = 0.0;
        for (const auto* r : rs) {
            mean += r->accuracy;
            calls += static_cast<double>(r->predictor_calls);
            tokens += static_cast<double>(r->token_estimate);
            cost += r->estimated_cost;
            time += r->wall_time_seconds;
        }
        mean /= n;
        double var = 0.0;
        for (const auto* r : rs) var += (r->accuracy - mean) * (r->accuracy - mean);
        ordered_json j;
        j["method"] = m;
        j["runs"] = rs.size();
        j["accuracy_mean"] = mean;
        j["accuracy_std"] = rs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
        j["predictor_calls_mean"] = calls / n;
        j["token_estimate_mean"] = tokens / n;
        j["estimated_cost_mean"] = cost / n;
        j["wall_time_seconds_mean"] = time / n;
        arr.push_back(std::move(j));
    }
    io.out << arr.dump(2) << '\n';
    if (!io.quiet) print_table(io.err, reports);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    CLI::App app{"Test-time neighborhood-consistency voting for LLM text classification", "nuc"};
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);

    std::string config_path;
    bool quiet = false;
    app.add_option("--config", config_path, "configuration file (TOML subset, see docs/config.md)");
    app.add_flag("--quiet", quiet, "suppress human-readable tables on stderr");
    std::map<std::string, std::string> flag_values;
    std::map<std::string, CLI::Option*> flag_options;
    for (const auto& def : Settings::definitions()) {
        std::string help = def.help;
        if (!def.fallback.empty()) help += " [default: " + def.fallback + "]";
        // Booleans work as bare flags or as --flag=false.
        CLI::Option* opt = def.kind == SettingKind::boolean
                               ? app.add_flag("--" + def.flag, flag_values[def.key], help)
                               : app.add_option("--" + def.flag, flag_values[def.key], help)->type_name("VALUE");
        flag_options[def.key] = opt->group("Settings");
    }

    auto* embed = app.add_subcommand("embed", "attach embeddings from an embeddings endpoint (--data -> --out)");
    auto* run = app.add_subcommand("run", "run an experiment and emit its reports");
    auto* sweep = app.add_subcommand("sweep", "run experiments along one axis (--axis, --values)");
    auto* analyze = app.add_subcommand("analyze", "diagnostics over labeled data");
    analyze->require_subcommand(1);
    bool include_self = false;
    auto* purity = analyze->add_subcommand("purity", "neighborhood label purity (--data, --k)");
    purity->add_flag("--include-self", include_self, "count the anchor as its own first neighbor");
    auto* gt_vote = analyze->add_subcommand("gt-vote", "majority vote over neighbors' gold labels (--data, --k)");
    gt_vote->add_flag("--include-self", include_self, "count the anchor as its own first neighbor");
    std::size_t n_reruns = 10;
    auto* incons = analyze->add_subcommand("inconsistency", "prediction changes across reruns (--data)");
    incons->add_option("--n-reruns", n_reruns, "reruns per example")->capture_default_str()->check(CLI::Range(2, 1000000));
    double ratio = 0.0;
    auto* ood = analyze->add_subcommand("ood", "replace a share of --pool with --ood examples, written to --out");
    ood->add_option("--ratio", ratio, "fraction of the pool to replace")->required()->check(CLI::Range(0.0, 1.0));
    auto* cache = app.add_subcommand("cache", "prediction cache maintenance");
    cache->require_subcommand(1);
    auto* warm = cache->add_subcommand("warm", "predict every pool member into --cache");
    auto* stats = cache->add_subcommand("stats", "summarize the --cache journal");
    std::vector<std::string> report_inputs;
    auto* report = app.add_subcommand("report", "summarize report JSON files");
    report->add_option("inputs", report_inputs, "report files written by run --out")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    Io io{out, err, quiet};
    try {
        Settings settings;
        if (!config_path.empty()) settings.load_file(config_path);
        settings.load_env(env);
        for (const auto& [key, opt] : flag_options)
            if (opt->count() > 0) settings.set_flag(key, flag_values[key]);

        if (embed->parsed()) return cmd_embed(settings, io);
        if (run->parsed()) return cmd_run(settings, io);
        if (sweep->parsed()) return cmd_sweep(settings, io);
        if (purity->parsed()) return cmd_purity(settings, io, include_self);
        if (gt_vote->parsed()) return cmd_gt_vote(settings, io, include_self);
        if (incons->parsed()) return cmd_inconsistency(settings, io, n_reruns);
        if (ood->parsed()) return cmd_ood(settings, io, ratio);
        if (warm->parsed()) return cmd_cache_warm(settings, io);
        if (stats->parsed()) return cmd_cache_stats(settings, io);
        if (report->parsed()) return cmd_report(settings, io, report_inputs);
        err << app.help();
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(std::current_exception());
    }
}

}  // namespace nuc
