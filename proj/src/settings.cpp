#include "nuc/settings.hpp"

#include "nuc/error.hpp"
#include "nuc/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nuc {

namespace {

using K = SettingKind;

std::vector<SettingDef> make_definitions() {
    return {
        {"seed", "seed", K::int_list, "0", "random seed, or a comma-separated list of seeds"},
        {"backend", "backend", K::text, "simulated", "simulated | remote"},
        {"k", "k", K::count, "10", "neighborhood size K (anchor included)"},
        {"theta", "theta", K::real, "0.7", "confidence threshold of the filtered policy"},
        {"policy", "policy", K::text, "filtered_weighted",
         "naive | weighted_distance | weighted_distance_confidence | filtered_weighted"},
        {"always_admit_anchor", "always-admit-anchor", K::boolean, "false",
         "exempt the anchor's own vote from the confidence filter"},
        {"base", "base", K::text, "standard",
         "standard | self_consistency | best_of_n | weighted_best_of_n | knn_icl | knn_icl_p"},
        {"n_samples", "n-samples", K::count, "10", "samples per item for self-consistency and best-of-n"},
        {"k_demos", "k-demos", K::count, "10", "demonstrations per prompt for the ICL baselines"},
        {"testnuc", "testnuc", K::boolean, "true", "wrap the base method in neighborhood voting"},
        {"neighbor_mode", "neighbor-mode", K::text, "base", "base | standard: predictor used for neighbors"},
        {"pool", "pool", K::path, "", "unlabeled pool JSONL"},
        {"test", "test", K::path, "", "test set JSONL"},
        {"data", "data", K::path, "", "single dataset JSONL (split into test and pool for run/sweep)"},
        {"test_size", "test-size", K::count, "500", "test examples taken from --data"},
        {"out", "out", K::path, "", "output file"},
        {"csv", "csv", K::path, "", "per-example CSV output"},
        {"cache", "cache", K::path, "", "prediction cache journal; enables caching"},
        {"parallelism", "parallelism", K::count, "", "worker threads (default: CPUs when simulated, 4 when remote)"},
        {"llm_base_url", "llm-base-url", K::text, "", "chat API base URL"},
        {"predictor.model", "model", K::text, "gpt-4o-mini", "chat model name"},
        {"predictor.temperature", "temperature", K::real, "0.7", "sampling temperature"},
        {"predictor.top_p", "top-p", K::real, "1.0", "nucleus sampling mass"},
        {"predictor.max_retries", "max-retries", K::integer, "3", "retries per remote request"},
        {"oracle.accuracy", "oracle-accuracy", K::real, "0.65", "simulated oracle accuracy"},
        {"oracle.consistency", "oracle-consistency", K::real, "1.0",
         "probability a resampled draw repeats the first one"},
        {"cost.token_inflation", "token-inflation", K::real, "1.3", "tokens per whitespace token"},
        {"cost.price_per_1k", "price-per-1k", K::real, "0.00015", "price per 1000 prompt tokens"},
        {"cost.call_latency", "call-latency", K::real, "0.682", "seconds charged per simulated call"},
        {"embed.url", "embed-url", K::text, "", "embeddings endpoint (default: <llm_base_url>/embeddings)"},
        {"embed.model", "embed-model", K::text, "text-embedding-3-small", "embedding model name"},
        {"embed.batch_size", "batch-size", K::count, "32", "texts per embedding request"},
        {"synthetic", "synthetic", K::boolean, "false", "use the built-in Gaussian benchmark instead of data files"},
        {"synthetic.classes", "synthetic-classes", K::count, "5", "synthetic class count"},
        {"synthetic.spread", "synthetic-spread", K::real, "1.5", "synthetic per-class spread"},
        {"synthetic.pool_size", "synthetic-pool-size", K::count, "2000", "synthetic pool size"},
        {"synthetic.test_size", "synthetic-test-size", K::count, "300", "synthetic test size"},
        {"sweep.axis", "axis", K::text, "k_neighbors", "k_neighbors | pool_size | ood_ratio | theta"},
        {"sweep.values", "values", K::real_list, "", "comma-separated sweep values"},
        {"sweep.ood", "ood", K::path, "", "OOD source JSONL for ood_ratio sweeps and analyze ood"},
    };
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::optional<double> parse_real(std::string_view s) {
    double v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<bool> parse_bool(std::string_view s) {
    std::string l(s);
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
    if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
    if (l == "false" || l == "0" || l == "no" || l == "off") return false;
    return std::nullopt;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected,
                            SettingSource src) {
    throw ValidationError(std::string(key) + ": expected " + std::string(expected) + ", got '" + std::string(value) +
                          "' (from " + std::string(to_string(src)) + ")");
}

void check(const SettingDef& def, const std::string& v, SettingSource src) {
    if (v.empty()) return;
    switch (def.kind) {
        case K::text:
        case K::path: return;
        case K::integer:
            if (!parse_int(v)) bad_value(def.key, v, "an integer", src);
            return;
        case K::count: {
            const auto n = parse_int(v);
            if (!n || *n < 1) bad_value(def.key, v, "a positive integer", src);
            return;
        }
        case K::real:
            if (!parse_real(v)) bad_value(def.key, v, "a number", src);
            return;
        case K::boolean:
            if (!parse_bool(v)) bad_value(def.key, v, "true or false", src);
            return;
        case K::int_list:
            for (const auto& item : split_list(v))
                if (!parse_int(item)) bad_value(def.key, v, "a comma-separated list of integers", src);
            return;
        case K::real_list:
            for (const auto& item : split_list(v))
                if (!parse_real(item)) bad_value(def.key, v, "a comma-separated list of numbers", src);
            return;
    }
}

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + xs[i];
    return out;
}

}  // namespace

std::string SettingDef::env_name() const {
    std::string out = "NUC_";
    for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string_view to_string(SettingSource source) {
    switch (source) {
        case SettingSource::defaults: return "default";
        case SettingSource::file: return "config file";
        case SettingSource::env: return "environment";
        case SettingSource::flag: return "command line";
    }
    return "unknown";
}

std::optional<std::string> process_env(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
}

const std::vector<SettingDef>& Settings::definitions() {
    static const std::vector<SettingDef> defs = make_definitions();
    return defs;
}

const SettingDef* Settings::find(std::string_view key) {
    for (const auto& d : definitions())
        if (d.key == key) return &d;
    return nullptr;
}

void Settings::set(SettingSource layer, std::string_view key, std::string value, const std::filesystem::path& base_dir) {
    const SettingDef* def = find(key);
    if (!def) throw ValidationError("unknown setting '" + std::string(key) + "' (from " + std::string(to_string(layer)) + ")");
    if (def->kind != K::text && def->kind != K::path) value = trim(value);
    check(*def, value, layer);
    if (def->kind == K::path && !value.empty() && !base_dir.empty() && std::filesystem::path(value).is_relative())
        value = (base_dir / value).lexically_normal().string();
    layers_[static_cast<int>(layer)][std::string(key)] = std::move(value);
}

void Settings::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot read '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    load_text(buf.str(), path.parent_path());
}

void Settings::load_text(std::string_view text, const std::filesystem::path& base_dir) {
    std::vector<CLI::ConfigItem> items;
    try {
        std::istringstream in{std::string(text)};
        items = CLI::ConfigTOML().from_config(in);
    } catch (const CLI::Error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;
        std::string key;
        for (const auto& p : item.parents) key += p + ".";
        key += item.name;
        const SettingDef* def = find(key);
        if (def && item.inputs.size() > 1 && def->kind != K::int_list && def->kind != K::real_list)
            throw ValidationError(key + ": expected a single value (from config file)");
        set(SettingSource::file, key, join(item.inputs), base_dir);
    }
}

void Settings::load_env(const EnvLookup& env) {
    for (const auto& def : definitions())
        if (auto v = env(def.env_name())) set(SettingSource::env, def.key, *v, {});
}

void Settings::set_flag(std::string_view key, std::string value) { set(SettingSource::flag, key, std::move(value), {}); }

SettingSource Settings::source(std::string_view key) const {
    for (int layer = 3; layer >= 1; --layer)
        if (layers_[layer].count(key)) return static_cast<SettingSource>(layer);
    return SettingSource::defaults;
}

std::optional<std::string> Settings::value(std::string_view key) const {
    const SettingDef* def = find(key);
    if (!def) throw ValidationError("unknown setting '" + std::string(key) + "'");
    for (int layer = 3; layer >= 1; --layer) {
        auto it = layers_[layer].find(key);
        if (it != layers_[layer].end()) return it->second.empty() ? std::nullopt : std::optional(it->second);
    }
    return def->fallback.empty() ? std::nullopt : std::optional(def->fallback);
}

std::string Settings::text(std::string_view key) const { return value(key).value_or(""); }

std::filesystem::path Settings::path(std::string_view key) const { return value(key).value_or(""); }

std::int64_t Settings::integer(std::string_view key) const {
    const auto v = value(key);
    if (!v) throw ValidationError(std::string(key) + ": no value given");
    return *parse_int(*v);
}

std::size_t Settings::count(std::string_view key) const { return static_cast<std::size_t>(integer(key)); }

double Settings::real(std::string_view key) const {
    const auto v = value(key);
    if (!v) throw ValidationError(std::string(key) + ": no value given");
    return *parse_real(*v);
}

bool Settings::boolean(std::string_view key) const {
    const auto v = value(key);
    if (!v) throw ValidationError(std::string(key) + ": no value given");
    return *parse_bool(*v);
}

std::vector<std::int64_t> Settings::int_list(std::string_view key) const {
    std::vector<std::int64_t> out;
    if (auto v = value(key))
        for (const auto& item : split_list(*v)) out.push_back(*parse_int(item));
    return out;
}

std::vector<double> Settings::real_list(std::string_view key) const {
    std::vector<double> out;
    if (auto v = value(key))
        for (const auto& item : split_list(*v)) out.push_back(*parse_real(item));
    return out;
}

ExperimentConfig Settings::experiment() const {
    ExperimentConfig cfg;
    cfg.seeds = int_list("seed");
    cfg.backend = parse_backend_kind(text("backend"));
    cfg.k_neighbors = count("k");
    cfg.policy.kind = parse_policy_kind(text("policy"));
    cfg.policy.theta = real("theta");
    cfg.policy.always_admit_anchor = boolean("always_admit_anchor");
    cfg.base.kind = parse_base_kind(text("base"));
    cfg.base.n_samples = count("n_samples");
    cfg.base.k_demos = count("k_demos");
    cfg.testnuc = boolean("testnuc");
    cfg.neighbor_mode = parse_neighbor_mode(text("neighbor_mode"));
    cfg.pool_path = path("pool");
    cfg.test_path = path("test");
    cfg.data_path = path("data");
    cfg.test_size = count("test_size");
    cfg.cache_path = path("cache");
    cfg.cache_enabled = !cfg.cache_path.empty();
    cfg.llm_base_url = text("llm_base_url");
    cfg.predictor.model_name = text("predictor.model");
    cfg.predictor.temperature = real("predictor.temperature");
    cfg.predictor.top_p = real("predictor.top_p");
    cfg.predictor.max_retries = static_cast<int>(integer("predictor.max_retries"));
    cfg.oracle.accuracy = real("oracle.accuracy");
    cfg.oracle.consistency = real("oracle.consistency");
    cfg.cost.token_inflation = real("cost.token_inflation");
    cfg.cost.price_per_1k_tokens = real("cost.price_per_1k");
    cfg.simulated_call_latency = real("cost.call_latency");
    if (value("parallelism"))
        cfg.parallelism = count("parallelism");
    else
        cfg.parallelism = cfg.backend == BackendKind::remote ? 4 : default_parallelism();
    cfg.predictor.parallelism = cfg.parallelism;
    cfg.validate();
    return cfg;
}

}  // namespace nuc
