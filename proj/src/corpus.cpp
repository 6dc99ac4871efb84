#include "nuc/corpus.hpp"

#include "nuc/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace nuc {

using json = nlohmann::json;

namespace {

void check_example(const Example& ex, std::optional<std::size_t>& dimension) {
    if (ex.id.empty()) throw ValidationError("example with empty id");
    if (ex.text.empty()) throw ValidationError("example '" + ex.id + "' has empty text");
    if (ex.embedding) {
        const auto d = static_cast<std::size_t>(ex.embedding->size());
        if (d == 0) throw ValidationError("example '" + ex.id + "' has an empty embedding");
        if (!dimension) {
            dimension = d;
        } else if (*dimension != d) {
            throw ValidationError("example '" + ex.id + "' has embedding dimension " +
                                  std::to_string(d) + ", corpus dimension is " +
                                  std::to_string(*dimension));
        }
    }
}

Example example_from_json(const json& obj) {
    if (!obj.is_object()) throw ValidationError("expected a JSON object");
    Example ex;
    if (!obj.contains("id") || !obj["id"].is_string()) throw ValidationError("missing string field \"id\"");
    if (!obj.contains("text") || !obj["text"].is_string())
        throw ValidationError("missing string field \"text\"");
    ex.id = obj["id"].get<std::string>();
    ex.text = obj["text"].get<std::string>();
    if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw ValidationError("field \"label\" must be a string");
        ex.gold_label = it->get<std::string>();
    }
    if (auto it = obj.find("embedding"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) throw ValidationError("field \"embedding\" must be an array");
        Embedding v(static_cast<Eigen::Index>(it->size()));
        Eigen::Index i = 0;
        for (const auto& x : *it) {
            if (!x.is_number()) throw ValidationError("field \"embedding\" must contain numbers");
            v[i++] = static_cast<float>(x.get<double>());
        }
        ex.embedding = std::move(v);
    }
    return ex;
}

void append_float(std::string& out, float x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) throw ValidationError("cannot format embedding component");
    out.append(buf, end);
}

}  // namespace

Corpus::Corpus(std::vector<Example> examples, std::vector<std::string> label_space)
    : examples_(std::move(examples)) {
    by_id_.reserve(examples_.size());
    for (std::size_t i = 0; i < examples_.size(); ++i) {
        const auto& ex = examples_[i];
        check_example(ex, dimension_);
        if (!by_id_.emplace(ex.id, i).second) throw ValidationError("duplicate id '" + ex.id + "'");
    }

    if (label_space.empty()) {
        std::set<std::string> observed;
        for (const auto& ex : examples_)
            if (ex.gold_label && *ex.gold_label != kOodLabel) observed.insert(*ex.gold_label);
        label_space_.assign(observed.begin(), observed.end());
    } else {
        std::set<std::string> seen;
        for (const auto& l : label_space) {
            if (l.empty()) throw ValidationError("empty label in label space");
            if (l == kOodLabel) throw ValidationError("label space may not contain the reserved OOD label");
            if (!seen.insert(l).second) throw ValidationError("duplicate label '" + l + "' in label space");
        }
        label_space_ = std::move(label_space);
        for (const auto& ex : examples_) {
            if (ex.gold_label && *ex.gold_label != kOodLabel && !has_label(*ex.gold_label))
                throw ValidationError("example '" + ex.id + "' has label '" + *ex.gold_label +
                                      "' outside the label space");
        }
    }
}

bool Corpus::fully_embedded() const noexcept {
    return std::all_of(examples_.begin(), examples_.end(), [](const Example& e) { return e.embedding.has_value(); });
}

bool Corpus::fully_labeled() const noexcept {
    return std::all_of(examples_.begin(), examples_.end(), [](const Example& e) { return e.gold_label.has_value(); });
}

bool Corpus::has_label(std::string_view label) const {
    return std::find(label_space_.begin(), label_space_.end(), label) != label_space_.end();
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

Corpus parse_jsonl(std::istream& in, std::optional<std::vector<std::string>> label_space) {
    std::vector<Example> examples;
    std::set<std::string> ids;
    std::optional<std::size_t> dimension;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
        }
        try {
            Example ex = example_from_json(obj);
            check_example(ex, dimension);
            if (!ids.insert(ex.id).second) throw ValidationError("duplicate id '" + ex.id + "'");
            examples.push_back(std::move(ex));
        } catch (const ParseError&) {
            throw;
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return Corpus(std::move(examples), label_space.value_or(std::vector<std::string>{}));
}

Corpus load_jsonl(const std::filesystem::path& path, std::optional<std::vector<std::string>> label_space) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
    return parse_jsonl(in, std::move(label_space));
}

std::string to_jsonl_line(const Example& ex) {
    std::string out = "{\"id\":" + json(ex.id).dump() + ",\"text\":" + json(ex.text).dump();
    if (ex.gold_label) out += ",\"label\":" + json(*ex.gold_label).dump();
    if (ex.embedding) {
        out += ",\"embedding\":[";
        for (Eigen::Index i = 0; i < ex.embedding->size(); ++i) {
            if (i) out += ',';
            append_float(out, (*ex.embedding)[i]);
        }
        out += ']';
    }
    out += '}';
    return out;
}

void write_jsonl(std::ostream& out, const Corpus& corpus) {
    for (const auto& ex : corpus) out << to_jsonl_line(ex) << '\n';
}

void save_jsonl(const std::filesystem::path& path, const Corpus& corpus) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_jsonl(out, corpus);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Corpus normalize(const Corpus& corpus) {
    std::vector<Example> out = corpus.examples();
    for (auto& ex : out) {
        if (!ex.embedding) throw ValidationError("example '" + ex.id + "' has no embedding");
        if (ex.embedding->isZero(0.0f)) throw ValidationError("example '" + ex.id + "' has a zero-vector embedding");
        ex.embedding = normalized_embedding(*ex.embedding);
    }
    return Corpus(std::move(out), corpus.label_space());
}

Corpus subset(const Corpus& corpus, std::span<const std::size_t> indices) {
    std::vector<Example> out;
    out.reserve(indices.size());
    for (auto i : indices) {
        if (i >= corpus.size()) throw ValidationError("subset index out of range");
        out.push_back(corpus[i]);
    }
    return Corpus(std::move(out), corpus.label_space());
}

Split split_test_pool(const Corpus& corpus, std::size_t test_size, std::uint64_t seed) {
    if (test_size == 0 || test_size >= corpus.size())
        throw ValidationError("test size " + std::to_string(test_size) + " must be in [1, " +
                              std::to_string(corpus.size()) + ")");
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::span<const std::size_t> all(order);
    return {subset(corpus, all.first(test_size)), subset(corpus, all.subspan(test_size))};
}

}  // namespace nuc
