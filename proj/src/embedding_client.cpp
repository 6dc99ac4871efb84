#include "nuc/embedding_client.hpp"

#include "nuc/error.hpp"
#include "nuc/parallel.hpp"

#include <atomic>

namespace nuc {

using json = nlohmann::json;

namespace {

std::vector<Embedding> parse_embeddings(const json& response, std::size_t expected) {
    if (!response.is_object() || !response.contains("data") || !response["data"].is_array())
        throw RemoteError("embedding response has no \"data\" array");
    const auto& data = response["data"];
    if (data.size() != expected)
        throw RemoteError("embedding response has " + std::to_string(data.size()) + " items, expected " +
                          std::to_string(expected));
    std::vector<Embedding> out(expected);
    std::vector<bool> filled(expected, false);
    for (std::size_t pos = 0; pos < data.size(); ++pos) {
        const auto& item = data[pos];
        const std::size_t index = item.contains("index") ? item["index"].get<std::size_t>() : pos;
        if (index >= expected || filled[index]) throw RemoteError("embedding response has a bad index");
        const auto& vec = item.at("embedding");
        if (!vec.is_array() || vec.empty()) throw RemoteError("embedding response item has no vector");
        Embedding e(static_cast<Eigen::Index>(vec.size()));
        for (std::size_t j = 0; j < vec.size(); ++j) e[static_cast<Eigen::Index>(j)] = vec[j].get<float>();
        out[index] = std::move(e);
        filled[index] = true;
    }
    return out;
}

}  // namespace

EmbedResult embed_remote(const Corpus& corpus, const std::string& endpoint_url,
                         const std::string& model_name, const EmbedOptions& options) {
    if (options.batch_size == 0) throw ValidationError("batch size must be positive");
    const Endpoint endpoint = parse_url(endpoint_url);
    const std::string api_key = options.api_key.empty() ? env_or_empty("NUC_EMBED_API_KEY") : options.api_key;

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].text.empty()) throw ValidationError("example '" + corpus[i].id + "' has empty text");
        if (!corpus[i].embedding) pending.push_back(i);
    }
    if (pending.empty()) return {corpus, 0};

    const std::size_t n_batches = (pending.size() + options.batch_size - 1) / options.batch_size;
    std::vector<std::vector<Embedding>> results(n_batches);
    std::atomic<std::size_t> requests{0};

    parallel_for(n_batches, options.parallelism, [&](std::size_t b) {
        const std::size_t begin = b * options.batch_size;
        const std::size_t end = std::min(pending.size(), begin + options.batch_size);
        json inputs = json::array();
        for (std::size_t i = begin; i < end; ++i) inputs.push_back(corpus[pending[i]].text);
        json body = {{"model", model_name}, {"input", std::move(inputs)}};
        ++requests;
        results[b] = parse_embeddings(post_json(endpoint, body, api_key, options.retry), end - begin);
    });

    std::vector<Example> examples = corpus.examples();
    std::optional<std::size_t> dimension = corpus.dimension();
    std::size_t k = 0;
    for (auto& batch : results) {
        for (auto& e : batch) {
            const auto d = static_cast<std::size_t>(e.size());
            if (dimension && *dimension != d)
                throw ValidationError("embedding dimension " + std::to_string(d) + " for '" +
                                      examples[pending[k]].id + "' differs from " + std::to_string(*dimension));
            dimension = d;
            examples[pending[k++]].embedding = std::move(e);
        }
    }
    return {Corpus(std::move(examples), corpus.label_space()), requests.load()};
}

}  // namespace nuc
