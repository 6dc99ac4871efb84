#pragma once

#include "nuc/corpus.hpp"
#include "nuc/http.hpp"

#include <cstddef>
#include <string>

namespace nuc {

struct EmbedOptions {
    std::size_t batch_size = 32;
    std::size_t parallelism = 4;
    RetryPolicy retry{};
    // Falls back to NUC_EMBED_API_KEY when empty.
    std::string api_key;
};

struct EmbedResult {
    Corpus corpus;
    std::size_t requests = 0;
};

/// Fetches embeddings from an OpenAI-compatible embeddings endpoint for every
/// example that lacks one. Already-embedded examples are skipped. Batches may be
/// in flight concurrently; results are committed in input order. Vectors are
/// returned as served (not normalized).
EmbedResult embed_remote(const Corpus& corpus, const std::string& endpoint_url,
                         const std::string& model_name, const EmbedOptions& options = {});

}  // namespace nuc
