#include "nuc/retrieval.hpp"

namespace nuc {

Neighborhood top_k(const Example& anchor, const EmbeddingIndex& index, std::size_t k, bool include_anchor) {
    if (!anchor.embedding) throw ValidationError("anchor '" + anchor.id + "' has no embedding");
    return index.search(anchor.id, *anchor.embedding, k, {.include_anchor = include_anchor});
}

Neighborhood top_k(const Example& anchor, const Corpus& pool, std::size_t k, bool include_anchor) {
    return top_k(anchor, EmbeddingIndex(pool), k, include_anchor);
}

}  // namespace nuc
