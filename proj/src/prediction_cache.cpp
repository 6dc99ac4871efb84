#include "nuc/prediction_cache.hpp"

#include "nuc/error.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <array>
#include <vector>

namespace nuc {

using json = nlohmann::json;

std::string prompt_fingerprint(std::string_view model, std::string_view prompt, double temperature, double top_p,
                               std::uint32_t draw) {
    json key = json::array({std::string(model), std::string(prompt), temperature, top_p});
    if (draw > 0) key.push_back(draw);
    const std::string bytes = key.dump();

    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

PredictionCache::PredictionCache(const std::filesystem::path& journal) : path_(journal) {
    std::vector<std::string> order;
    if (std::filesystem::exists(journal)) {
        std::ifstream in(journal);
        if (!in) throw IoError("cannot read cache '" + journal.string() + "'");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json rec;
            try {
                rec = json::parse(line);
                auto fp = rec.at("fp").get<std::string>();
                Entry e{rec.at("label").get<std::string>(), rec.at("conf").get<double>(), rec.at("raw").get<std::string>()};
                if (entries_.emplace(fp, std::move(e)).second) order.push_back(std::move(fp));
            } catch (const json::exception&) {
                // torn or foreign line
                continue;
            }
        }
    }

    const auto tmp = std::filesystem::path(journal.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write cache '" + tmp.string() + "'");
        for (const auto& fp : order) {
            const auto& e = entries_.at(fp);
            out << json{{"fp", fp}, {"label", e.label}, {"conf", e.confidence}, {"raw", e.raw}}.dump() << '\n';
        }
        if (!out) throw IoError("cannot write cache '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, journal);
    journal_.open(journal, std::ios::binary | std::ios::app);
    if (!journal_) throw IoError("cannot append to cache '" + journal.string() + "'");
}

std::optional<Prediction> PredictionCache::get(const std::string& fingerprint) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(fingerprint);
    if (it == entries_.end()) return std::nullopt;
    const Entry& e = it->second;
    Prediction p;
    p.label = e.label;
    p.confidence = e.confidence;
    p.raw = e.raw;
    p.source = PredictionSource::cache;
    p.valid = !e.label.empty();
    return p;
}

bool PredictionCache::put(const std::string& fingerprint, const Prediction& prediction) {
    std::unique_lock lock(mutex_);
    Entry e{prediction.valid ? prediction.label : std::string(), prediction.confidence, prediction.raw};
    auto [it, inserted] = entries_.emplace(fingerprint, e);
    if (inserted && journal_.is_open()) {
        journal_ << json{{"fp", fingerprint}, {"label", e.label}, {"conf", e.confidence}, {"raw", e.raw}}.dump()
                 << '\n';
        journal_.flush();
        if (!journal_) throw IoError("cache journal write failed");
    }
    return inserted;
}

std::size_t PredictionCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

}  // namespace nuc
