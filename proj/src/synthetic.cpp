#include "nuc/synthetic.hpp"

#include "nuc/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace nuc {

namespace {

Eigen::VectorXd gaussian(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = n01(rng);
    return v;
}

Eigen::VectorXd offset_direction(std::size_t d) {
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), 1.0 / std::sqrt(static_cast<double>(d)));
}

Embedding sample(const Eigen::VectorXd& center, const SyntheticSpec& spec, std::mt19937_64& rng) {
    const double scale = spec.spread / std::sqrt(static_cast<double>(spec.dimension));
    Eigen::VectorXd x = center + scale * gaussian(spec.dimension, rng);
    return x.normalized().cast<float>();
}

std::vector<Example> draw(const std::vector<Eigen::VectorXd>& centers, const std::vector<std::string>& labels,
                          const SyntheticSpec& spec, std::size_t n, char prefix, std::mt19937_64& rng) {
    std::vector<Example> out;
    out.reserve(n);
    std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = pick(rng);
        Example e;
        e.id = prefix + std::to_string(i);
        e.text = "synthetic sample " + e.id;
        e.gold_label = labels[c];
        e.embedding = sample(centers[c], spec, rng);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (n_classes < 2) throw ValidationError("synthetic data needs at least 2 classes");
    if (dimension < 2) throw ValidationError("synthetic dimension must be at least 2");
    if (!(spread > 0.0) || !(class_separation >= 0.0) || !(common_offset >= 0.0))
        throw ValidationError("synthetic spread must be positive, separation and offset non-negative");
}

SyntheticBenchmark make_synthetic_benchmark(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    const Eigen::VectorXd offset = spec.common_offset * offset_direction(spec.dimension);
    std::vector<Eigen::VectorXd> centers;
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        centers.push_back(offset + spec.class_separation * gaussian(spec.dimension, rng).normalized());
        labels.push_back("c" + std::to_string(c));
    }
    auto test = draw(centers, labels, spec, spec.test_size, 't', rng);
    auto pool = draw(centers, labels, spec, spec.pool_size, 'p', rng);
    return {Corpus(std::move(test), labels), Corpus(std::move(pool), labels)};
}

Corpus make_ood_cluster(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed ^ 0x6f6f64ULL);
    const Eigen::VectorXd offset = spec.common_offset * offset_direction(spec.dimension);
    const Eigen::VectorXd center = offset + spec.class_separation * gaussian(spec.dimension, rng).normalized();
    std::vector<Example> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Example e;
        e.id = "x" + std::to_string(i);
        e.text = "outlier sample " + e.id;
        e.gold_label = std::string(kOodLabel);
        e.embedding = sample(center, spec, rng);
        out.push_back(std::move(e));
    }
    return Corpus(std::move(out));
}

}  // namespace nuc
