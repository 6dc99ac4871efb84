#pragma once

#include "nuc/corpus.hpp"

#include <cstddef>
#include <cstdint>
#include <string>

namespace nuc {

// Isotropic Gaussian clusters. Every point shares a common offset direction so
// that cosine similarities stay mostly positive, as with text embeddings.
struct SyntheticSpec {
    std::size_t n_classes = 5;
    std::size_t dimension = 16;
    double class_separation = 1.0;  // norm of each class center
    double spread = 1.5;            // per-class standard deviation, scaled by 1/sqrt(d) per axis
    double common_offset = 1.0;
    std::size_t pool_size = 2000;
    std::size_t test_size = 300;

    void validate() const;
};

struct SyntheticBenchmark {
    Corpus test;
    Corpus pool;
};

/// Labels are "c0".."c{n-1}", ids "t<i>" for test and "p<i>" for pool. Class
/// centers and samples are drawn from `seed`; embeddings are normalized.
SyntheticBenchmark make_synthetic_benchmark(const SyntheticSpec& spec, std::uint64_t seed);

/// A single far cluster of `n` examples labeled with the OOD sentinel, ids
/// "x<i>". Its center is orthogonal to the class centers' span in expectation.
Corpus make_ood_cluster(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace nuc
