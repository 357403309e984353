#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlab/dyadic/grid_function.hpp"

namespace rlab::dyadic {

struct CorpusEntry {
    std::string name;
    GridFunction u;
};

// Fixed corpus of 20 band-limited functions on the 1D unit circle (N points) used to
// compare classical_holder_norm against holder_norm_star: single modes, two-mode
// beats, smooth bumps of several widths, lacunary sums and random band-limited noise.
// Every member has its spectrum below 2^{n_max - 1}.
std::vector<CorpusEntry> norm_corpus(int n = 256, std::uint64_t seed = 2024);

struct NormRatio {
    std::string name;
    double p = 0.0;
    double classical = 0.0;
    double star = 0.0;
    double ratio = 0.0;  // classical / star
};

std::vector<NormRatio> norm_ratios(const std::vector<CorpusEntry>& corpus, const std::vector<double>& ps);

}  // namespace rlab::dyadic
