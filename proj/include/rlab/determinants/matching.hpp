#pragma once

#include <string>
#include <vector>

#include "rlab/determinants/series.hpp"
#include "rlab/transfer/resonances.hpp"

namespace rlab::determinants {

struct MatchedPair {
    cplx zero_reciprocal;   // 1/z
    cplx resonance;
    double distance = 0.0;
};

struct MatchingTable {
    double radius = 0.0;
    double tolerance = 0.0;
    std::vector<MatchedPair> pairs;
    std::vector<cplx> unmatched_zeros;        // stored as 1/z
    std::vector<cplx> unmatched_resonances;
    double max_distance = 0.0;

    bool perfect() const { return unmatched_zeros.empty() && unmatched_resonances.empty(); }
};

// Pairs 1/z for zeros with |z| < radius against accepted resonances with
// |lambda| > 1/radius, each repeated by its order/multiplicity. Pairs are taken
// greedily by increasing distance; pairs farther apart than tol stay unmatched.
MatchingTable compare_zeros_eigenvalues(const transfer::ResonanceReport& report,
                                        const DeterminantSeries& series, double radius,
                                        double tol = 1e-5);
MatchingTable compare_zeros_eigenvalues(const transfer::ResonanceReport& report,
                                        const ZeroReport& zeros, double radius,
                                        double tol = 1e-5);

// stem.json (series + zeros) and stem_traces.csv (m, t_m, a_m).
void export_series(const DeterminantSeries& series, const ZeroReport& zeros, const std::string& stem);
// stem.json and stem.csv
void export_matching(const MatchingTable& table, const std::string& stem);

}  // namespace rlab::determinants
