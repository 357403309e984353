#include "rlab/determinants/matching.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "json.hpp"
#include "rlab/common/errors.hpp"

namespace rlab::determinants {

namespace {

nlohmann::json to_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

}  // namespace

MatchingTable compare_zeros_eigenvalues(const transfer::ResonanceReport& report,
                                        const ZeroReport& zeros, double radius, double tol) {
    require(radius > 0.0, "matching radius must be positive");
    MatchingTable t;
    t.radius = radius;
    t.tolerance = tol;
    std::vector<cplx> a, b;
    for (const auto& z : zeros.zeros)
        if (std::abs(z.z) < radius)
            for (int k = 0; k < z.order; ++k) a.push_back(1.0 / z.z);
    for (const auto& r : report.accepted)
        if (std::abs(r.value) > 1.0 / radius)
            for (int k = 0; k < r.multiplicity; ++k) b.push_back(r.value);
    std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) cand.emplace_back(std::abs(a[i] - b[j]), i, j);
    std::sort(cand.begin(), cand.end());
    std::vector<bool> ua(a.size(), false), ub(b.size(), false);
    for (auto [d, i, j] : cand) {
        if (d > tol) break;
        if (ua[i] || ub[j]) continue;
        ua[i] = ub[j] = true;
        t.pairs.push_back({a[i], b[j], d});
        t.max_distance = std::max(t.max_distance, d);
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!ua[i]) t.unmatched_zeros.push_back(a[i]);
    for (std::size_t j = 0; j < b.size(); ++j)
        if (!ub[j]) t.unmatched_resonances.push_back(b[j]);
    return t;
}

MatchingTable compare_zeros_eigenvalues(const transfer::ResonanceReport& report,
                                        const DeterminantSeries& series, double radius, double tol) {
    return compare_zeros_eigenvalues(report, determinant_zeros(series), radius, tol);
}

void export_series(const DeterminantSeries& s, const ZeroReport& zeros, const std::string& stem) {
    nlohmann::json j;
    j["M"] = static_cast<int>(s.traces.size());
    j["reliability_radius"] = s.reliability_radius;
    j["decay_rate"] = s.decay_rate;
    j["exact"] = s.exact;
    j["diagnostic"] = s.diagnostic;
    j["traces"] = nlohmann::json::array();
    for (auto t : s.traces) j["traces"].push_back(to_json(t));
    j["coefficients"] = nlohmann::json::array();
    for (auto a : s.coeffs) j["coefficients"].push_back(to_json(a));
    j["zeros"] = nlohmann::json::array();
    for (const auto& z : zeros.zeros)
        j["zeros"].push_back({{"z", to_json(z.z)}, {"order", z.order}, {"agreement", z.agreement}});
    j["zeros_diagnostic"] = zeros.diagnostic;
    std::ofstream(stem + ".json") << j.dump(2) << "\n";
    std::ofstream csv(stem + "_traces.csv");
    csv.precision(17);
    csv << "m,t_re,t_im,a_re,a_im\n";
    for (std::size_t m = 0; m < s.coeffs.size(); ++m) {
        cplx t = m == 0 ? cplx{} : s.traces[m - 1];
        csv << m << ',' << t.real() << ',' << t.imag() << ',' << s.coeffs[m].real() << ','
            << s.coeffs[m].imag() << '\n';
    }
}

void export_matching(const MatchingTable& t, const std::string& stem) {
    nlohmann::json j;
    j["radius"] = t.radius;
    j["tolerance"] = t.tolerance;
    j["max_distance"] = t.max_distance;
    j["perfect"] = t.perfect();
    j["pairs"] = nlohmann::json::array();
    for (const auto& p : t.pairs)
        j["pairs"].push_back({{"zero_reciprocal", to_json(p.zero_reciprocal)},
                              {"resonance", to_json(p.resonance)},
                              {"distance", p.distance}});
    j["unmatched_zeros"] = nlohmann::json::array();
    for (auto z : t.unmatched_zeros) j["unmatched_zeros"].push_back(to_json(z));
    j["unmatched_resonances"] = nlohmann::json::array();
    for (auto r : t.unmatched_resonances) j["unmatched_resonances"].push_back(to_json(r));
    std::ofstream(stem + ".json") << j.dump(2) << "\n";
    std::ofstream csv(stem + ".csv");
    csv.precision(17);
    csv << "kind,zero_reciprocal_re,zero_reciprocal_im,resonance_re,resonance_im,distance\n";
    for (const auto& p : t.pairs)
        csv << "pair," << p.zero_reciprocal.real() << ',' << p.zero_reciprocal.imag() << ','
            << p.resonance.real() << ',' << p.resonance.imag() << ',' << p.distance << '\n';
    for (auto z : t.unmatched_zeros) csv << "zero," << z.real() << ',' << z.imag() << ",,,\n";
    for (auto r : t.unmatched_resonances) csv << "resonance,,," << r.real() << ',' << r.imag() << ",\n";
}

}  // namespace rlab::determinants
