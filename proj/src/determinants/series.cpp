#include "rlab/determinants/series.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "rlab/common/errors.hpp"

namespace rlab::determinants {

namespace {

// Neumaier-compensated complex sum in a fixed order.
struct CompensatedSum {
    double re = 0, im = 0, cre = 0, cim = 0;

    static void add(double& s, double& c, double x) {
        double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    void operator+=(cplx x) {
        add(re, cre, x.real());
        add(im, cim, x.imag());
    }
    cplx value() const { return {re + cre, im + cim}; }
};

cplx horner(const std::vector<cplx>& a, cplx z, cplx* deriv = nullptr) {
    cplx p{}, dp{};
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        dp = dp * z + p;
        p = p * z + *it;
    }
    if (deriv) *deriv = dp;
    return p;
}

double noise_floor(const std::vector<cplx>& a) {
    double peak = 0;
    for (const auto& c : a) peak = std::max(peak, std::abs(c));
    return 64 * std::numeric_limits<double>::epsilon() * peak * static_cast<double>(a.size());
}

// Drops trailing coefficients at the rounding floor; they carry no information
// and their powers z^m would dominate Newton steps far from the origin.
std::vector<cplx> trimmed(std::vector<cplx> a) {
    const double floor = noise_floor(a);
    while (a.size() > 1 && std::abs(a.back()) <= floor) a.pop_back();
    return a;
}

// Nonzero roots of sum a_m z^m (a_0 = 1, already trimmed). The reversed
// polynomial lambda^M + a_1 lambda^{M-1} + ... + a_M is monic, and its companion
// eigenvalues are lambda = 1/z; each z is then polished by Newton on the series.
// A polish step that wanders off (to a neighbouring root) is discarded.
std::vector<cplx> series_roots(const std::vector<cplx>& a) {
    const int deg = static_cast<int>(a.size()) - 1;
    if (deg < 1) return {};
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(deg, deg);
    for (int j = 0; j < deg; ++j) c(0, j) = -a[j + 1];
    for (int i = 1; i < deg; ++i) c(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
    if (es.info() != Eigen::Success) throw NumericalError("companion eigenvalue solver did not converge");
    std::vector<cplx> out;
    for (int i = 0; i < deg; ++i) {
        cplx l = es.eigenvalues()(i);
        if (l == cplx{}) continue;
        const cplx z0 = 1.0 / l;
        cplx z = z0;
        for (int it = 0; it < 20; ++it) {
            cplx dp;
            cplx p = horner(a, z, &dp);
            if (dp == cplx{}) break;
            cplx step = p / dp;
            z -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        if (!(std::abs(z - z0) < 1e-6 * std::max(1.0, std::abs(z0)))) z = z0;
        out.push_back(z);
    }
    return out;
}

}  // namespace

cplx trace_from_orbits(const MapModel& map, const PeriodicOrbitData& orbits) {
    const int m = orbits.m;
    if (map.is_linear() && orbits.method == "lattice") {
        // Constant Jacobian: t_m = (sum of weights) / |det(I - A^m)|, and with a
        // constant weight the count equals the determinant exactly.
        long long count = static_cast<long long>(orbits.points.size());
        long long det = periodic_count(map, m);
        bool constant = !orbits.points.empty();
        for (const auto& p : orbits.points) constant = constant && p.weight == orbits.points.front().weight;
        if (constant && count == det) return orbits.points.front().weight;
        CompensatedSum s;
        for (const auto& p : orbits.points) s += p.weight;
        return s.value() / static_cast<double>(det);
    }
    CompensatedSum s;
    for (const auto& p : orbits.points) {
        double det;
        if (map.dim() == 1) {
            det = std::abs(1.0 - 1.0 / p.jacobian(0, 0));
        } else {
            det = std::abs((Mat2::Identity() - p.jacobian).determinant());
        }
        if (det < 1e-12) throw NumericalError("parabolic periodic point: |det(1 - DT^m)| < 1e-12");
        s += p.weight / det;
    }
    return s.value();
}

cplx trace_sum(const MapModel& map, const Weight& g, int m) {
    return trace_from_orbits(map, periodic_points(map, m, g));
}

std::vector<cplx> determinant_coefficients(const std::vector<cplx>& traces) {
    const int big_m = static_cast<int>(traces.size());
    std::vector<cplx> a(big_m + 1);
    a[0] = 1.0;
    for (int m = 1; m <= big_m; ++m) {
        cplx s{};
        for (int j = 1; j <= m; ++j) s += traces[j - 1] * a[m - j];
        a[m] = -s / static_cast<double>(m);
    }
    return a;
}

std::vector<cplx> traces_from_coefficients(const std::vector<cplx>& a, int count) {
    require(!a.empty() && a[0] == cplx(1.0), "series must start with a_0 = 1");
    require(count >= 0 && count < static_cast<int>(a.size()), "not enough coefficients");
    std::vector<cplx> t(count);
    for (int m = 1; m <= count; ++m) {
        cplx s = static_cast<double>(m) * a[m];
        for (int j = 1; j < m; ++j) s += t[j - 1] * a[m - j];
        t[m - 1] = -s;
    }
    return t;
}

double reliability_radius(const std::vector<cplx>& coeffs, double* rate_out, std::string* diagnostic) {
    const int big_m = static_cast<int>(coeffs.size()) - 1;
    const double floor = noise_floor(coeffs);
    // fit log|a_m| = alpha + beta m over the last third, above the rounding floor
    const int start = std::max(1, big_m - std::max(2, (big_m + 1) / 3) + 1);
    std::vector<std::pair<double, double>> pts;
    for (int m = start; m <= big_m; ++m)
        if (std::abs(coeffs[m]) > floor) pts.emplace_back(m, std::log(std::abs(coeffs[m])));
    auto note = [&](const std::string& s) {
        if (diagnostic) *diagnostic = s;
    };
    if (pts.size() < 2) {
        // Tail is at the rounding floor: the truncation is numerically a polynomial.
        if (rate_out) *rate_out = 0.0;
        note("coefficients beyond index " + std::to_string(start - 1) + " are at the rounding floor");
        return kReliabilityCap;
    }
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
        mx += x / pts.size();
        my += y / pts.size();
    }
    double sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    const double beta = sxy / sxx, alpha = my - beta * mx;
    const double rate = std::exp(beta);
    if (rate_out) *rate_out = rate;
    auto tail = [&](double r) {
        double q = rate * r;
        if (q >= 1.0) return std::numeric_limits<double>::infinity();
        return std::exp(alpha + (big_m + 1) * (beta + std::log(r))) / (1.0 - q);
    };
    if (tail(kReliabilityCap) < kTailTolerance) {
        note("geometric tail fit; radius capped");
        return kReliabilityCap;
    }
    double lo = 0.0, hi = std::min(kReliabilityCap, 1.0 / rate);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (tail(mid) < kTailTolerance ? lo : hi) = mid;
    }
    std::ostringstream os;
    os << "geometric tail fit, rate " << rate;
    note(os.str());
    return lo;
}

DeterminantSeries series_from_traces(std::vector<cplx> traces) {
    require(!traces.empty(), "need at least one trace");
    DeterminantSeries s;
    s.coeffs = determinant_coefficients(traces);
    s.traces = std::move(traces);
    s.reliability_radius = reliability_radius(s.coeffs, &s.decay_rate, &s.diagnostic);
    return s;
}

DeterminantSeries series_from_polynomial(std::vector<cplx> coeffs) {
    require(!coeffs.empty() && coeffs[0] == cplx(1.0), "determinant polynomial must have a_0 = 1");
    DeterminantSeries s;
    s.traces = traces_from_coefficients(coeffs, static_cast<int>(coeffs.size()) - 1);
    s.coeffs = std::move(coeffs);
    s.exact = true;
    s.reliability_radius = kReliabilityCap;
    s.diagnostic = "exact polynomial";
    return s;
}

DeterminantSeries determinant_series(const MapModel& map, const Weight& g, int max_m) {
    require(max_m >= 1, "need M >= 1");
    std::vector<cplx> t;
    for (int m = 1; m <= max_m; ++m) t.push_back(trace_sum(map, g, m));
    return series_from_traces(std::move(t));
}

ZeroReport determinant_zeros(const DeterminantSeries& series) {
    ZeroReport rep;
    require(series.reliability_radius > 0.0, "reliability radius must be positive");
    const auto& a = series.coeffs;
    const int big_m = static_cast<int>(a.size()) - 1;
    std::vector<cplx> coarse;
    if (!series.exact) {
        if (big_m < 3) {
            rep.diagnostic = "fewer than three coefficients beyond a_0: no truncation check possible";
            return rep;
        }
        coarse = series_roots(trimmed(std::vector<cplx>(a.begin(), a.end() - 2)));
    }
    std::vector<cplx> zs;
    for (auto z : series_roots(trimmed(a)))
        if (std::abs(z) < series.reliability_radius) zs.push_back(z);
    std::sort(zs.begin(), zs.end(), [](cplx x, cplx y) {
        return std::abs(x) != std::abs(y) ? std::abs(x) < std::abs(y) : std::arg(x) < std::arg(y);
    });
    std::vector<bool> used(zs.size(), false);
    int rejected = 0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (used[i]) continue;
        DeterminantZero dz;
        dz.z = zs[i];
        used[i] = true;
        for (std::size_t j = i + 1; j < zs.size(); ++j)
            if (!used[j] && std::abs(zs[j] - zs[i]) < 1e-6 * std::max(1.0, std::abs(zs[i]))) {
                used[j] = true;
                ++dz.order;
            }
        if (!series.exact) {
            double best = std::numeric_limits<double>::infinity();
            for (auto c : coarse) best = std::min(best, std::abs(c - dz.z));
            dz.agreement = best;
            // clustered roots of order k only agree to about the k-th root of the tolerance
            double tol = dz.order == 1 ? 1e-8 : std::pow(1e-8, 1.0 / dz.order);
            if (best > tol) {
                ++rejected;
                continue;
            }
        }
        rep.zeros.push_back(dz);
    }
    std::ostringstream os;
    os << rep.zeros.size() << " zeros inside radius " << series.reliability_radius;
    if (rejected) os << "; " << rejected << " rejected by the M vs M-2 check";
    if (rep.zeros.empty()) os << "; no certificate that none exist beyond the truncation";
    rep.diagnostic = os.str();
    return rep;
}

}  // namespace rlab::determinants
