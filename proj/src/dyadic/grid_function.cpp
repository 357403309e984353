#include "rlab/dyadic/grid_function.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "rlab/common/errors.hpp"

namespace rlab::dyadic {

namespace {

// Planning is not thread safe in FFTW; execution of an existing plan on new
// arrays is. FFTW_ESTIMATE keeps the chosen algorithm, and so the rounding,
// independent of timing.
fftw_plan plan_for(int dim, int n, int sign) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_tuple(dim, n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::size_t total = dim == 1 ? n : static_cast<std::size_t>(n) * n;
    fftw_complex* buf = fftw_alloc_complex(total);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = dim == 1 ? fftw_plan_dft_1d(n, buf, buf, sign, flags)
                           : fftw_plan_dft_2d(n, n, buf, buf, sign, flags);
    fftw_free(buf);
    if (!p) throw NumericalError("FFTW planning failed");
    cache.emplace(key, p);
    return p;
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void fft_inplace(int dim, int n, cplx* data, int sign) {
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan_for(dim, n, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD), d, d);
}

GridFunction::GridFunction(int dim, int n, double period) : dim_(dim), n_(n), period_(period) {
    require(dim == 1 || dim == 2, "grid dimension must be 1 or 2");
    require(is_pow2(n) && n >= 4, "grid size must be a power of two >= 4");
    require(period > 0, "period must be positive");
    values_.assign(dim == 1 ? n : static_cast<std::size_t>(n) * n, cplx{});
}

GridFunction GridFunction::from_samples(int dim, int n, std::vector<cplx> values, double period) {
    GridFunction g(dim, n, period);
    require(values.size() == g.values_.size(), "sample count does not match grid");
    g.values_ = std::move(values);
    return g;
}

GridFunction GridFunction::from_function(int dim, int n,
                                         const std::function<cplx(double, double)>& f,
                                         double period) {
    GridFunction g(dim, n, period);
    double h = g.spacing();
    if (dim == 1) {
        for (int i = 0; i < n; ++i) g.at(i) = f(i * h, 0.0);
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g.at(i, j) = f(i * h, j * h);
    }
    return g;
}

GridFunction GridFunction::mode(int dim, int n, int k1, int k2, double period) {
    // Integer phase reduction keeps e_k exact at grid points.
    GridFunction g(dim, n, period);
    const double w = 2.0 * std::numbers::pi / n;
    auto phase = [&](long long m) {
        long long r = ((m % n) + n) % n;
        return cplx(std::cos(w * r), std::sin(w * r));
    };
    if (dim == 1) {
        for (int i = 0; i < n; ++i) g.at(i) = phase(static_cast<long long>(k1) * i);
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g.at(i, j) = phase(static_cast<long long>(k1) * i + static_cast<long long>(k2) * j);
    }
    return g;
}

GridFunction GridFunction::from_spectrum(int dim, int n, std::vector<cplx> coeffs, double period) {
    GridFunction g(dim, n, period);
    require(coeffs.size() == g.values_.size(), "coefficient count does not match grid");
    fft_inplace(dim, n, coeffs.data(), +1);
    g.values_ = std::move(coeffs);
    return g;
}

std::vector<cplx> GridFunction::spectrum() const {
    std::vector<cplx> c = values_;
    fft_inplace(dim_, n_, c.data(), -1);
    double scale = 1.0 / static_cast<double>(c.size());
    for (auto& v : c) v *= scale;
    return c;
}

cplx GridFunction::coefficient(int k1, int k2) const {
    int h = n_ / 2;
    require(std::abs(k1) <= h && (dim_ == 1 || std::abs(k2) <= h),
            "frequency index outside the symmetric box");
    auto spec = spectrum();
    auto slot = [&](int k) { return ((k % n_) + n_) % n_; };
    double w = 1.0;
    if (std::abs(k1) == h) w *= 0.5;
    if (dim_ == 2 && std::abs(k2) == h) w *= 0.5;
    std::size_t idx = dim_ == 1 ? slot(k1) : static_cast<std::size_t>(slot(k1)) * n_ + slot(k2);
    return w * spec[idx];
}

Freq GridFunction::frequency(int j1, int j2) const {
    Freq f{signed_index(j1, n_) / period_, 0.0};
    if (dim_ == 2) f[1] = signed_index(j2, n_) / period_;
    return f;
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    require(same_shape(o), "grid shapes differ");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    require(same_shape(o), "grid shapes differ");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(cplx c) {
    for (auto& v : values_) v *= c;
    return *this;
}

}  // namespace rlab::dyadic
