#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "rlab/dyadic/bump.hpp"

namespace rlab::dyadic {

using cplx = std::complex<double>;

// In-place unnormalised FFT on a d-dimensional N^d array (row-major).
// sign = -1 forward, +1 backward.
void fft_inplace(int dim, int n, cplx* data, int sign);

// Periodic complex function sampled at x_j = P*j/N on [0,P)^d.
// Fourier coefficients use u(x) = sum_k c_k exp(2 pi i k.x / P), so the
// physical frequency of index k is k/P (cycles per unit length).
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(int dim, int n, double period = 1.0);

    static GridFunction from_samples(int dim, int n, std::vector<cplx> values, double period = 1.0);
    static GridFunction from_function(int dim, int n,
                                      const std::function<cplx(double, double)>& f,
                                      double period = 1.0);
    // e_k(x) = exp(2 pi i k.x / P)
    static GridFunction mode(int dim, int n, int k1, int k2 = 0, double period = 1.0);
    // Inverse of spectrum(): coefficients in FFT storage order.
    static GridFunction from_spectrum(int dim, int n, std::vector<cplx> coeffs, double period = 1.0);

    int dim() const { return dim_; }
    int size() const { return n_; }
    double period() const { return period_; }
    std::size_t count() const { return values_.size(); }
    double spacing() const { return period_ / n_; }

    const std::vector<cplx>& values() const { return values_; }
    std::vector<cplx>& values() { return values_; }
    cplx& at(int i, int j = 0) { return values_[index(i, j)]; }
    const cplx& at(int i, int j = 0) const { return values_[index(i, j)]; }

    // Normalised coefficients c_k in FFT storage order (k = signed_index(j)).
    std::vector<cplx> spectrum() const;
    // Coefficient on the symmetric index set |k_i| <= N/2; the Nyquist bin is
    // split evenly between +N/2 and -N/2 so that the index set is symmetric.
    cplx coefficient(int k1, int k2 = 0) const;

    // Storage index j -> signed frequency index in [-N/2, N/2).
    static int signed_index(int j, int n) { return j < n / 2 ? j : j - n; }
    // Physical frequency of storage slot (j1, j2).
    Freq frequency(int j1, int j2 = 0) const;

    double sup_norm() const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(cplx c);
    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(cplx c, GridFunction a) { return a *= c; }

    bool same_shape(const GridFunction& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && period_ == o.period_;
    }

private:
    std::size_t index(int i, int j) const {
        return dim_ == 1 ? static_cast<std::size_t>(i)
                         : static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j);
    }

    int dim_ = 1;
    int n_ = 0;
    double period_ = 1.0;
    std::vector<cplx> values_;
};

}  // namespace rlab::dyadic
