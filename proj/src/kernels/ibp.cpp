#include "rlab/kernels/ibp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"
#include "rlab/dyadic/bump.hpp"

namespace rlab::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

// Unnormalised mollifier exp(-1/(1 - s^2)) and its derivative.
double upsilon(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }
double upsilon_prime(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double t = 1.0 - s * s;
    return upsilon(s) * (-2.0 * s / (t * t));
}

// Spectral derivative of samples of a periodic function on [a, a + length).
std::vector<cplx> spectral_derivative(const std::vector<cplx>& v, double length) {
    const int n = static_cast<int>(v.size());
    std::vector<cplx> buf(v);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(fwd);
    for (int k = 0; k < n; ++k) {
        const int kk = k <= n / 2 ? k : k - n;
        if (2 * kk == n || 2 * kk == -n) {
            buf[k] = 0.0;
            continue;
        }
        buf[k] *= cplx(0.0, 2.0 * kPi * kk / length) / static_cast<double>(n);
    }
    fftw_execute(bwd);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    return buf;
}

double sup_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (auto z : v) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace

RegularizedIbpResult regularized_ibp(const Oscillatory1D& pb, const RegularizedIbpConfig& cfg) {
    require(pb.f && pb.df && pb.g, "regularized_ibp needs f, f' and g");
    require(pb.b > pb.a, "support interval must be nonempty");
    require(cfg.lambda >= 1.0, "Lambda must be >= 1");
    require(cfg.eps > 0.0, "eps must be positive");
    require(cfg.delta > 0.0 && cfg.delta < 1.0, "delta must lie in (0, 1)");
    require(cfg.nodes_per_width >= 16, "nodes_per_width must be >= 16");

    const double step = std::min(cfg.eps, 1.0 / cfg.lambda) / cfg.nodes_per_width;
    const long j0 = static_cast<long>(std::floor((pb.a - 2.0 * cfg.eps) / step));
    const long j1 = static_cast<long>(std::ceil((pb.b + 2.0 * cfg.eps) / step));
    const std::size_t n = static_cast<std::size_t>(j1 - j0 + 1);

    std::vector<double> w(n), fv(n), dfv(n);
    std::vector<cplx> g(n), h(n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = (j0 + static_cast<long>(i)) * step;
        fv[i] = pb.f(w[i]);
        dfv[i] = pb.df(w[i]);
        g[i] = (w[i] >= pb.a && w[i] <= pb.b) ? pb.g(w[i]) : cplx(0.0);
    }
    double df_scale = 0.0;
    for (double d : dfv) df_scale = std::max(df_scale, std::abs(d));
    for (std::size_t i = 0; i < n; ++i) {
        if (g[i] == cplx(0.0)) continue;
        if (std::abs(dfv[i]) <= 1e-12 * std::max(1.0, df_scale)) {
            std::ostringstream os;
            os << "phase gradient vanishes on supp g at w = " << w[i];
            throw ValidationError(os.str());
        }
        h[i] = cplx(0.0, 1.0) * g[i] / dfv[i];
    }

    // Discrete mollifier with unit mass on the grid.
    const long half = static_cast<long>(std::ceil(cfg.eps / step));
    std::vector<double> up(2 * half + 1), upd(2 * half + 1);
    double mass = 0.0;
    for (long k = -half; k <= half; ++k) {
        up[k + half] = upsilon(k * step / cfg.eps);
        mass += up[k + half] * step;
    }
    for (long k = -half; k <= half; ++k) {
        up[k + half] /= mass;
        upd[k + half] = upsilon_prime(k * step / cfg.eps) / (mass * cfg.eps);
    }

    std::size_t lo = n, hi = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (h[i] != cplx(0.0)) {
            lo = std::min(lo, i);
            hi = i;
        }
    std::vector<cplx> he(n, cplx(0.0)), hed(n, cplx(0.0));
    if (lo <= hi) {
        parallel_for(n, [&](std::size_t i) {
            const long a = std::max<long>(static_cast<long>(lo), static_cast<long>(i) - half);
            const long b = std::min<long>(static_cast<long>(hi), static_cast<long>(i) + half);
            cplx s = 0.0, sd = 0.0;
            for (long j = a; j <= b; ++j) {
                const long k = static_cast<long>(i) - j + half;
                s += h[j] * up[k];
                sd += h[j] * upd[k];
            }
            he[i] = s * step;
            hed[i] = sd * step;
        });
    }

    RegularizedIbpResult r;
    r.step = step;
    r.nodes = n;
    const cplx I(0.0, 1.0);
    cplx lhs = 0.0, smooth = 0.0, rough = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx e = std::polar(1.0, cfg.lambda * fv[i]);
        lhs += e * g[i];
        smooth += e * hed[i];
        rough += I * dfv[i] * e * (h[i] - he[i]);
        r.h_sup = std::max(r.h_sup, std::abs(h[i]));
        r.mollify_error = std::max(r.mollify_error, std::abs(h[i] - he[i]));
        r.mollified_derivative = std::max(r.mollified_derivative, std::abs(hed[i]));
    }
    r.lhs = lhs * step;
    r.smooth_term = smooth * step / cfg.lambda;
    r.rough_term = -rough * step;
    r.rhs = r.smooth_term + r.rough_term;
    r.residual = std::abs(r.lhs - r.rhs);

    // Hoelder seminorm on a subsample containing w = 0 when it is a node.
    std::vector<std::size_t> sub;
    const long span = static_cast<long>(hi) - static_cast<long>(lo) + 1;
    const long stride = std::max<long>(1, span / std::max(1, cfg.holder_samples));
    if (lo <= hi)
        for (std::size_t i = lo; i <= hi; ++i)
            if ((j0 + static_cast<long>(i)) % stride == 0) sub.push_back(i);
    double semi = 0.0;
    for (std::size_t p = 0; p < sub.size(); ++p)
        for (std::size_t q = p + 1; q < sub.size(); ++q)
            semi = std::max(semi, std::abs(h[sub[p]] - h[sub[q]]) / std::pow(w[sub[q]] - w[sub[p]], cfg.delta));
    r.h_holder = r.h_sup + semi;
    if (r.h_holder > 0.0) {
        r.c_error = r.mollify_error / (r.h_holder * std::pow(cfg.eps, cfg.delta));
        r.c_derivative = r.mollified_derivative / (r.h_holder * std::pow(cfg.eps, cfg.delta - 1.0));
    }
    return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "loglog_slope needs two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0.0 && y[i] > 0.0, "loglog_slope needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

PlainIbpResult plain_ibp_factor(const Oscillatory1D& pb, int repetitions, int nodes, int scale_index) {
    require(pb.f && pb.df && pb.g, "plain_ibp_factor needs f, f' and g");
    require(pb.b > pb.a, "support interval must be nonempty");
    require(repetitions >= 0, "repetitions must be nonnegative");
    require(nodes >= 64, "plain_ibp_factor needs at least 64 nodes");
    const double length = pb.b - pb.a, step = length / nodes;

    PlainIbpResult r;
    r.w.resize(nodes);
    std::vector<double> df(nodes), f(nodes);
    std::vector<cplx> g(nodes);
    for (int i = 0; i < nodes; ++i) {
        r.w[i] = pb.a + i * step;
        f[i] = pb.f(r.w[i]);
        df[i] = pb.df(r.w[i]);
        g[i] = pb.g(r.w[i]);
        if (g[i] != cplx(0.0) && df[i] == 0.0) {
            std::ostringstream os;
            os << "phase gradient vanishes on supp g at w = " << r.w[i];
            throw ValidationError(os.str());
        }
    }
    auto integral = [&](const std::vector<cplx>& a) {
        cplx s = 0.0;
        for (int i = 0; i < nodes; ++i) s += std::polar(1.0, f[i]) * a[i];
        return s * step;
    };
    r.lhs = integral(g);
    r.sup_norms.push_back(sup_abs(g));
    for (int k = 0; k < repetitions; ++k) {
        std::vector<cplx> q(nodes);
        for (int i = 0; i < nodes; ++i) q[i] = g[i] == cplx(0.0) ? cplx(0.0) : g[i] / df[i];
        g = spectral_derivative(q, length);
        for (auto& z : g) z *= cplx(0.0, 1.0);
        r.sup_norms.push_back(sup_abs(g));
    }
    for (int k = 1; k <= repetitions; ++k)
        r.gains.push_back(r.sup_norms[0] > 0.0 ? r.sup_norms[k] / r.sup_norms[0] : 0.0);
    r.rhs = integral(g);
    r.amplitude = std::move(g);
    if (scale_index >= 0 && repetitions > 0)
        r.relative_to_dyadic = r.gains.back() / std::exp2(-double(repetitions) * scale_index);
    return r;
}

Oscillatory1D kernel_phase(const LocalBranch& t, const std::function<cplx(double)>& gamma, double xi, double eta,
                           double x, double y) {
    require(t.dim == 1, "kernel_phase is one-dimensional");
    const double ty = t.eval(Vec2(y, 0.0))[0];
    Oscillatory1D o;
    o.f = [t, xi, eta, x, ty](double w) { return (x - w) * xi + (t.eval(Vec2(w, 0.0))[0] - ty) * eta; };
    o.df = [t, xi, eta](double w) { return -xi + t.jacobian(Vec2(w, 0.0))(0, 0) * eta; };
    o.g = gamma;
    o.a = -0.5;
    o.b = 0.5;
    return o;
}

PhaseSplit::PhaseSplit(LocalBranch t, const Vec2& y)
    : t_(std::move(t)), y_(y), ty_(t_.eval(y)), dty_(t_.jacobian(y)) {}

Vec2 PhaseSplit::operator()(const Vec2& w) const { return t_.eval(w) - ty_ - dty_ * (w - y_); }

Vec2 PhaseSplit::reassemble(const Vec2& w) const { return (*this)(w) + ty_ + dty_ * (w - y_); }

PhaseSplit appendix_phase_split(const LocalBranch& t, const Vec2& y) {
    require(static_cast<bool>(t.eval) && static_cast<bool>(t.jacobian), "branch needs eval and jacobian");
    return PhaseSplit(t, y);
}

ScalingCheck scaling_identity_check(const LocalBranch& t, const std::function<cplx(double)>& gamma, int n,
                                    int ell, double u, double v, double w, int nodes) {
    require(t.dim == 1, "scaling_identity_check is one-dimensional");
    require(n >= 0 && ell >= 0, "dyadic indices must be nonnegative");
    require(nodes >= 64, "scaling_identity_check needs at least 64 nodes");

    // One integration by parts: F = i (gamma / phi')' with phi' = -xi + T'(w) eta.
    const double hd = 1e-5;
    const cplx g0 = gamma(w);
    const cplx g1 = (gamma(w + hd) - gamma(w - hd)) / (2.0 * hd);
    const double t1 = t.jacobian(Vec2(w, 0.0))(0, 0);
    const double t2 = (t.jacobian(Vec2(w + hd, 0.0))(0, 0) - t.jacobian(Vec2(w - hd, 0.0))(0, 0)) / (2.0 * hd);
    auto big_g = [&](double xi, double eta) -> cplx {
        const double m = dyadic::psi_n(n, std::abs(xi)) * dyadic::psi_tilde(ell, std::abs(eta));
        if (m == 0.0) return 0.0;
        const double p1 = -xi + t1 * eta;
        if (p1 == 0.0) throw ValidationError("phase derivative vanishes on the multiplier support");
        return cplx(0.0, 1.0) * (g1 / p1 - g0 * t2 * eta / (p1 * p1)) * m;
    };
    // (2 pi)^{-2} int int e^{i u xi + i v eta} G(s_xi xi, s_eta eta) on [-R_xi, R_xi] x [-R_eta, R_eta].
    auto transform = [&](double uu, double vv, double s_xi, double s_eta, double r_xi, double r_eta, int m) {
        const double hx = 2.0 * r_xi / m, he = 2.0 * r_eta / m;
        std::vector<cplx> rows(m + 1);
        parallel_for(m + 1, [&](std::size_t a) {
            const double xi = -r_xi + a * hx;
            cplx acc = 0.0;
            for (int b = 0; b <= m; ++b) {
                const double eta = -r_eta + b * he;
                acc += std::polar(1.0, vv * eta) * big_g(s_xi * xi, s_eta * eta);
            }
            rows[a] = std::polar(1.0, uu * xi) * acc;
        });
        cplx s = 0.0;
        for (auto z : rows) s += z;
        return s * hx * he / (4.0 * kPi * kPi);
    };
    ScalingCheck c;
    c.direct = transform(u, v, 1.0, 1.0, std::ldexp(1.0, n + 1), std::ldexp(1.0, ell + 2), nodes);
    const double sn = std::ldexp(1.0, n), sl = std::ldexp(1.0, ell);
    c.scaled = sn * sl * transform(sn * u, sl * v, sn, sl, 2.0, 4.0, nodes + 41);
    c.rel_diff = std::abs(c.direct - c.scaled) / std::max(std::abs(c.direct), 1e-300);
    return c;
}

}  // namespace rlab::kernels
