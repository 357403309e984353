#include "rlab/dynamics/maps.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rlab/common/errors.hpp"
#include "rlab/dynamics/hyperbolicity.hpp"

namespace rlab::dynamics {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

const char* kind_name(MapKind k) {
    switch (k) {
        case MapKind::expanding_circle: return "expanding-circle";
        case MapKind::linear_toral: return "linear-toral";
        case MapKind::perturbed_toral: return "perturbed-toral";
    }
    return "?";
}

double wrap01(double x) {
    double y = x - std::floor(x);
    return y >= 1.0 ? 0.0 : y;
}

Vec2 wrap01(const Vec2& x) { return {wrap01(x[0]), wrap01(x[1])}; }

double circle_residual(double a, double b) {
    double d = a - b;
    return d - std::round(d);
}

Vec2 torus_residual(const Vec2& a, const Vec2& b) {
    return {circle_residual(a[0], b[0]), circle_residual(a[1], b[1])};
}

MapModel MapModel::expanding_circle(int degree, double eps) {
    require(degree >= 2, "expanding circle map needs integer degree k >= 2");
    require(degree - kTwoPi * std::abs(eps) > 1.0,
            "expansion condition violated: k - 2*pi*|eps| must exceed 1");
    MapModel m;
    m.kind_ = MapKind::expanding_circle;
    m.degree_ = degree;
    m.eps_ = eps;
    return m;
}

MapModel MapModel::linear_toral(const Mat2i& a) {
    long long det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    long long tr = a(0, 0) + a(1, 1);
    require(std::llabs(det) == 1, "toral automorphism needs |det A| = 1");
    require(std::llabs(tr) > 2, "toral automorphism needs |trace A| > 2 (hyperbolicity)");
    MapModel m;
    m.kind_ = MapKind::linear_toral;
    m.a_ = a;
    return m;
}

MapModel MapModel::perturbed_toral(const Mat2i& a, double delta) {
    MapModel m = linear_toral(a);
    // DT = A + delta diag(cos, cos) stays invertible when delta is below the
    // smallest singular value of A.
    Mat2 af = a.cast<double>();
    Eigen::JacobiSVD<Mat2> svd(af);
    require(std::abs(delta) < svd.singularValues()[1],
            "perturbation amplitude too large: DT may become singular");
    m.kind_ = MapKind::perturbed_toral;
    m.delta_ = delta;
    return m;
}

Mat2i MapModel::cat_matrix() {
    Mat2i a;
    a << 2, 1, 1, 1;
    return a;
}

double MapModel::lift(double x) const { return degree_ * x + eps_ * std::sin(kTwoPi * x); }

double MapModel::evaluate(double x) const { return wrap01(lift(x)); }

double MapModel::derivative(double x) const { return degree_ + kTwoPi * eps_ * std::cos(kTwoPi * x); }

double MapModel::second_derivative(double x) const {
    return -kTwoPi * kTwoPi * eps_ * std::sin(kTwoPi * x);
}

Vec2 MapModel::lift(const Vec2& x) const {
    Vec2 y = a_.cast<double>() * x;
    if (kind_ == MapKind::perturbed_toral)
        y += (delta_ / kTwoPi) * Vec2(std::sin(kTwoPi * x[0]), std::sin(kTwoPi * x[1]));
    return y;
}

Vec2 MapModel::evaluate(const Vec2& x) const {
    if (kind_ == MapKind::linear_toral) {
        // Reduce with the integer matrix so that rational points stay exact longer.
        Vec2 y;
        for (int i = 0; i < 2; ++i) {
            double s = 0.0;
            for (int j = 0; j < 2; ++j) s += static_cast<double>(a_(i, j)) * x[j];
            y[i] = s;
        }
        return wrap01(y);
    }
    return wrap01(lift(x));
}

Mat2 MapModel::derivative(const Vec2& x) const {
    Mat2 d = a_.cast<double>();
    if (kind_ == MapKind::perturbed_toral) {
        d(0, 0) += delta_ * std::cos(kTwoPi * x[0]);
        d(1, 1) += delta_ * std::cos(kTwoPi * x[1]);
    }
    return d;
}

Vec2 MapModel::inverse(const Vec2& x) const {
    require(dim() == 2, "inverse() is defined for toral maps");
    const Mat2 ainv = a_.cast<double>().inverse();
    Vec2 y = wrap01(ainv * x);
    if (kind_ == MapKind::linear_toral) return y;
    // y = A^{-1}(x + n - s(y)); the integer shift n is chosen so y stays near
    // the linear preimage.
    for (int it = 0; it < 200; ++it) {
        Vec2 r = torus_residual(lift(y), x);
        if (r.norm() < 1e-15) return wrap01(y);
        y = wrap01(y - derivative(y).inverse() * r);
    }
    Vec2 r = torus_residual(lift(y), x);
    if (r.norm() < 1e-12) return wrap01(y);
    throw NumericalError("torus inverse did not converge");
}

double MapModel::iterate(double x, int m) const {
    for (int i = 0; i < m; ++i) x = evaluate(x);
    return x;
}

Vec2 MapModel::iterate(const Vec2& x, int m) const {
    Vec2 y = x;
    for (int i = 0; i < m; ++i) y = evaluate(y);
    return y;
}

double MapModel::linear_expansion() const {
    require(dim() == 2, "linear expansion is defined for toral maps");
    double tr = static_cast<double>(a_(0, 0) + a_(1, 1));
    double det = static_cast<double>(a_(0, 0) * a_(1, 1) - a_(0, 1) * a_(1, 0));
    double disc = std::sqrt(tr * tr - 4 * det);
    return std::max(std::abs(0.5 * (tr + disc)), std::abs(0.5 * (tr - disc)));
}

double MapModel::lambda_s() const {
    if (kind_ == MapKind::expanding_circle) return 1.0 / nu_u();
    double lam = linear_expansion();
    if (kind_ == MapKind::linear_toral) return 1.0 / lam;
    return estimate_rates(*this).lambda_s;
}

double MapModel::nu_u() const {
    if (kind_ == MapKind::expanding_circle) return degree_ - kTwoPi * std::abs(eps_);
    if (kind_ == MapKind::linear_toral) return linear_expansion();
    return estimate_rates(*this).nu_u;
}

std::string MapModel::describe() const {
    std::ostringstream os;
    os << kind_name(kind_);
    if (kind_ == MapKind::expanding_circle) {
        os << " k=" << degree_ << " eps=" << eps_;
    } else {
        os << " A=[[" << a_(0, 0) << "," << a_(0, 1) << "],[" << a_(1, 0) << "," << a_(1, 1) << "]]";
        if (kind_ == MapKind::perturbed_toral) os << " delta=" << delta_;
    }
    return os.str();
}

double inverse_branch(const MapModel& map, int j, double x) {
    require(map.kind() == MapKind::expanding_circle, "inverse branches need an expanding circle map");
    const double target = x + j;
    const int k = map.degree();
    // F is increasing with F' >= k - 2 pi |eps| > 1, so Newton from the linear
    // guess converges; a bracket guards the first steps.
    double lo = 0.0, hi = 1.0;
    double y = target / k;
    for (int it = 0; it < 200; ++it) {
        double f = map.lift(y) - target;
        if (std::abs(f) < 1e-15) return y;
        if (f > 0) hi = std::min(hi, y);
        else lo = std::max(lo, y);
        double step = f / map.derivative(y);
        double next = y - step;
        if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
        if (std::abs(next - y) < 1e-16) return next;
        y = next;
    }
    if (std::abs(map.lift(y) - target) < 1e-13) return y;
    throw NumericalError("inverse branch did not converge within 200 iterations");
}

std::vector<Preimage> inverse_branches(const MapModel& map, double x, int m) {
    require(map.kind() == MapKind::expanding_circle, "inverse branches need an expanding circle map");
    require(m >= 1, "preimage depth m must be >= 1");
    const int k = map.degree();
    std::size_t total = 1;
    for (int i = 0; i < m; ++i) total *= static_cast<std::size_t>(k);
    std::vector<Preimage> out(total);
    x = wrap01(x);
    for (std::size_t code = 0; code < total; ++code) {
        // Lexicographic order: s_0 is the most significant digit.
        std::vector<int> s(m);
        std::size_t c = code;
        for (int i = m - 1; i >= 0; --i) {
            s[i] = static_cast<int>(c % k);
            c /= k;
        }
        double y = x;
        for (int i = m - 1; i >= 0; --i) y = inverse_branch(map, s[i], y);
        out[code] = {y, std::move(s)};
    }
    return out;
}

Weight Weight::constant(cplx c) {
    Weight w;
    w.kind_ = WeightKind::constant;
    w.c_ = c;
    return w;
}

Weight Weight::trig(std::vector<TrigTerm> terms) {
    Weight w;
    w.kind_ = WeightKind::trig;
    w.terms_ = std::move(terms);
    return w;
}

Weight Weight::inverse_derivative() {
    Weight w;
    w.kind_ = WeightKind::inverse_derivative;
    return w;
}

Weight Weight::inverse_unstable_jacobian() {
    Weight w;
    w.kind_ = WeightKind::inverse_unstable_jacobian;
    return w;
}

Weight Weight::custom(std::function<cplx(const Vec2&)> f, std::string label) {
    Weight w;
    w.kind_ = WeightKind::custom;
    w.f_ = std::move(f);
    w.label_ = std::move(label);
    return w;
}

bool Weight::is_zero() const {
    if (kind_ == WeightKind::constant) return c_ == cplx{};
    if (kind_ == WeightKind::trig) {
        for (const auto& t : terms_)
            if (t.amp != cplx{}) return false;
        return true;
    }
    return false;
}

std::optional<std::vector<TrigTerm>> Weight::trig_terms() const {
    if (kind_ == WeightKind::constant) return std::vector<TrigTerm>{{c_, 0, 0}};
    if (kind_ == WeightKind::trig) return terms_;
    return std::nullopt;
}

cplx Weight::local(const Vec2& x, int dim) const {
    switch (kind_) {
        case WeightKind::constant: return c_;
        case WeightKind::trig: {
            cplx s{};
            for (const auto& t : terms_) {
                double ph = kTwoPi * (t.k1 * x[0] + (dim == 2 ? t.k2 * x[1] : 0.0));
                s += t.amp * cplx(std::cos(ph), std::sin(ph));
            }
            return s;
        }
        case WeightKind::custom: return f_(x);
        default: throw ValidationError("weight " + describe() + " needs a map to be evaluated");
    }
}

cplx Weight::operator()(const MapModel& map, double x) const { return (*this)(map, Vec2(x, 0.0)); }

cplx Weight::operator()(const MapModel& map, const Vec2& x) const {
    switch (kind_) {
        case WeightKind::constant: return c_;
        case WeightKind::trig: {
            cplx s{};
            for (const auto& t : terms_) {
                double ph = kTwoPi * (t.k1 * x[0] + (map.dim() == 2 ? t.k2 * x[1] : 0.0));
                s += t.amp * cplx(std::cos(ph), std::sin(ph));
            }
            return s;
        }
        case WeightKind::inverse_derivative:
            require(map.dim() == 1, "1/|T'| weight needs a circle map");
            return 1.0 / std::abs(map.derivative(x[0]));
        case WeightKind::inverse_unstable_jacobian: {
            require(map.dim() == 2, "unstable Jacobian weight needs a toral map");
            if (map.is_linear()) return 1.0 / map.linear_expansion();
            return 1.0 / hyperbolicity_exponents(map, x, 1).nu;
        }
        case WeightKind::custom: return f_(x);
    }
    return {};
}

std::string Weight::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case WeightKind::constant: os << "constant " << c_.real() << "+" << c_.imag() << "i"; break;
        case WeightKind::trig: os << "trig(" << terms_.size() << " terms)"; break;
        case WeightKind::inverse_derivative: os << "1/|T'|"; break;
        case WeightKind::inverse_unstable_jacobian: os << "1/|det DT|E^u|"; break;
        case WeightKind::custom: os << label_; break;
    }
    return os.str();
}

cplx birkhoff_weight(const MapModel& map, const Weight& g, double x, int m) {
    require(m >= 0, "m must be nonnegative");
    cplx p = 1.0;
    for (int i = 0; i < m; ++i) {
        p *= g(map, x);
        x = map.evaluate(x);
    }
    return p;
}

cplx birkhoff_weight(const MapModel& map, const Weight& g, const Vec2& x0, int m) {
    require(m >= 0, "m must be nonnegative");
    if (map.dim() == 1) return birkhoff_weight(map, g, x0[0], m);
    cplx p = 1.0;
    Vec2 x = x0;
    for (int i = 0; i < m; ++i) {
        p *= g(map, x);
        x = map.evaluate(x);
    }
    return p;
}

Mat2 jacobian_power(const MapModel& map, const Vec2& x0, int m) {
    Mat2 d = Mat2::Identity();
    Vec2 x = x0;
    for (int i = 0; i < m; ++i) {
        d = map.derivative(x) * d;
        x = map.evaluate(x);
    }
    return d;
}

double derivative_power(const MapModel& map, double x, int m) {
    double d = 1.0;
    for (int i = 0; i < m; ++i) {
        d *= map.derivative(x);
        x = map.evaluate(x);
    }
    return d;
}

}  // namespace rlab::dynamics
