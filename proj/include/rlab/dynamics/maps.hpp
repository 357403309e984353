#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace rlab::dynamics {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat2i = Eigen::Matrix<long long, 2, 2>;
using cplx = std::complex<double>;

enum class MapKind { expanding_circle, linear_toral, perturbed_toral };

const char* kind_name(MapKind k);

// Closed-form dynamical systems on the circle or the two-torus.
//   expanding circle: T(x) = k x + eps sin(2 pi x) mod 1
//   linear toral:     T(x) = A x mod 1
//   perturbed toral:  T(x) = A x + (delta / 2 pi) (sin 2 pi x1, sin 2 pi x2) mod 1
class MapModel {
public:
    static MapModel expanding_circle(int degree, double eps);
    static MapModel linear_toral(const Mat2i& a);
    static MapModel perturbed_toral(const Mat2i& a, double delta);
    static Mat2i cat_matrix();

    MapKind kind() const { return kind_; }
    int dim() const { return kind_ == MapKind::expanding_circle ? 1 : 2; }
    bool is_linear() const { return kind_ == MapKind::linear_toral; }
    int degree() const { return degree_; }
    double eps() const { return eps_; }
    const Mat2i& matrix() const { return a_; }
    double delta() const { return delta_; }
    double smoothness() const { return smoothness_; }
    void set_smoothness(double r) { smoothness_ = r; }

    // Circle maps. lift() is the increasing lift F with F(0) = 0, F(1) = k.
    double lift(double x) const;
    double evaluate(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    // Torus maps.
    Vec2 lift(const Vec2& x) const;
    Vec2 evaluate(const Vec2& x) const;
    Mat2 derivative(const Vec2& x) const;
    // Unique preimage on the torus (fixed-point iteration plus Newton polish).
    Vec2 inverse(const Vec2& x) const;

    double iterate(double x, int m) const;
    Vec2 iterate(const Vec2& x, int m) const;

    // Contraction of inverse branches (expanding) or the stable rate (toral).
    double lambda_s() const;
    // Expansion rate of unstable vectors; for circle maps inf |T'|.
    double nu_u() const;
    // Eigenvalue of A of modulus > 1 (toral kinds).
    double linear_expansion() const;

    std::string describe() const;

private:
    MapKind kind_ = MapKind::expanding_circle;
    int degree_ = 2;
    double eps_ = 0.0;
    Mat2i a_ = Mat2i::Identity();
    double delta_ = 0.0;
    double smoothness_ = std::numeric_limits<double>::infinity();
};

double wrap01(double x);
Vec2 wrap01(const Vec2& x);
// Signed distance to the nearest integer translate, in (-1/2, 1/2].
double circle_residual(double a, double b);
Vec2 torus_residual(const Vec2& a, const Vec2& b);

// Preimage of x under T^m together with its branch itinerary: s[i] = j when
// F(T^i y) lies in [j, j+1).
struct Preimage {
    double point = 0.0;
    std::vector<int> itinerary;
};

// k^m preimages ordered lexicographically by itinerary.
std::vector<Preimage> inverse_branches(const MapModel& map, double x, int m);
// The contracting inverse branch g_j(x) = F^{-1}(x + j).
double inverse_branch(const MapModel& map, int j, double x);

// Weight functions g. Trigonometric terms are amp * exp(2 pi i k.x).
struct TrigTerm {
    cplx amp;
    int k1 = 0;
    int k2 = 0;
};

enum class WeightKind { constant, trig, inverse_derivative, inverse_unstable_jacobian, custom };

class Weight {
public:
    static Weight constant(cplx c);
    static Weight trig(std::vector<TrigTerm> terms);
    // 1/|T'| for circle maps.
    static Weight inverse_derivative();
    // 1/|det DT restricted to E^u| for toral maps.
    static Weight inverse_unstable_jacobian();
    static Weight custom(std::function<cplx(const Vec2&)> f, std::string label = "custom");

    WeightKind kind() const { return kind_; }
    bool is_zero() const;
    bool is_constant() const { return kind_ == WeightKind::constant; }
    cplx constant_value() const { return c_; }
    // Constants are returned as a single zero-frequency term.
    std::optional<std::vector<TrigTerm>> trig_terms() const;
    double smoothness() const { return smoothness_; }
    void set_smoothness(double r) { smoothness_ = r; }

    cplx operator()(const MapModel& map, double x) const;
    cplx operator()(const MapModel& map, const Vec2& x) const;
    // Map-free evaluation for local operators; constant, trig and custom only.
    cplx local(const Vec2& x, int dim) const;

    std::string describe() const;

private:
    WeightKind kind_ = WeightKind::constant;
    cplx c_{};
    std::vector<TrigTerm> terms_;
    std::function<cplx(const Vec2&)> f_;
    std::string label_;
    double smoothness_ = std::numeric_limits<double>::infinity();
};

// g^{(m)}(x) = prod_{k<m} g(T^k x)
cplx birkhoff_weight(const MapModel& map, const Weight& g, double x, int m);
cplx birkhoff_weight(const MapModel& map, const Weight& g, const Vec2& x, int m);

// Product DT_{T^{m-1}x} ... DT_x.
Mat2 jacobian_power(const MapModel& map, const Vec2& x, int m);
double derivative_power(const MapModel& map, double x, int m);

}  // namespace rlab::dynamics
