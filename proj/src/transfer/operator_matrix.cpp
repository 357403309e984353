#include "rlab/transfer/operator_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>

#include "json.hpp"
#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"
#include "rlab/dyadic/grid_io.hpp"

namespace rlab::transfer {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

// exp(2 pi i t) with the argument reduced mod 1 first, which keeps large
// integer multiples accurate.
cplx cis_cycles(double t) { return expi(kTwoPi * (t - std::round(t))); }
}  // namespace

int OperatorMatrix::index(int k1, int k2) const {
    if (dim == 1) return k1 + n_f;
    return (k1 + n_f) * side() + (k2 + n_f);
}

std::pair<int, int> OperatorMatrix::frequency(int idx) const {
    if (dim == 1) return {idx - n_f, 0};
    return {idx / side() - n_f, idx % side() - n_f};
}

OperatorMatrix assemble_expanding(const MapModel& map, const Weight& g, int n_f, int quadrature_points) {
    require(map.kind() == dynamics::MapKind::expanding_circle, "assemble_expanding needs an expanding circle map");
    require(n_f >= 1, "truncation n_f must be >= 1");
    if (quadrature_points == 0) quadrature_points = 8 * n_f;
    require(quadrature_points >= 8 * n_f, "quadrature_points must be at least 8 * n_f");
    OperatorMatrix out;
    out.dim = 1;
    out.n_f = n_f;
    out.quadrature_points = quadrature_points;
    out.map_label = map.describe();
    out.weight_label = g.describe();
    const int side = out.side();
    const int qn = quadrature_points;
    if (g.is_zero()) {
        out.m = Eigen::MatrixXcd::Zero(side, side);
        return out;
    }
    // M = A * B with A_{k,j} = exp(-2 pi i k T(y_j)) and
    // B_{j,k'} = g(y_j) |T'(y_j)| exp(2 pi i k' y_j) / Q.
    Eigen::MatrixXcd a(side, qn), b(qn, side);
    parallel_for(static_cast<std::size_t>(qn), [&](std::size_t jj) {
        const int j = static_cast<int>(jj);
        const double y = static_cast<double>(j) / qn;
        const double ty = map.lift(y);
        const cplx w = g(map, y) * std::abs(map.derivative(y)) / static_cast<double>(qn);
        for (int r = 0; r < side; ++r) {
            const int k = r - n_f;
            a(r, j) = cis_cycles(-static_cast<double>(k) * ty);
            // k' y_j is rational with denominator Q: reduce exactly.
            long long num = (static_cast<long long>(k) * j) % qn;
            b(j, r) = w * expi(kTwoPi * static_cast<double>(num) / qn);
        }
    });
    out.m = a * b;
    // Entries below the summation rounding floor are set to exact zeros. The
    // matrix is strongly non-normal and rounding noise in its tiny off-chain
    // entries otherwise moves clustered eigenvalues by far more than 1e-6.
    double peak = 0.0;
    for (int j = 0; j < qn; ++j) peak = std::max(peak, std::abs(b(j, n_f)) * qn);
    out.entry_floor = 64.0 * std::numeric_limits<double>::epsilon() * peak;
    for (Eigen::Index i = 0; i < out.m.size(); ++i)
        if (std::abs(out.m.data()[i]) < out.entry_floor) out.m.data()[i] = cplx{};
    return out;
}

double anisotropic_weight(int k1, int k2, double p, double q, const dyadic::ConeSystem& cones) {
    double r = std::hypot(k1, k2);
    double base = std::max(2.0, r);
    if (r == 0.0) return std::pow(base, 0.5 * (p + q));
    double th = std::atan2(static_cast<double>(k2), static_cast<double>(k1));
    double e = p * cones.phi(dyadic::Sign::plus, th) + q * cones.phi(dyadic::Sign::minus, th);
    return std::pow(base, e);
}

OperatorMatrix assemble_hyperbolic(const MapModel& map, const Weight& g, int n_f, double p, double q,
                                   const dyadic::ConeSystem& cones, int quadrature_points) {
    require(map.dim() == 2, "assemble_hyperbolic needs a toral map");
    require(n_f >= 1, "truncation n_f must be >= 1");
    cones.validate();
    OperatorMatrix out;
    out.dim = 2;
    out.n_f = n_f;
    out.map_label = map.describe();
    out.weight_label = g.describe();
    out.p = p;
    out.q = q;
    out.cones = cones;
    const int side = out.side();
    const int size = side * side;
    out.m = Eigen::MatrixXcd::Zero(size, size);
    if (g.is_zero()) return out;

    auto terms = g.trig_terms();
    if (map.is_linear() && terms) {
        // (g * phi o A)^_k = sum_j g_j phi_{k'} with k = j + A^tr k'.
        const auto& a = map.matrix();
        for (int c = 0; c < size; ++c) {
            auto [k1, k2] = out.frequency(c);
            long long t1 = a(0, 0) * k1 + a(1, 0) * k2;
            long long t2 = a(0, 1) * k1 + a(1, 1) * k2;
            for (const auto& t : *terms) {
                long long r1 = t1 + t.k1, r2 = t2 + t.k2;
                if (std::llabs(r1) > n_f || std::llabs(r2) > n_f) continue;
                out.m(out.index(static_cast<int>(r1), static_cast<int>(r2)), c) += t.amp;
            }
        }
    } else {
        if (quadrature_points == 0) quadrature_points = std::max(64, 8 * n_f);
        require(quadrature_points >= 8 * n_f, "quadrature_points must be at least 8 * n_f");
        out.quadrature_points = quadrature_points;
        const int qn = quadrature_points;
        const std::size_t nodes = static_cast<std::size_t>(qn) * qn;
        // M_{k,k'} = int g(x) exp(2 pi i (k'.T(x) - k.x)) dx
        Eigen::MatrixXcd left(size, nodes), right(nodes, size);
        parallel_for(nodes, [&](std::size_t node) {
            dynamics::Vec2 x(static_cast<double>(node / qn) / qn, static_cast<double>(node % qn) / qn);
            dynamics::Vec2 tx = map.lift(x);
            cplx gx = g(map, x) / static_cast<double>(nodes);
            for (int r = 0; r < size; ++r) {
                auto [k1, k2] = out.frequency(r);
                left(r, node) = cis_cycles(-(k1 * x[0] + k2 * x[1]));
                right(node, r) = gx * cis_cycles(k1 * tx[0] + k2 * tx[1]);
            }
        });
        out.m = left * right;
    }
    std::vector<double> w(size);
    for (int i = 0; i < size; ++i) {
        auto [k1, k2] = out.frequency(i);
        w[i] = anisotropic_weight(k1, k2, p, q, cones);
    }
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            if (out.m(i, j) != cplx{}) out.m(i, j) *= w[i] / w[j];
    return out;
}

std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m) {
    const auto n = m.rows();
    std::vector<cplx> ev;
    if (n == 0) return ev;
    if (m.cwiseAbs().maxCoeff() == 0.0) return std::vector<cplx>(n, cplx{});
    for (auto i = 0; i < m.size(); ++i)
        if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag()))
            throw NumericalError("eigenvalues: matrix has non-finite entries");
    const bool real = m.imag().cwiseAbs().maxCoeff() == 0.0;
    if (real) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(m.real(), false);
        if (es.info() != Eigen::Success) throw NumericalError("real eigensolver did not converge");
        for (int i = 0; i < n; ++i) ev.push_back(es.eigenvalues()[i]);
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
        if (es.info() != Eigen::Success) throw NumericalError("complex eigensolver did not converge");
        for (int i = 0; i < n; ++i) ev.push_back(es.eigenvalues()[i]);
    }
    std::stable_sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
        double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma > mb;
        return std::arg(a) < std::arg(b);
    });
    return ev;
}

double eigen_residual(const Eigen::MatrixXcd& m, cplx lambda) {
    const auto n = m.rows();
    Eigen::MatrixXcd shifted = m;
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    // Tiny shift keeps the factorisation nonsingular at an exact eigenvalue.
    shifted.diagonal().array() -= lambda + cplx(1e-13 * scale, 0.0);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(1.0 + 0.01 * (i % 7), 0.003 * (i % 5));
    for (int it = 0; it < 8; ++it) {
        v = lu.solve(v);
        double nv = v.norm();
        if (!std::isfinite(nv) || nv == 0.0) return 0.0;
        v /= nv;
    }
    return (m * v - lambda * v).norm();
}

void export_operator(const OperatorMatrix& m, const std::string& stem) {
    nlohmann::json j;
    j["dimension"] = m.dim;
    j["n_f"] = m.n_f;
    j["rows"] = m.rows();
    j["quadrature_points"] = m.quadrature_points;
    j["entry_floor"] = m.entry_floor;
    j["map"] = m.map_label;
    j["weight"] = m.weight_label;
    if (m.p) j["p"] = *m.p;
    if (m.q) j["q"] = *m.q;
    j["entries"] = stem + ".rfgf";
    std::ofstream(stem + ".json") << j.dump(2) << "\n";
    std::vector<cplx> data(static_cast<std::size_t>(m.m.size()));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.rows(); ++c) data[static_cast<std::size_t>(r) * m.rows() + c] = m.m(r, c);
    dyadic::write_rfgf(stem + ".rfgf", 2, static_cast<std::uint32_t>(m.rows()), data);
}

}  // namespace rlab::transfer
