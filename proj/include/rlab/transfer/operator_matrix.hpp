#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "rlab/dyadic/cones.hpp"
#include "rlab/dynamics/maps.hpp"

namespace rlab::transfer {

using cplx = std::complex<double>;
using dynamics::MapModel;
using dynamics::Weight;

// Dense matrix of a transfer operator on the Fourier modes |k| <= n_f (1D) or
// the box max(|k1|,|k2|) <= n_f (2D).
struct OperatorMatrix {
    Eigen::MatrixXcd m;
    int dim = 1;
    int n_f = 0;
    int quadrature_points = 0;  // 0 when the assembly is exact (lattice reindexing)
    double entry_floor = 0.0;   // entries below this were rounding noise and are zero
    std::string map_label;
    std::string weight_label;
    std::optional<double> p;
    std::optional<double> q;
    std::optional<dyadic::ConeSystem> cones;

    int side() const { return 2 * n_f + 1; }
    int index(int k1, int k2 = 0) const;
    std::pair<int, int> frequency(int idx) const;
    int rows() const { return static_cast<int>(m.rows()); }
};

// M_{k,k'} = int_0^1 g(y) |T'(y)| exp(2 pi i (k' y - k T(y))) dy, by the
// trapezoid rule on quadrature_points nodes (>= 8 n_f). Entries below
// 64 eps max|g T'| are stored as zeros.
OperatorMatrix assemble_expanding(const MapModel& map, const Weight& g, int n_f, int quadrature_points = 0);

// Matrix of L phi = g * (phi o T) on the 2D box, conjugated by the diagonal
// weight w(k) = max(2,|k|)^{p phi_+(k/|k|) + q phi_-(k/|k|)}. Linear maps with
// trigonometric g use exact lattice reindexing; other cases use a tensor
// trapezoid rule with quadrature_points per axis.
OperatorMatrix assemble_hyperbolic(const MapModel& map, const Weight& g, int n_f, double p, double q,
                                   const dyadic::ConeSystem& cones, int quadrature_points = 0);

double anisotropic_weight(int k1, int k2, double p, double q, const dyadic::ConeSystem& cones);

// Full spectrum, sorted by modulus (descending; ties by argument).
std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m);
inline std::vector<cplx> eigenvalues(const OperatorMatrix& m) { return eigenvalues(m.m); }

// Residual |M v - lambda v| / |v| of an approximate eigenvector obtained by
// inverse iteration at the shifted point.
double eigen_residual(const Eigen::MatrixXcd& m, cplx lambda);

// JSON metadata next to an RFGF payload holding the entries (dimension 2, N = rows).
void export_operator(const OperatorMatrix& m, const std::string& stem);

}  // namespace rlab::transfer
