#pragma once

#include <optional>

#include "finsler/jet.hpp"
#include "finsler/metric.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

using TensorJ = Tensor<Jet>;

/// Evaluation point (x, y) with the Berwald-side tensor tower, computed
/// lazily in jet arithmetic and cached. Every cached tensor is a pure
/// function of (metric, x, y, jet orders), so recomputation is bit-identical.
/// A frame is single-owner while filling; after the last accessor it is
/// immutable and safe to share across threads.
///
/// Local component conventions:
///   g_ij          = 1/2 dydot_i dydot_j L^2
///   ell_i         = dydot_i L
///   hbar_ij       = g_ij - ell_i ell_j
///   h^i_j         = delta^i_j - y^i ell_j / L
///   T_ijk         = 1/4 dydot_i dydot_j dydot_k L^2
///   G^i           = 1/4 g^{il} (y^k dx_k dydot_l L^2 - dx_l L^2)
///   G^i_j         = dydot_j G^i,   G^i_jk = dydot_k G^i_j
///   R^i_{h jk}    = A_{j,k} { delta_j G^i_{hk} + G^i_{mj} G^m_{hk} },
///                   delta_j = dx_j - G^m_j dydot_m
///   Rhat^i_{jk}   = y^h R^i_{h jk}
///   H^i_k         = y^j Rhat^i_{kj}   (deviation; H = k L^2 h for scalar
///                   curvature with the catalog's orientation)
class PointFrame {
public:
    PointFrame(const MetricSpec& spec, std::vector<double> x, std::vector<double> y, int order_x = 2,
               int order_y = 5);

    const MetricSpec& spec() const { return *spec_; }
    int n() const { return n_; }
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    const JetShape* shape() const { return shape_; }

    const Jet& L();
    const Jet& L2();
    const JetVec& y_jets();  // coordinate jets y^i

    const TensorJ& metric();                // g_ij
    const TensorJ& metric_inverse();        // g^ij
    const TensorJ& hilbert_form();          // ell_i
    const TensorJ& angular_metric();        // hbar_ij
    const TensorJ& phi_operator();          // h^i_j (slot order [i][j])
    const TensorJ& cartan_tensor();         // T_ijk
    const TensorJ& spray();                 // G^i
    const TensorJ& nonlinear_connection();  // G^i_j
    const TensorJ& berwald_coeffs();        // G^i_jk
    const TensorJ& berwald_coeffs_dy();     // dydot_m G^i_jk, slots [m][i][j][k]
    const TensorJ& berwald_hcurvature();    // R^i_{h jk}, slots [i][h][j][k]
    const TensorJ& vh_torsion();            // Rhat^i_jk = y^h R^i_{h jk}
    const TensorJ& deviation();             // H^i_k

    /// Classical deviation formula, computed independently of the curvature
    /// tower: 2 dx_k G^i - y^j dx_j G^i_k + 2 G^j G^i_jk - G^i_j G^j_k.
    TensorJ deviation_direct();

    /// Horizontal derivative of a cached jet: delta_j f = dx_j f - G^m_j dydot_m f.
    Jet horizontal_dx(const Jet& f, int j);

    /// Infinity-norm condition estimate of g used by the SingularMetric gate.
    double metric_condition();

private:
    const TensorJ& cache(std::optional<TensorJ>& slot, TensorJ (PointFrame::*make)());
    TensorJ make_metric();
    TensorJ make_metric_inverse();
    TensorJ make_hilbert_form();
    TensorJ make_angular_metric();
    TensorJ make_phi_operator();
    TensorJ make_cartan_tensor();
    TensorJ make_spray();
    TensorJ make_nonlinear_connection();
    TensorJ make_berwald_coeffs();
    TensorJ make_berwald_coeffs_dy();
    TensorJ make_berwald_hcurvature();
    TensorJ make_vh_torsion();
    TensorJ make_deviation();

    const MetricSpec* spec_;
    std::vector<double> x_, y_;
    int n_;
    const JetShape* shape_;

    std::optional<Jet> L_, L2_;
    std::optional<JetVec> yjets_;
    std::optional<TensorJ> g_, ginv_, ell_, hbar_, hmix_, cartanT_, sprayG_, Gij_, Gijk_, GijkDy_, hcurv_, rhat_,
        dev_;
    double cond_ = -1.0;
};

/// Throws NonSmoothPointError unless every entry is finite.
void ensure_finite(const TensorJ& t, const char* what);

/// Entry values of a jet tensor.
Tensor<double> values_of(const TensorJ& t);

}  // namespace finsler
