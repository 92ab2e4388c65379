#pragma once

#include "finsler/point_frame.hpp"

namespace finsler {

/// Cartan-connection quantities over a Berwald frame:
///   F^i_jk        = 1/2 g^{is} (delta_j g_sk + delta_k g_js - delta_s g_jk)
///   Phat^i_jk     = G^i_jk - F^i_jk          ((v)hv-torsion; indicatory)
///   R^i_{h jk}    = A_{j,k}{ delta_j F^i_{hk} + F^i_{mj} F^m_{hk} }
///                   + T^i_{hm} Rhat^m_{jk}    (Cartan h-curvature)
///   Q_ijkl        = g_ab Phat^a_il Phat^b_jk - g_ab Phat^a_ik Phat^b_jl
/// plus the Berwald horizontal covariant derivative of the lowered Phat.
class CartanFrame {
public:
    explicit CartanFrame(PointFrame& base) : base_(&base) {}

    PointFrame& base() { return *base_; }

    const TensorJ& delta_metric();      // delta_m g_ab, slots [m][a][b]
    const TensorJ& cartan_coeffs();     // F^i_jk
    const TensorJ& hv_torsion();        // Phat^i_jk
    const TensorJ& hv_torsion_low();    // Phat_jkl = g_ja Phat^a_kl (totally symmetric)
    const TensorJ& cartan_hcurvature(); // R^i_{h jk}, slots [i][h][j][k]
    const TensorJ& q_tensor();          // Q_ijkl

    /// (D0_{beta eta} Phat)(Z,W,Y): Berwald horizontal covariant derivative
    /// of the lowered torsion along the canonical direction, slots [z][w][y].
    const TensorJ& berwald_hcov_Phat_eta();

    /// Same derivative along the m-th horizontal basis direction; slots
    /// [m][j][k][l] so a direction X contracts on the first slot.
    const TensorJ& berwald_hcov_Phat_dir();

    /// Cartan horizontal covariant derivative of the (1,2) torsion,
    /// slots [m][i][k][l].
    const TensorJ& cartan_hcov_Phat_dir();

private:
    const TensorJ& cache(std::optional<TensorJ>& slot, TensorJ (CartanFrame::*make)());
    TensorJ make_delta_metric();
    TensorJ make_cartan_coeffs();
    TensorJ make_hv_torsion();
    TensorJ make_hv_torsion_low();
    TensorJ make_cartan_hcurvature();
    TensorJ make_q_tensor();
    TensorJ make_berwald_hcov_eta();
    TensorJ make_berwald_hcov_dir();
    TensorJ make_cartan_hcov_dir();

    PointFrame* base_;
    std::optional<TensorJ> dg_, F_, phat_, phat_low_, hcurv_, q_, dphat_eta_, dphat_dir_, nabla_phat_;
};

}  // namespace finsler
