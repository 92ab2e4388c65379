#include "finsler/cartan_frame.hpp"

namespace finsler {

const TensorJ& CartanFrame::cache(std::optional<TensorJ>& slot, TensorJ (CartanFrame::*make)()) {
    if (!slot) slot = (this->*make)();
    return *slot;
}

const TensorJ& CartanFrame::delta_metric() { return cache(dg_, &CartanFrame::make_delta_metric); }
const TensorJ& CartanFrame::cartan_coeffs() { return cache(F_, &CartanFrame::make_cartan_coeffs); }
const TensorJ& CartanFrame::hv_torsion() { return cache(phat_, &CartanFrame::make_hv_torsion); }
const TensorJ& CartanFrame::hv_torsion_low() { return cache(phat_low_, &CartanFrame::make_hv_torsion_low); }
const TensorJ& CartanFrame::cartan_hcurvature() { return cache(hcurv_, &CartanFrame::make_cartan_hcurvature); }
const TensorJ& CartanFrame::q_tensor() { return cache(q_, &CartanFrame::make_q_tensor); }
const TensorJ& CartanFrame::berwald_hcov_Phat_eta() { return cache(dphat_eta_, &CartanFrame::make_berwald_hcov_eta); }
const TensorJ& CartanFrame::berwald_hcov_Phat_dir() { return cache(dphat_dir_, &CartanFrame::make_berwald_hcov_dir); }
const TensorJ& CartanFrame::cartan_hcov_Phat_dir() { return cache(nabla_phat_, &CartanFrame::make_cartan_hcov_dir); }

TensorJ CartanFrame::make_delta_metric() {
    PointFrame& f = *base_;
    const int n = f.n();
    const TensorJ& g = f.metric();
    TensorJ dg(n, {Var::Co, Var::Co, Var::Co}, Jet::constant(f.shape(), 0.0));
    for (int m = 0; m < n; ++m)
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                Jet v = f.horizontal_dx(g(a, b), m);
                dg(m, a, b) = v;
                if (b != a) dg(m, b, a) = v;
            }
    ensure_finite(dg, "horizontal derivative of g");
    return dg;
}

TensorJ CartanFrame::make_cartan_coeffs() {
    PointFrame& f = *base_;
    const int n = f.n();
    const TensorJ& ginv = f.metric_inverse();
    const TensorJ& dg = delta_metric();
    TensorJ F(n, {Var::Con, Var::Co, Var::Co}, Jet::constant(f.shape(), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = j; k < n; ++k) {
                Jet acc = Jet::constant(f.shape(), 0.0);
                for (int s = 0; s < n; ++s) acc.fma(ginv(i, s), dg(j, s, k) + dg(k, j, s) - dg(s, j, k));
                acc *= 0.5;
                F(i, j, k) = acc;
                if (k != j) F(i, k, j) = acc;
            }
    ensure_finite(F, "Cartan connection coefficients");
    return F;
}

TensorJ CartanFrame::make_hv_torsion() {
    PointFrame& f = *base_;
    const int n = f.n();
    const TensorJ& B = f.berwald_coeffs();
    const TensorJ& F = cartan_coeffs();
    TensorJ P(n, {Var::Con, Var::Co, Var::Co}, Jet::constant(f.shape(), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) P(i, j, k) = B(i, j, k) - F(i, j, k);
    return P;
}

TensorJ CartanFrame::make_hv_torsion_low() {
    PointFrame& f = *base_;
    const int n = f.n();
    const TensorJ& g = f.metric();
    const TensorJ& P = hv_torsion();
    TensorJ low(n, {Var::Co, Var::Co, Var::Co}, Jet::constant(f.shape(), 0.0));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                Jet acc = Jet::constant(f.shape(), 0.0);
                for (int a = 0; a < n; ++a) acc.fma(g(j, a), P(a, k, l));
                low(j, k, l) = acc;
            }
    return low;
}

TensorJ CartanFrame::make_cartan_hcurvature() {
    PointFrame& f = *base_;
    const int n = f.n();
    const TensorJ& F = cartan_coeffs();
    const TensorJ& N = f.nonlinear_connection();
    const TensorJ& ginv = f.metric_inverse();
    const TensorJ& T = f.cartan_tensor();
    const TensorJ& rhat = f.vh_torsion();
    // T^i_{hm}
    TensorJ Tmix(n, {Var::Con, Var::Co, Var::Co}, Jet::constant(f.shape(), 0.0));
    for (int i = 0; i < n; ++i)
        for (int h = 0; h < n; ++h)
            for (int m = 0; m < n; ++m) {
                Jet acc = Jet::constant(f.shape(), 0.0);
                for (int a = 0; a < n; ++a) acc.fma(ginv(i, a), T(a, h, m));
                Tmix(i, h, m) = acc;
            }
    auto term = [&](int i, int h, int j, int k) {
        Jet t = f.horizontal_dx(F(i, h, k), j);
        for (int m = 0; m < n; ++m) t.fma(F(i, m, j), F(m, h, k));
        return t;
    };
    TensorJ R(n, {Var::Con, Var::Co, Var::Co, Var::Co}, Jet::constant(f.shape(), 0.0));
    for (int i = 0; i < n; ++i)
        for (int h = 0; h < n; ++h)
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k) {
                    Jet v = term(i, h, j, k) - term(i, h, k, j);
                    for (int m = 0; m < n; ++m) v.fma(Tmix(i, h, m), rhat(m, j, k));
                    R(i, h, j, k) = v;
                    R(i, h, k, j) = -v;
                }
    ensure_finite(R, "Cartan h-curvature");
    return R;
}

TensorJ CartanFrame::make_q_tensor() {
    PointFrame& f = *base_;
    const int n = f.n();
    const TensorJ& P = hv_torsion();
    const TensorJ& Plow = hv_torsion_low();
    TensorJ Q(n, {Var::Co, Var::Co, Var::Co, Var::Co}, Jet::constant(f.shape(), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = k + 1; l < n; ++l) {
                    Jet acc = Jet::constant(f.shape(), 0.0);
                    for (int b = 0; b < n; ++b) {
                        acc.fma(Plow(b, i, l), P(b, j, k));
                        acc -= Plow(b, i, k) * P(b, j, l);
                    }
                    Q(i, j, k, l) = acc;
                    Q(i, j, l, k) = -acc;
                }
    return Q;
}

TensorJ CartanFrame::make_berwald_hcov_dir() {
    PointFrame& f = *base_;
    const int n = f.n();
    const TensorJ& Plow = hv_torsion_low();
    const TensorJ& B = f.berwald_coeffs();
    TensorJ D(n, {Var::Co, Var::Co, Var::Co, Var::Co}, Jet::constant(f.shape(), 0.0));
    for (int m = 0; m < n; ++m)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    Jet acc = f.horizontal_dx(Plow(j, k, l), m);
                    for (int a = 0; a < n; ++a) {
                        acc -= B(a, m, j) * Plow(a, k, l);
                        acc -= B(a, m, k) * Plow(j, a, l);
                        acc -= B(a, m, l) * Plow(j, k, a);
                    }
                    D(m, j, k, l) = acc;
                }
    ensure_finite(D, "Berwald covariant derivative of hv-torsion");
    return D;
}

TensorJ CartanFrame::make_berwald_hcov_eta() {
    PointFrame& f = *base_;
    const int n = f.n();
    const TensorJ& D = berwald_hcov_Phat_dir();
    const JetVec& yj = f.y_jets();
    TensorJ out(n, {Var::Co, Var::Co, Var::Co}, Jet::constant(f.shape(), 0.0));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                Jet acc = Jet::constant(f.shape(), 0.0);
                for (int m = 0; m < n; ++m) acc.fma(yj[m], D(m, j, k, l));
                out(j, k, l) = acc;
            }
    return out;
}

TensorJ CartanFrame::make_cartan_hcov_dir() {
    PointFrame& f = *base_;
    const int n = f.n();
    const TensorJ& P = hv_torsion();
    const TensorJ& F = cartan_coeffs();
    TensorJ D(n, {Var::Co, Var::Con, Var::Co, Var::Co}, Jet::constant(f.shape(), 0.0));
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    Jet acc = f.horizontal_dx(P(i, k, l), m);
                    for (int a = 0; a < n; ++a) {
                        acc.fma(F(i, a, m), P(a, k, l));
                        acc -= F(a, k, m) * P(i, a, l);
                        acc -= F(a, l, m) * P(i, k, a);
                    }
                    D(m, i, k, l) = acc;
                }
    ensure_finite(D, "Cartan covariant derivative of hv-torsion");
    return D;
}

}  // namespace finsler
