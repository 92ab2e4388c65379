#include "finsler/point_frame.hpp"

#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

void ensure_finite(const TensorJ& t, const char* what) {
    for (const Jet& j : t.data())
        if (!j.all_finite()) throw NonSmoothPointError(std::string("non-finite entries in ") + what);
}

Tensor<double> values_of(const TensorJ& t) {
    Tensor<double> out(t.n(), t.variance(), 0.0);
    for (size_t i = 0; i < t.data().size(); ++i) out.data()[i] = t.data()[i].value();
    return out;
}

PointFrame::PointFrame(const MetricSpec& spec, std::vector<double> x, std::vector<double> y, int order_x, int order_y)
    : spec_(&spec), x_(std::move(x)), y_(std::move(y)), n_(spec.dimension()) {
    shape_ = jet_shape(n_, order_x, order_y);
}

const Jet& PointFrame::L() {
    if (!L_) {
        L_ = spec_->lift_L(x_, y_, shape_->px, shape_->py);
        if (!(L_->value() > 0.0)) throw DomainError("fundamental function not positive at point");
    }
    return *L_;
}

const Jet& PointFrame::L2() {
    if (!L2_) L2_ = L() * L();
    return *L2_;
}

const JetVec& PointFrame::y_jets() {
    if (!yjets_) yjets_ = lift_point_y(shape_, y_);
    return *yjets_;
}

const TensorJ& PointFrame::cache(std::optional<TensorJ>& slot, TensorJ (PointFrame::*make)()) {
    if (!slot) slot = (this->*make)();
    return *slot;
}

const TensorJ& PointFrame::metric() { return cache(g_, &PointFrame::make_metric); }
const TensorJ& PointFrame::metric_inverse() { return cache(ginv_, &PointFrame::make_metric_inverse); }
const TensorJ& PointFrame::hilbert_form() { return cache(ell_, &PointFrame::make_hilbert_form); }
const TensorJ& PointFrame::angular_metric() { return cache(hbar_, &PointFrame::make_angular_metric); }
const TensorJ& PointFrame::phi_operator() { return cache(hmix_, &PointFrame::make_phi_operator); }
const TensorJ& PointFrame::cartan_tensor() { return cache(cartanT_, &PointFrame::make_cartan_tensor); }
const TensorJ& PointFrame::spray() { return cache(sprayG_, &PointFrame::make_spray); }
const TensorJ& PointFrame::nonlinear_connection() { return cache(Gij_, &PointFrame::make_nonlinear_connection); }
const TensorJ& PointFrame::berwald_coeffs() { return cache(Gijk_, &PointFrame::make_berwald_coeffs); }
const TensorJ& PointFrame::berwald_coeffs_dy() { return cache(GijkDy_, &PointFrame::make_berwald_coeffs_dy); }
const TensorJ& PointFrame::berwald_hcurvature() { return cache(hcurv_, &PointFrame::make_berwald_hcurvature); }
const TensorJ& PointFrame::vh_torsion() { return cache(rhat_, &PointFrame::make_vh_torsion); }
const TensorJ& PointFrame::deviation() { return cache(dev_, &PointFrame::make_deviation); }

TensorJ PointFrame::make_metric() {
    const Jet& l2 = L2();
    TensorJ g(n_, {Var::Co, Var::Co}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i) {
        Jet di = l2.dy(i);
        for (int j = i; j < n_; ++j) {
            Jet gij = di.dy(j) * 0.5;
            g(i, j) = gij;
            if (j != i) g(j, i) = gij;
        }
    }
    ensure_finite(g, "fundamental tensor");
    return g;
}

TensorJ PointFrame::make_metric_inverse() {
    const TensorJ& g = metric();
    // Gauss-Jordan with partial pivoting on jet values
    std::vector<Jet> a(g.data());
    TensorJ inv(n_, {Var::Con, Var::Con}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i) inv(i, i) = Jet::constant(shape_, 1.0);
    auto A = [&](int r, int c) -> Jet& { return a[static_cast<size_t>(r) * n_ + c]; };
    for (int col = 0; col < n_; ++col) {
        int piv = col;
        for (int r = col + 1; r < n_; ++r)
            if (std::abs(A(r, col).value()) > std::abs(A(piv, col).value())) piv = r;
        if (std::abs(A(piv, col).value()) < 1e-300) throw SingularMetricError("fundamental tensor not invertible");
        if (piv != col)
            for (int c = 0; c < n_; ++c) {
                std::swap(A(piv, c), A(col, c));
                std::swap(inv(piv, c), inv(col, c));
            }
        Jet pinv = recip(A(col, col));
        for (int c = 0; c < n_; ++c) {
            A(col, c) = A(col, c) * pinv;
            inv(col, c) = inv(col, c) * pinv;
        }
        for (int r = 0; r < n_; ++r) {
            if (r == col) continue;
            Jet f = A(r, col);
            for (int c = 0; c < n_; ++c) {
                A(r, c) -= f * A(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    ensure_finite(inv, "inverse fundamental tensor");

    double norm_g = 0.0, norm_inv = 0.0;
    for (int r = 0; r < n_; ++r) {
        double sg = 0.0, si = 0.0;
        for (int c = 0; c < n_; ++c) {
            sg += std::abs(g(r, c).value());
            si += std::abs(inv(r, c).value());
        }
        norm_g = std::max(norm_g, sg);
        norm_inv = std::max(norm_inv, si);
    }
    cond_ = norm_g * norm_inv;
    if (cond_ > 1e12) throw SingularMetricError("fundamental tensor condition number above 1e12");
    return inv;
}

double PointFrame::metric_condition() {
    metric_inverse();
    return cond_;
}

TensorJ PointFrame::make_hilbert_form() {
    TensorJ ell(n_, {Var::Co}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i) ell(i) = L().dy(i);
    ensure_finite(ell, "Hilbert form");
    return ell;
}

TensorJ PointFrame::make_angular_metric() {
    const TensorJ& g = metric();
    const TensorJ& ell = hilbert_form();
    TensorJ hbar(n_, {Var::Co, Var::Co}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) hbar(i, j) = g(i, j) - ell(i) * ell(j);
    return hbar;
}

TensorJ PointFrame::make_phi_operator() {
    const TensorJ& ell = hilbert_form();
    const JetVec& yj = y_jets();
    Jet Linv = recip(L());
    TensorJ h(n_, {Var::Con, Var::Co}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            h(i, j) = -(yj[i] * ell(j) * Linv);
            if (i == j) h(i, j) += 1.0;
        }
    return h;
}

TensorJ PointFrame::make_cartan_tensor() {
    const Jet& l2 = L2();
    TensorJ t(n_, {Var::Co, Var::Co, Var::Co}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i) {
        Jet di = l2.dy(i);
        for (int j = i; j < n_; ++j) {
            Jet dij = di.dy(j);
            for (int k = j; k < n_; ++k) {
                Jet v = dij.dy(k) * 0.25;
                t(i, j, k) = v;
                t(i, k, j) = v;
                t(j, i, k) = v;
                t(j, k, i) = v;
                t(k, i, j) = v;
                t(k, j, i) = v;
            }
        }
    }
    ensure_finite(t, "Cartan tensor");
    return t;
}

TensorJ PointFrame::make_spray() {
    const Jet& l2 = L2();
    const TensorJ& ginv = metric_inverse();
    const JetVec& yj = y_jets();
    // S_l = y^k dx_k dydot_l L^2 - dx_l L^2
    std::vector<Jet> dxl2;
    dxl2.reserve(n_);
    for (int k = 0; k < n_; ++k) dxl2.push_back(l2.dx(k));
    std::vector<Jet> S;
    S.reserve(n_);
    for (int l = 0; l < n_; ++l) {
        Jet s = -dxl2[l];
        for (int k = 0; k < n_; ++k) s.fma(yj[k], dxl2[k].dy(l));
        S.push_back(std::move(s));
    }
    TensorJ G(n_, {Var::Con}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i) {
        Jet acc = Jet::constant(shape_, 0.0);
        for (int l = 0; l < n_; ++l) acc.fma(ginv(i, l), S[l]);
        G(i) = acc * 0.25;
    }
    ensure_finite(G, "spray coefficients");
    return G;
}

TensorJ PointFrame::make_nonlinear_connection() {
    const TensorJ& G = spray();
    TensorJ N(n_, {Var::Con, Var::Co}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) N(i, j) = G(i).dy(j);
    return N;
}

TensorJ PointFrame::make_berwald_coeffs() {
    const TensorJ& N = nonlinear_connection();
    TensorJ B(n_, {Var::Con, Var::Co, Var::Co}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = j; k < n_; ++k) {
                Jet v = N(i, j).dy(k);
                B(i, j, k) = v;
                if (k != j) B(i, k, j) = v;
            }
    return B;
}

TensorJ PointFrame::make_berwald_coeffs_dy() {
    const TensorJ& B = berwald_coeffs();
    TensorJ D(n_, {Var::Co, Var::Con, Var::Co, Var::Co}, Jet::constant(shape_, 0.0));
    for (int m = 0; m < n_; ++m)
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = j; k < n_; ++k) {
                    Jet v = B(i, j, k).dy(m);
                    D(m, i, j, k) = v;
                    if (k != j) D(m, i, k, j) = v;
                }
    return D;
}

Jet PointFrame::horizontal_dx(const Jet& f, int j) {
    const TensorJ& N = nonlinear_connection();
    Jet out = f.dx(j);
    for (int m = 0; m < n_; ++m) out -= N(m, j) * f.dy(m);
    return out;
}

TensorJ PointFrame::make_berwald_hcurvature() {
    const TensorJ& B = berwald_coeffs();
    const TensorJ& Bdy = berwald_coeffs_dy();
    const TensorJ& N = nonlinear_connection();
    TensorJ R(n_, {Var::Con, Var::Co, Var::Co, Var::Co}, Jet::constant(shape_, 0.0));
    // A(i,h;j,k) = delta_j G^i_{hk} + G^i_{mj} G^m_{hk}; antisymmetrized in (j,k)
    auto term = [&](int i, int h, int j, int k) {
        Jet t = B(i, h, k).dx(j);
        for (int m = 0; m < n_; ++m) {
            t -= N(m, j) * Bdy(m, i, h, k);
            t.fma(B(i, m, j), B(m, h, k));
        }
        return t;
    };
    for (int i = 0; i < n_; ++i)
        for (int h = 0; h < n_; ++h)
            for (int j = 0; j < n_; ++j)
                for (int k = j + 1; k < n_; ++k) {
                    Jet v = term(i, h, j, k) - term(i, h, k, j);
                    R(i, h, j, k) = v;
                    R(i, h, k, j) = -v;
                }
    ensure_finite(R, "Berwald h-curvature");
    return R;
}

TensorJ PointFrame::make_vh_torsion() {
    const TensorJ& R = berwald_hcurvature();
    const JetVec& yj = y_jets();
    TensorJ rhat(n_, {Var::Con, Var::Co, Var::Co}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = j + 1; k < n_; ++k) {
                Jet acc = Jet::constant(shape_, 0.0);
                for (int h = 0; h < n_; ++h) acc.fma(yj[h], R(i, h, j, k));
                rhat(i, j, k) = acc;
                rhat(i, k, j) = -acc;
            }
    return rhat;
}

TensorJ PointFrame::make_deviation() {
    const TensorJ& rhat = vh_torsion();
    const JetVec& yj = y_jets();
    TensorJ H(n_, {Var::Con, Var::Co}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            Jet acc = Jet::constant(shape_, 0.0);
            for (int j = 0; j < n_; ++j) acc.fma(yj[j], rhat(i, k, j));
            H(i, k) = acc;
        }
    ensure_finite(H, "deviation tensor");
    return H;
}

TensorJ PointFrame::deviation_direct() {
    const TensorJ& G = spray();
    const TensorJ& N = nonlinear_connection();
    const TensorJ& B = berwald_coeffs();
    const JetVec& yj = y_jets();
    TensorJ H(n_, {Var::Con, Var::Co}, Jet::constant(shape_, 0.0));
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            Jet acc = G(i).dx(k) * 2.0;
            for (int j = 0; j < n_; ++j) {
                acc -= yj[j] * N(i, k).dx(j);
                acc.fma(G(j) * 2.0, B(i, j, k));
                acc -= N(i, j) * N(j, k);
            }
            H(i, k) = acc;
        }
    ensure_finite(H, "deviation tensor (direct)");
    return H;
}

}  // namespace finsler
