#include "finsler/jet.hpp"

#include <cassert>
#include <cmath>

#include "finsler/errors.hpp"
#include "finsler/jet_kernels.hpp"

namespace finsler {

Jet Jet::constant(const JetShape* s, double v) {
    Jet j(s, s->px, s->py);
    j.c_[0] = v;
    return j;
}

Jet Jet::coord_x(const JetShape* s, int i, double value) {
    Jet j(s, s->px, s->py);
    j.c_[0] = value;
    if (s->px >= 1) {
        std::vector<int> e(s->n, 0);
        e[i] = 1;
        int ix = s->x_index_of(e.data());
        j.c_[static_cast<size_t>(ix) * s->ny] = 1.0;
    }
    return j;
}

Jet Jet::coord_y(const JetShape* s, int i, double value) {
    Jet j(s, s->px, s->py);
    j.c_[0] = value;
    if (s->py >= 1) {
        std::vector<int> e(s->n, 0);
        e[i] = 1;
        int iy = s->y_index_of(e.data());
        j.c_[iy] = 1.0;
    }
    return j;
}

double Jet::partial(std::span<const int> x_orders, std::span<const int> y_orders) const {
    assert(shape_ && static_cast<int>(x_orders.size()) == shape_->n &&
           static_cast<int>(y_orders.size()) == shape_->n);
    int dx = 0, dy = 0;
    double fact = 1.0;
    for (int v = 0; v < shape_->n; ++v) {
        dx += x_orders[v];
        dy += y_orders[v];
        for (int k = 2; k <= x_orders[v]; ++k) fact *= k;
        for (int k = 2; k <= y_orders[v]; ++k) fact *= k;
    }
    if (dx > vx_ || dy > vy_) throw DepthError("partial derivative beyond valid jet order");
    int ix = shape_->x_index_of(x_orders.data());
    int iy = shape_->y_index_of(y_orders.data());
    if (ix < 0 || iy < 0) throw DepthError("partial derivative beyond jet shape");
    return c_[static_cast<size_t>(ix) * shape_->ny + iy] * fact;
}

Jet Jet::dx(int i) const {
    if (vx_ < 1) throw DepthError("x-derivative exhausts jet budget");
    Jet out(shape_, vx_ - 1, vy_);
    const auto& src = shape_->dx_src[i];
    const auto& sc = shape_->dx_scale[i];
    for (int c = 0; c < shape_->ncoeff; ++c)
        if (src[c] >= 0) out.c_[c] = c_[src[c]] * sc[c];
    return out;
}

Jet Jet::dy(int i) const {
    if (vy_ < 1) throw DepthError("y-derivative exhausts jet budget");
    Jet out(shape_, vx_, vy_ - 1);
    const auto& src = shape_->dy_src[i];
    const auto& sc = shape_->dy_scale[i];
    for (int c = 0; c < shape_->ncoeff; ++c)
        if (src[c] >= 0) out.c_[c] = c_[src[c]] * sc[c];
    return out;
}

bool Jet::all_finite() const {
    for (int c = 0; c < shape_->ncoeff; ++c) {
        if (shape_->coeff_xdeg[c] > vx_ || shape_->coeff_ydeg[c] > vy_) continue;
        if (!std::isfinite(c_[c])) return false;
    }
    return true;
}

Jet Jet::operator-() const {
    Jet out(shape_, vx_, vy_);
    active_kernels().neg(out.c_.data(), c_.data(), shape_->ncoeff);
    return out;
}

Jet& Jet::operator+=(const Jet& o) {
    assert(shape_ == o.shape_);
    active_kernels().add(c_.data(), c_.data(), o.c_.data(), shape_->ncoeff);
    vx_ = std::min(vx_, o.vx_);
    vy_ = std::min(vy_, o.vy_);
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    assert(shape_ == o.shape_);
    active_kernels().sub(c_.data(), c_.data(), o.c_.data(), shape_->ncoeff);
    vx_ = std::min(vx_, o.vx_);
    vy_ = std::min(vy_, o.vy_);
    return *this;
}

Jet& Jet::operator+=(double s) {
    c_[0] += s;
    return *this;
}

Jet& Jet::operator-=(double s) {
    c_[0] -= s;
    return *this;
}

Jet& Jet::operator*=(double s) {
    active_kernels().scal(c_.data(), c_.data(), s, shape_->ncoeff);
    return *this;
}

Jet& Jet::operator/=(double s) {
    double v0 = c_[0] / s;  // value lane stays the exact double quotient
    active_kernels().scal(c_.data(), c_.data(), 1.0 / s, shape_->ncoeff);
    c_[0] = v0;
    return *this;
}

Jet operator+(const Jet& a, const Jet& b) {
    assert(a.shape_ == b.shape_);
    Jet out(a.shape_, std::min(a.vx_, b.vx_), std::min(a.vy_, b.vy_));
    active_kernels().add(out.c_.data(), a.c_.data(), b.c_.data(), a.shape_->ncoeff);
    return out;
}

Jet operator-(const Jet& a, const Jet& b) {
    assert(a.shape_ == b.shape_);
    Jet out(a.shape_, std::min(a.vx_, b.vx_), std::min(a.vy_, b.vy_));
    active_kernels().sub(out.c_.data(), a.c_.data(), b.c_.data(), a.shape_->ncoeff);
    return out;
}

void Jet::conv(const Jet& a, const Jet& b, Jet& out, bool accumulate) {
    const JetShape* s = a.shape_;
    const Kernels& k = active_kernels();
    for (const auto& blk : s->mul_blocks) {
        if (blk.degx > out.vx_ || blk.degy > out.vy_) continue;
        k.conv(out.c_.data(), a.c_.data(), b.c_.data(), s->mul_out.data(), s->mul_row_ptr.data(), s->mul_ia.data(),
               s->mul_ib.data(), blk.out_begin, blk.out_end, accumulate);
    }
}

Jet operator*(const Jet& a, const Jet& b) {
    assert(a.shape_ == b.shape_);
    Jet out(a.shape_, std::min(a.vx_, b.vx_), std::min(a.vy_, b.vy_));
    Jet::conv(a, b, out, false);
    return out;
}

void Jet::fma(const Jet& a, const Jet& b) {
    assert(shape_ == a.shape_ && shape_ == b.shape_);
    vx_ = std::min({vx_, a.vx_, b.vx_});
    vy_ = std::min({vy_, a.vy_, b.vy_});
    conv(a, b, *this, true);
}

Jet operator+(const Jet& a, double s) {
    Jet out = a;
    out.c_[0] += s;
    return out;
}
Jet operator+(double s, const Jet& a) { return a + s; }

Jet operator-(const Jet& a, double s) {
    Jet out = a;
    out.c_[0] -= s;
    return out;
}
Jet operator-(double s, const Jet& a) {
    Jet out = -a;
    out.c_[0] += s;
    return out;
}

Jet operator*(const Jet& a, double s) {
    Jet out(a.shape_, a.vx_, a.vy_);
    active_kernels().scal(out.c_.data(), a.c_.data(), s, a.shape_->ncoeff);
    return out;
}
Jet operator*(double s, const Jet& a) { return a * s; }

Jet operator/(const Jet& a, double s) {
    Jet out = a;
    out /= s;
    return out;
}
Jet operator/(double s, const Jet& a) { return recip(a) * s; }

Jet Jet::nilpotent_part(double scale) const {
    Jet u(shape_, vx_, vy_);
    active_kernels().scal(u.c_.data(), c_.data(), scale, shape_->ncoeff);
    u.c_[0] = 0.0;
    return u;
}

Jet Jet::series(const Jet& u, std::span<const double> coeff) {
    // Horner; u is nilpotent at the validity cap, coeff has vx+vy+1 entries
    Jet r = Jet::constant(u.shape_, coeff[coeff.size() - 1]);
    r.vx_ = u.vx_;
    r.vy_ = u.vy_;
    for (int j = static_cast<int>(coeff.size()) - 2; j >= 0; --j) {
        Jet t(u.shape_, u.vx_, u.vy_);
        Jet::conv(r, u, t, false);
        t.c_[0] += coeff[j];
        r = std::move(t);
    }
    return r;
}

Jet recip(const Jet& a) {
    double a0 = a.value();
    if (a0 == 0.0 || !std::isfinite(a0)) throw NonSmoothPointError("division by zero in jet arithmetic");
    int terms = a.vx_ + a.vy_ + 1;
    std::vector<double> coeff(terms);
    double sign = 1.0;
    for (int j = 0; j < terms; ++j, sign = -sign) coeff[j] = sign;  // 1/(1+u) = sum (-u)^j
    Jet r = Jet::series(a.nilpotent_part(1.0 / a0), coeff);
    r *= 1.0 / a0;
    r.c_[0] = 1.0 / a0;
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    double q0 = a.value() / b.value();
    Jet out = a * recip(b);
    out.c_[0] = q0;
    return out;
}

Jet sqrt(const Jet& a) {
    double a0 = a.value();
    if (!(a0 > 0.0) || !std::isfinite(a0)) throw NonSmoothPointError("sqrt of non-positive value in jet arithmetic");
    int terms = a.vx_ + a.vy_ + 1;
    std::vector<double> coeff(terms);
    coeff[0] = 1.0;
    for (int j = 1; j < terms; ++j) coeff[j] = coeff[j - 1] * (0.5 - (j - 1)) / j;  // binomial(1/2, j)
    Jet r = Jet::series(a.nilpotent_part(1.0 / a0), coeff);
    double s0 = std::sqrt(a0);
    r *= s0;
    r.c_[0] = s0;
    return r;
}

Jet exp(const Jet& a) {
    double a0 = a.value();
    if (!std::isfinite(a0)) throw NonSmoothPointError("exp of non-finite value in jet arithmetic");
    Jet u = a;
    u.c_[0] = 0.0;  // exp(a) = exp(a0) exp(u), u nilpotent
    int terms = a.vx_ + a.vy_ + 1;
    std::vector<double> coeff(terms);
    coeff[0] = 1.0;
    for (int j = 1; j < terms; ++j) coeff[j] = coeff[j - 1] / j;
    Jet r = Jet::series(u, coeff);
    double e0 = std::exp(a0);
    r *= e0;
    r.c_[0] = e0;
    return r;
}

Jet log(const Jet& a) {
    double a0 = a.value();
    if (!(a0 > 0.0) || !std::isfinite(a0)) throw NonSmoothPointError("log of non-positive value in jet arithmetic");
    int terms = a.vx_ + a.vy_ + 1;
    std::vector<double> coeff(terms);
    coeff[0] = 0.0;
    double sign = 1.0;
    for (int j = 1; j < terms; ++j, sign = -sign) coeff[j] = sign / j;  // log(1+u)
    Jet r = Jet::series(a.nilpotent_part(1.0 / a0), coeff);
    r.c_[0] = std::log(a0);
    return r;
}

Jet pow(const Jet& a, double e) {
    double a0 = a.value();
    if (!(a0 > 0.0) || !std::isfinite(a0)) throw NonSmoothPointError("pow of non-positive base in jet arithmetic");
    int terms = a.vx_ + a.vy_ + 1;
    std::vector<double> coeff(terms);
    coeff[0] = 1.0;
    for (int j = 1; j < terms; ++j) coeff[j] = coeff[j - 1] * (e - (j - 1)) / j;  // binomial(e, j)
    Jet r = Jet::series(a.nilpotent_part(1.0 / a0), coeff);
    double p0 = std::pow(a0, e);
    r *= p0;
    r.c_[0] = p0;
    return r;
}

JetVec lift_point_x(const JetShape* s, std::span<const double> x) {
    JetVec out;
    out.reserve(x.size());
    for (size_t i = 0; i < x.size(); ++i) out.push_back(Jet::coord_x(s, static_cast<int>(i), x[i]));
    return out;
}

JetVec lift_point_y(const JetShape* s, std::span<const double> y) {
    JetVec out;
    out.reserve(y.size());
    for (size_t i = 0; i < y.size(); ++i) out.push_back(Jet::coord_y(s, static_cast<int>(i), y[i]));
    return out;
}

}  // namespace finsler
